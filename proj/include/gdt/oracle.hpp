#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <unordered_map>

#include "gdt/clustering.hpp"
#include "gdt/tree.hpp"

namespace gdt {

inline constexpr std::size_t kDefaultOracleBudget = 24;

/// Exact minimal consistent tree size over subsets of a fixed universe.
///
/// mts(S) = 1 if S is pure, otherwise the minimum over valid criteria c of
/// 1 + mts(S_left) + mts(S_right). Subproblems are memoized on the instance
/// subset (a bitmask over the universe), so the universe is capped by the
/// budget and by 64 rows.
///
/// Not thread-safe; the memo is filled lazily.
class MtsOracle {
public:
    MtsOracle(const LabeledDataset& d, std::span<const std::size_t> universe,
              std::size_t budget = kDefaultOracleBudget);

    /// Throws NoConsistentTreeError if rows contain identical feature vectors
    /// with different labels.
    std::size_t mts(std::span<const std::size_t> rows);
    /// Consistent tree of size mts(rows); the first minimizing criterion in
    /// candidate_splits order is used at every node.
    DecisionTree minimal_tree(std::span<const std::size_t> rows);
    /// mts(left) + mts(right) after splitting leaf_rows at c.
    double delta_mts(std::span<const std::size_t> leaf_rows, const SplitCriterion& c);

    const LabeledDataset& data() const noexcept { return data_; }
    std::size_t memo_size() const noexcept { return memo_.size(); }

private:
    using SubsetKey = std::uint64_t;

    SubsetKey key_of(std::span<const std::size_t> rows) const;
    RowIds rows_of(SubsetKey key) const;
    std::size_t solve(SubsetKey key);
    DecisionTree build(SubsetKey key);

    const LabeledDataset& data_;
    RowIds universe_;
    std::unordered_map<std::size_t, unsigned> bit_of_row_;
    std::unordered_map<SubsetKey, std::size_t> memo_;
};

std::size_t mts(const LabeledDataset& d, std::span<const std::size_t> rows,
                std::size_t budget = kDefaultOracleBudget);
DecisionTree minimal_tree(const LabeledDataset& d, std::span<const std::size_t> rows,
                          std::size_t budget = kDefaultOracleBudget);
double delta_mts(const LabeledDataset& d, std::span<const std::size_t> leaf_rows, const SplitCriterion& c,
                 std::size_t budget = kDefaultOracleBudget);

}  // namespace gdt
