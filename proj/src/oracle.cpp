#include "gdt/oracle.hpp"

#include <algorithm>
#include <bit>
#include <limits>

#include "gdt/errors.hpp"
#include "gdt/split_search.hpp"

namespace gdt {

MtsOracle::MtsOracle(const LabeledDataset& d, std::span<const std::size_t> universe, std::size_t budget)
    : data_(d), universe_(universe.begin(), universe.end()) {
    const std::size_t cap = std::min<std::size_t>(budget, 64);
    if (universe_.size() > cap)
        throw BudgetError("minimal tree search over " + std::to_string(universe_.size()) +
                          " instances exceeds the budget of " + std::to_string(cap));
    for (std::size_t p = 0; p < universe_.size(); ++p) {
        if (universe_[p] >= d.size()) throw PreconditionError("row id out of range");
        bit_of_row_[universe_[p]] = static_cast<unsigned>(p);
    }
}

MtsOracle::SubsetKey MtsOracle::key_of(std::span<const std::size_t> rows) const {
    SubsetKey key = 0;
    for (std::size_t r : rows) {
        auto it = bit_of_row_.find(r);
        if (it == bit_of_row_.end()) throw PreconditionError("row outside the oracle universe");
        key |= SubsetKey{1} << it->second;
    }
    return key;
}

RowIds MtsOracle::rows_of(SubsetKey key) const {
    RowIds rows;
    rows.reserve(static_cast<std::size_t>(std::popcount(key)));
    while (key) {
        rows.push_back(universe_[static_cast<std::size_t>(std::countr_zero(key))]);
        key &= key - 1;
    }
    return rows;
}

namespace {

bool pure(const LabeledDataset& d, std::span<const std::size_t> rows) {
    return std::all_of(rows.begin(), rows.end(), [&](std::size_t r) { return d.label(r) == d.label(rows.front()); });
}

}  // namespace

std::size_t MtsOracle::solve(SubsetKey key) {
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    const RowIds rows = rows_of(key);
    std::size_t best = 1;
    if (!pure(data_, rows)) {
        const auto criteria = candidate_splits(data_, rows);
        if (criteria.empty())
            throw NoConsistentTreeError("identical instances carry different labels; no consistent tree exists");
        best = std::numeric_limits<std::size_t>::max();
        for (const auto& c : criteria) {
            SubsetKey left = 0;
            for (std::size_t r : rows) {
                if (c(data_.row(r))) left |= SubsetKey{1} << bit_of_row_.at(r);
            }
            const std::size_t size = 1 + solve(left) + solve(key & ~left);
            best = std::min(best, size);
            if (best == 3) break;  // smallest impure tree
        }
    }
    memo_.emplace(key, best);
    return best;
}

DecisionTree MtsOracle::build(SubsetKey key) {
    const RowIds rows = rows_of(key);
    const std::size_t target = solve(key);
    if (target == 1) return DecisionTree::leaf(data_.label(rows.front()));
    for (const auto& c : candidate_splits(data_, rows)) {
        SubsetKey left = 0;
        for (std::size_t r : rows) {
            if (c(data_.row(r))) left |= SubsetKey{1} << bit_of_row_.at(r);
        }
        const SubsetKey right = key & ~left;
        if (1 + solve(left) + solve(right) == target)
            return DecisionTree::branch(c, build(left), build(right));
    }
    throw Error("minimal tree reconstruction failed");  // unreachable if solve is consistent
}

std::size_t MtsOracle::mts(std::span<const std::size_t> rows) {
    if (rows.empty()) throw PreconditionError("mts of an empty instance set is undefined");
    return solve(key_of(rows));
}

DecisionTree MtsOracle::minimal_tree(std::span<const std::size_t> rows) {
    if (rows.empty()) throw PreconditionError("minimal tree of an empty instance set is undefined");
    return build(key_of(rows));
}

double MtsOracle::delta_mts(std::span<const std::size_t> leaf_rows, const SplitCriterion& c) {
    RowIds left, right;
    for (std::size_t r : leaf_rows) (c(data_.row(r)) ? left : right).push_back(r);
    if (left.empty() || right.empty()) throw PreconditionError("criterion is not valid on the leaf");
    return static_cast<double>(mts(left) + mts(right));
}

std::size_t mts(const LabeledDataset& d, std::span<const std::size_t> rows, std::size_t budget) {
    return MtsOracle(d, rows, budget).mts(rows);
}

DecisionTree minimal_tree(const LabeledDataset& d, std::span<const std::size_t> rows, std::size_t budget) {
    return MtsOracle(d, rows, budget).minimal_tree(rows);
}

double delta_mts(const LabeledDataset& d, std::span<const std::size_t> leaf_rows, const SplitCriterion& c,
                 std::size_t budget) {
    return MtsOracle(d, leaf_rows, budget).delta_mts(leaf_rows, c);
}

}  // namespace gdt
