#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "gdt/clustering.hpp"
#include "gdt/measures.hpp"
#include "gdt/tree.hpp"

namespace gdt {

class MtsOracle;

enum class Evaluation { Local, Global };
enum class LabelRule { Majority, Exhaustive };
enum class Exec { Serial, Parallel };

/// Valid criteria on `rows`: for each feature, midpoints between consecutive
/// distinct values. Ordered by feature, then threshold.
std::vector<SplitCriterion> candidate_splits(const LabeledDataset& d, std::span<const std::size_t> rows);

/// Most frequent label; ties and empty input resolve to the smallest index
/// (or `fallback` when rows is empty).
int majority_label(const LabeledDataset& d, std::span<const std::size_t> rows, int fallback = 0);

/// Score of splitting `leaf_rows` at c, looking only at those rows. The
/// ground truth is the first clustering: Δ(y|X', c|X') for permutation
/// invariant measures, Δ(y|X', prediction after majority labeling) for the
/// index-sensitive ones, mts(left) + mts(right) for MinimalTreeSize.
double local_split_score(MeasureId m, const LabeledDataset& d, std::span<const std::size_t> leaf_rows,
                         const SplitCriterion& c, MtsOracle* oracle = nullptr);

/// Δ(Y, T_t') for t' = exchange(t, leaf_id, Branch(c, Leaf(left), Leaf(right))).
double global_split_score(MeasureId m, const LabeledDataset& d, std::span<const std::size_t> universe,
                          const DecisionTree& t, std::size_t leaf_id, const SplitCriterion& c,
                          int left_label, int right_label);

/// Instances of one leaf, kept sorted along every feature so that a split
/// can be scored in one sweep and partitioned without re-sorting.
struct LeafRows {
    std::size_t node_id = 0;
    int label = 0;
    RowIds rows;                          // ascending row ids
    std::vector<RowIds> by_feature;       // by (x_j, row id)
    std::vector<std::size_t> class_counts;

    std::size_t count() const noexcept { return rows.size(); }
    bool is_pure() const noexcept;
};

LeafRows make_leaf_rows(const LabeledDataset& d, std::span<const std::size_t> rows, std::size_t node_id,
                        int label);

/// (left: x_j <= r, right: x_j > r). Node ids and labels are left to the caller.
std::pair<LeafRows, LeafRows> partition_leaf(const LabeledDataset& d, const LeafRows& leaf,
                                             const SplitCriterion& c);

struct ScoringContext {
    const LabeledDataset* data = nullptr;
    MeasureId measure = MeasureId::InformationGain;
    Evaluation evaluation = Evaluation::Local;
    LabelRule label_rule = LabelRule::Majority;
    /// Global only: k x k counts of the current tree, truth rows, predicted columns.
    std::span<const std::size_t> confusion;
    /// MinimalTreeSize only.
    MtsOracle* oracle = nullptr;
};

struct SplitCandidate {
    std::size_t leaf = 0;  // index into the searched leaf list
    SplitCriterion criterion;
    int left_label = 0;
    int right_label = 0;
    double score = 0.0;
};

struct SearchResult {
    std::optional<SplitCandidate> best;
    std::size_t evaluated = 0;  // valid candidates scored, before any bound
};

/// Argmin over (leaf, criterion, labels) in canonical order (leaf position,
/// feature, threshold, left label, right label); a later candidate replaces
/// the incumbent only if it is lower by more than kScoreTolerance. When
/// `bounds` is non-empty, candidates of leaf i must score below bounds[i].
/// Serial and Parallel return identical results.
SearchResult best_split(const ScoringContext& ctx, std::span<const LeafRows* const> leaves, Exec exec,
                        std::span<const double> bounds = {});

/// Brute-force reference for best_split: enumerates candidate_splits per leaf
/// and scores each through local_split_score / global_split_score on
/// explicitly built clusterings. Leaves are given as node ids of `t`.
SearchResult best_split_reference(const ScoringContext& ctx, const DecisionTree& t,
                                  std::span<const std::size_t> universe,
                                  std::span<const std::size_t> leaf_ids,
                                  std::span<const double> bounds = {});

}  // namespace gdt
