#include "gdt/split_search.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "gdt/errors.hpp"
#include "gdt/oracle.hpp"

namespace gdt {

std::vector<SplitCriterion> candidate_splits(const LabeledDataset& d, std::span<const std::size_t> rows) {
    std::vector<SplitCriterion> out;
    std::vector<double> values(rows.size());
    for (std::size_t j = 0; j < d.n_features(); ++j) {
        for (std::size_t p = 0; p < rows.size(); ++p) values[p] = d.value(rows[p], j);
        std::sort(values.begin(), values.end());
        for (std::size_t p = 1; p < values.size(); ++p) {
            if (values[p] != values[p - 1]) out.push_back({j, (values[p - 1] + values[p]) / 2.0});
        }
    }
    return out;
}

int majority_label(const LabeledDataset& d, std::span<const std::size_t> rows, int fallback) {
    if (rows.empty()) return fallback;
    std::vector<std::size_t> counts(d.n_classes(), 0);
    for (std::size_t r : rows) ++counts[static_cast<std::size_t>(d.label(r))];
    return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

namespace {

int argmax_label(std::span<const std::size_t> counts) {
    return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

std::pair<RowIds, RowIds> split_rows(const LabeledDataset& d, std::span<const std::size_t> rows,
                                     const SplitCriterion& c) {
    RowIds left, right;
    for (std::size_t r : rows) (c(d.row(r)) ? left : right).push_back(r);
    if (left.empty() || right.empty()) throw PreconditionError("criterion is not valid on the leaf");
    return {std::move(left), std::move(right)};
}

}  // namespace

double local_split_score(MeasureId m, const LabeledDataset& d, std::span<const std::size_t> leaf_rows,
                         const SplitCriterion& c, MtsOracle* oracle) {
    auto [left, right] = split_rows(d, leaf_rows, c);
    if (m == MeasureId::MinimalTreeSize) {
        if (oracle) return oracle->delta_mts(leaf_rows, c);
        return delta_mts(d, leaf_rows, c);
    }
    const Clustering truth = clustering_from_labels(d, leaf_rows);
    std::vector<std::size_t> membership(leaf_rows.size());
    if (is_permutation_invariant(m)) {
        for (std::size_t p = 0; p < leaf_rows.size(); ++p) membership[p] = c(d.row(leaf_rows[p])) ? 0 : 1;
        return evaluate(m, truth, Clustering(truth.universe(), std::move(membership), 2));
    }
    const auto left_label = static_cast<std::size_t>(majority_label(d, left));
    const auto right_label = static_cast<std::size_t>(majority_label(d, right));
    for (std::size_t p = 0; p < leaf_rows.size(); ++p)
        membership[p] = c(d.row(leaf_rows[p])) ? left_label : right_label;
    return evaluate(m, truth, Clustering(truth.universe(), std::move(membership), d.n_classes()));
}

double global_split_score(MeasureId m, const LabeledDataset& d, std::span<const std::size_t> universe,
                          const DecisionTree& t, std::size_t leaf_id, const SplitCriterion& c,
                          int left_label, int right_label) {
    split_rows(d, instances_at_leaf(t, d, universe, leaf_id), c);
    const DecisionTree next =
        exchange(t, leaf_id, DecisionTree::branch(c, DecisionTree::leaf(left_label), DecisionTree::leaf(right_label)));
    return evaluate(m, clustering_from_labels(d, universe), induced_clustering(next, d, universe));
}

bool LeafRows::is_pure() const noexcept {
    return std::count_if(class_counts.begin(), class_counts.end(), [](std::size_t n) { return n > 0; }) <= 1;
}

LeafRows make_leaf_rows(const LabeledDataset& d, std::span<const std::size_t> rows, std::size_t node_id, int label) {
    LeafRows leaf;
    leaf.node_id = node_id;
    leaf.label = label;
    leaf.rows.assign(rows.begin(), rows.end());
    std::sort(leaf.rows.begin(), leaf.rows.end());
    leaf.class_counts.assign(d.n_classes(), 0);
    for (std::size_t r : leaf.rows) ++leaf.class_counts[static_cast<std::size_t>(d.label(r))];
    leaf.by_feature.resize(d.n_features());
    for (std::size_t j = 0; j < d.n_features(); ++j) {
        auto& order = leaf.by_feature[j];
        order = leaf.rows;
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return d.value(a, j) < d.value(b, j); });
    }
    return leaf;
}

std::pair<LeafRows, LeafRows> partition_leaf(const LabeledDataset& d, const LeafRows& leaf, const SplitCriterion& c) {
    LeafRows left, right;
    left.class_counts.assign(d.n_classes(), 0);
    right.class_counts.assign(d.n_classes(), 0);
    for (std::size_t r : leaf.rows) {
        LeafRows& side = c(d.row(r)) ? left : right;
        side.rows.push_back(r);
        ++side.class_counts[static_cast<std::size_t>(d.label(r))];
    }
    left.by_feature.resize(leaf.by_feature.size());
    right.by_feature.resize(leaf.by_feature.size());
    for (std::size_t j = 0; j < leaf.by_feature.size(); ++j) {
        left.by_feature[j].reserve(left.rows.size());
        right.by_feature[j].reserve(right.rows.size());
        for (std::size_t r : leaf.by_feature[j]) (c(d.row(r)) ? left : right).by_feature[j].push_back(r);
    }
    return {std::move(left), std::move(right)};
}

namespace {

struct Incumbent {
    std::optional<SplitCandidate> best;
    std::size_t evaluated = 0;

    void offer(const SplitCandidate& c) {
        if (!best || c.score < best->score - kScoreTolerance) best = c;
    }
};

// Scores every candidate of one (leaf, feature) pair in a single sweep over
// the feature-sorted rows, keeping running class counts of the left side.
class SweepScorer {
public:
    SweepScorer(const ScoringContext& ctx, const LeafRows& leaf, std::size_t leaf_index, double bound)
        : ctx_(ctx), d_(*ctx.data), leaf_(leaf), leaf_index_(leaf_index), bound_(bound), k_(d_.n_classes()) {
        if (ctx.evaluation == Evaluation::Global) {
            base_.assign(ctx.confusion.begin(), ctx.confusion.end());
            const auto label = static_cast<std::size_t>(leaf.label);
            for (std::size_t y = 0; y < k_; ++y) base_[y * k_ + label] -= leaf.class_counts[y];
        }
    }

    void run(std::size_t feature, Incumbent& out) {
        const auto& order = leaf_.by_feature[feature];
        std::vector<std::size_t> left(k_, 0);
        for (std::size_t p = 0; p + 1 < order.size(); ++p) {
            ++left[static_cast<std::size_t>(d_.label(order[p]))];
            const double a = d_.value(order[p], feature);
            const double b = d_.value(order[p + 1], feature);
            if (a == b) continue;
            const SplitCriterion c{feature, (a + b) / 2.0};
            std::vector<std::size_t> right(k_);
            for (std::size_t y = 0; y < k_; ++y) right[y] = leaf_.class_counts[y] - left[y];
            score_threshold(c, left, right, std::span(order).first(p + 1), std::span(order).subspan(p + 1), out);
        }
    }

private:
    void offer(SplitCandidate c, Incumbent& out) const {
        ++out.evaluated;
        if (c.score >= bound_ - kScoreTolerance) return;
        out.offer(c);
    }

    void score_threshold(const SplitCriterion& c, std::span<const std::size_t> left,
                         std::span<const std::size_t> right, std::span<const std::size_t> left_rows,
                         std::span<const std::size_t> right_rows, Incumbent& out) {
        const int left_major = argmax_label(left);
        const int right_major = argmax_label(right);
        if (ctx_.evaluation == Evaluation::Local) {
            double score;
            if (ctx_.measure == MeasureId::MinimalTreeSize) {
                score = static_cast<double>(ctx_.oracle->mts(left_rows) + ctx_.oracle->mts(right_rows));
            } else if (is_permutation_invariant(ctx_.measure)) {
                std::vector<std::size_t> counts(k_ * 2);
                for (std::size_t y = 0; y < k_; ++y) {
                    counts[y * 2] = left[y];
                    counts[y * 2 + 1] = right[y];
                }
                score = evaluate(ctx_.measure, ContingencyTable(k_, 2, std::move(counts)));
            } else {
                score = global_like(left, right, left_major, right_major, /*local=*/true);
            }
            offer({leaf_index_, c, left_major, right_major, score}, out);
            return;
        }
        if (ctx_.label_rule == LabelRule::Majority) {
            offer({leaf_index_, c, left_major, right_major, global_like(left, right, left_major, right_major, false)}, out);
            return;
        }
        for (int i0 = 0; i0 < static_cast<int>(k_); ++i0) {
            for (int i1 = 0; i1 < static_cast<int>(k_); ++i1) {
                offer({leaf_index_, c, i0, i1, global_like(left, right, i0, i1, false)}, out);
            }
        }
    }

    // Truth x prediction table after labeling the two sides. Local scoring
    // starts from an empty table (only the leaf's rows), global scoring from
    // the rest of the tree.
    double global_like(std::span<const std::size_t> left, std::span<const std::size_t> right, int i0, int i1,
                       bool local) const {
        std::vector<std::size_t> counts = local ? std::vector<std::size_t>(k_ * k_, 0) : base_;
        const auto a = static_cast<std::size_t>(i0);
        const auto b = static_cast<std::size_t>(i1);
        for (std::size_t y = 0; y < k_; ++y) {
            counts[y * k_ + a] += left[y];
            counts[y * k_ + b] += right[y];
        }
        return evaluate(ctx_.measure, ContingencyTable(k_, k_, std::move(counts)));
    }

    const ScoringContext& ctx_;
    const LabeledDataset& d_;
    const LeafRows& leaf_;
    std::size_t leaf_index_;
    double bound_;
    std::size_t k_;
    std::vector<std::size_t> base_;
};

void validate(const ScoringContext& ctx) {
    if (!ctx.data) throw PreconditionError("scoring context has no dataset");
    const std::size_t k = ctx.data->n_classes();
    if (ctx.evaluation == Evaluation::Global) {
        if (ctx.measure == MeasureId::MinimalTreeSize)
            throw SpecError("measure 'mts' is only valid with local evaluation");
        if (ctx.confusion.size() != k * k) throw PreconditionError("global scoring needs a k x k confusion table");
    }
    if (ctx.measure == MeasureId::MinimalTreeSize && !ctx.oracle)
        throw PreconditionError("measure 'mts' needs an oracle");
}

SearchResult combine(std::span<const Incumbent> parts) {
    Incumbent all;
    for (const auto& p : parts) {
        all.evaluated += p.evaluated;
        if (p.best) all.offer(*p.best);
    }
    return {all.best, all.evaluated};
}

}  // namespace

SearchResult best_split(const ScoringContext& ctx, std::span<const LeafRows* const> leaves, Exec exec,
                        std::span<const double> bounds) {
    validate(ctx);
    if (!bounds.empty() && bounds.size() != leaves.size()) throw PreconditionError("one bound per leaf required");
    const std::size_t m = ctx.data->n_features();
    const std::size_t items = leaves.size() * m;
    std::vector<Incumbent> parts(items);
    // The oracle memo is not shared-write safe.
    const bool parallel = exec == Exec::Parallel && ctx.measure != MeasureId::MinimalTreeSize && items > 1;

    auto run_item = [&](std::size_t item) {
        const std::size_t li = item / m;
        const double bound = bounds.empty() ? std::numeric_limits<double>::infinity() : bounds[li];
        SweepScorer(ctx, *leaves[li], li, bound).run(item % m, parts[item]);
    };

    if (parallel) {
        const auto n = static_cast<std::ptrdiff_t>(items);
#pragma omp parallel for schedule(dynamic)
        for (std::ptrdiff_t item = 0; item < n; ++item) run_item(static_cast<std::size_t>(item));
    } else {
        for (std::size_t item = 0; item < items; ++item) run_item(item);
    }
    return combine(parts);
}

SearchResult best_split_reference(const ScoringContext& ctx, const DecisionTree& t,
                                  std::span<const std::size_t> universe, std::span<const std::size_t> leaf_ids,
                                  std::span<const double> bounds) {
    if (!ctx.data) throw PreconditionError("scoring context has no dataset");
    const LabeledDataset& d = *ctx.data;
    if (!bounds.empty() && bounds.size() != leaf_ids.size()) throw PreconditionError("one bound per leaf required");
    if (ctx.evaluation == Evaluation::Global && ctx.measure == MeasureId::MinimalTreeSize)
        throw SpecError("measure 'mts' is only valid with local evaluation");
    Incumbent inc;
    const auto k = static_cast<int>(d.n_classes());
    for (std::size_t li = 0; li < leaf_ids.size(); ++li) {
        const double bound = bounds.empty() ? std::numeric_limits<double>::infinity() : bounds[li];
        const RowIds rows = instances_at_leaf(t, d, universe, leaf_ids[li]);
        for (const auto& c : candidate_splits(d, rows)) {
            const auto [left, right] = split_rows(d, rows, c);
            const int l_major = majority_label(d, left);
            const int r_major = majority_label(d, right);
            auto consider = [&](int i0, int i1, double score) {
                ++inc.evaluated;
                if (score < bound - kScoreTolerance) inc.offer({li, c, i0, i1, score});
            };
            if (ctx.evaluation == Evaluation::Local) {
                consider(l_major, r_major, local_split_score(ctx.measure, d, rows, c, ctx.oracle));
            } else if (ctx.label_rule == LabelRule::Majority) {
                consider(l_major, r_major, global_split_score(ctx.measure, d, universe, t, leaf_ids[li], c, l_major, r_major));
            } else {
                for (int i0 = 0; i0 < k; ++i0)
                    for (int i1 = 0; i1 < k; ++i1)
                        consider(i0, i1, global_split_score(ctx.measure, d, universe, t, leaf_ids[li], c, i0, i1));
            }
        }
    }
    return {inc.best, inc.evaluated};
}

}  // namespace gdt
