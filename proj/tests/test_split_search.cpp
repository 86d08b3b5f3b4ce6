#include "doctest.h"

#include <random>

#include "gdt/errors.hpp"
#include "gdt/learner.hpp"
#include "gdt/oracle.hpp"
#include "gdt/split_search.hpp"
#include "support.hpp"

using namespace gdt;

namespace {

const MeasureId kTableMeasures[] = {MeasureId::InformationGain, MeasureId::GainRatio,       MeasureId::NormalizedVI,
                                    MeasureId::GiniImpurity,    MeasureId::ExtendedJaccard, MeasureId::InvertedAccuracy};

std::vector<double> thresholds(const std::vector<SplitCriterion>& cs) {
    std::vector<double> out;
    for (const auto& c : cs) out.push_back(c.threshold);
    return out;
}

// Small dataset with integer features so that ties and repeated values occur.
LabeledDataset random_grid_data(std::mt19937_64& rng, std::size_t n, std::size_t m, std::size_t k) {
    std::vector<double> x(n * m);
    for (double& v : x) v = static_cast<double>(rng() % 5);
    return LabeledDataset(x, m, test::random_labels(rng, n, k), k);
}

struct Snapshot {
    std::vector<LeafRows> leaves;
    std::vector<std::size_t> leaf_ids;
    std::vector<std::size_t> confusion;
};

Snapshot snapshot(const LabeledDataset& d, const DecisionTree& t, const RowIds& universe) {
    Snapshot s;
    const std::size_t k = d.n_classes();
    s.confusion.assign(k * k, 0);
    for (std::size_t id : t.leaf_ids()) {
        const auto rows = instances_at_leaf(t, d, universe, id);
        const int label = t.node(id).label;
        for (auto r : rows) ++s.confusion[static_cast<std::size_t>(d.label(r)) * k + static_cast<std::size_t>(label)];
        auto leaf = make_leaf_rows(d, rows, id, label);
        if (leaf.is_pure()) continue;
        s.leaves.push_back(std::move(leaf));
        s.leaf_ids.push_back(id);
    }
    return s;
}

void check_same(const SearchResult& a, const SearchResult& b) {
    CHECK(a.evaluated == b.evaluated);
    REQUIRE(a.best.has_value() == b.best.has_value());
    if (!a.best) return;
    CHECK(a.best->leaf == b.best->leaf);
    CHECK(a.best->criterion == b.best->criterion);
    CHECK(a.best->left_label == b.best->left_label);
    CHECK(a.best->right_label == b.best->right_label);
    CHECK(a.best->score == b.best->score);
}

}  // namespace

TEST_CASE("candidate thresholds are midpoints of distinct values") {
    const LabeledDataset d({1, 5, 2, 5, 3, 5}, 2, {0, 1, 0}, 2);
    const auto rows = d.all_rows();
    const auto cs = candidate_splits(d, rows);
    CHECK(thresholds(cs) == std::vector<double>{1.5, 2.5});
    for (const auto& c : cs) CHECK(c.feature == 0);
    CHECK(thresholds(candidate_splits(test::seven_points(), test::seven_points().all_rows())) ==
          std::vector<double>{1, 2, 3, 4, 5, 6});
}

TEST_CASE("majority label") {
    const LabeledDataset d({0, 0, 0, 0}, 1, {2, 2, 1, 2}, 3);
    CHECK(majority_label(d, std::vector<std::size_t>{0, 1, 2}) == 2);
    CHECK(majority_label(d, std::vector<std::size_t>{0, 1, 2, 3}) == 2);
    const LabeledDataset e({0, 0, 0}, 1, {0, 0, 1}, 2);
    CHECK(majority_label(e, std::vector<std::size_t>{0, 1, 2}) == 0);
    CHECK(majority_label(e, std::vector<std::size_t>{1, 2}) == 0);
    CHECK(majority_label(e, std::vector<std::size_t>{}, 1) == 1);
}

TEST_CASE("local scores on the seven-point line") {
    const auto d = test::seven_points();
    const auto rows = d.all_rows();
    // Conditional entropy of the truth given the split, by hand: 0.4636 at 3, 0.5572 at 1.
    const double gain3 = local_split_score(MeasureId::InformationGain, d, rows, {0, 3});
    const double gain1 = local_split_score(MeasureId::InformationGain, d, rows, {0, 1});
    CHECK(gain3 < gain1);
    const double h = 0.5916727785823275;  // H(1/7, 6/7)
    CHECK(-gain3 == doctest::Approx(h - 4.0 / 7.0 * 0.8112781244591328).epsilon(1e-12));
    CHECK(local_split_score(MeasureId::GiniImpurity, d, rows, {0, 3}) == doctest::Approx(0.2142857142857143));
    CHECK(local_split_score(MeasureId::GiniImpurity, d, rows, {0, 1}) == doctest::Approx(0.2380952380952381));
    // Every threshold predicts all-red: accuracy and Jaccard cannot tell them apart.
    for (double r : {1.0, 2.0, 3.0, 4.0, 5.0, 6.0}) {
        CHECK(local_split_score(MeasureId::InvertedAccuracy, d, rows, {0, r}) == doctest::Approx(1.0 / 7.0));
        CHECK(local_split_score(MeasureId::ExtendedJaccard, d, rows, {0, r}) ==
              doctest::Approx(local_split_score(MeasureId::ExtendedJaccard, d, rows, {0, 1})));
    }
    CHECK_THROWS_AS(local_split_score(MeasureId::GiniImpurity, d, rows, {0, 10}), PreconditionError);
}

TEST_CASE("a perfect split scores zero") {
    const LabeledDataset d({0, 1, 2, 3}, 1, {0, 0, 1, 1}, 2);
    const auto rows = d.all_rows();
    CHECK(local_split_score(MeasureId::GiniImpurity, d, rows, {0, 1.5}) == 0.0);
    const auto root = DecisionTree::leaf(0);
    CHECK(global_split_score(MeasureId::GiniImpurity, d, rows, root, 0, {0, 1.5}, 0, 1) == 0.0);
    CHECK(global_split_score(MeasureId::InvertedAccuracy, d, rows, root, 0, {0, 1.5}, 0, 1) == 0.0);
    CHECK(global_split_score(MeasureId::ExtendedJaccard, d, rows, root, 0, {0, 1.5}, 0, 1) == 0.0);
    CHECK_THROWS_AS(global_split_score(MeasureId::GiniImpurity, d, rows, root, 0, {0, 9}, 0, 1), PreconditionError);
}

TEST_CASE("local mts score") {
    const auto d = test::seven_points();
    const auto rows = d.all_rows();
    MtsOracle oracle(d, rows);
    CHECK(local_split_score(MeasureId::MinimalTreeSize, d, rows, {0, 3}, &oracle) == 4.0);
    CHECK(local_split_score(MeasureId::MinimalTreeSize, d, rows, {0, 1}, &oracle) == 6.0);
    const LabeledDataset halves({0, 1, 2, 3}, 1, {0, 0, 1, 1}, 2);
    CHECK(local_split_score(MeasureId::MinimalTreeSize, halves, halves.all_rows(), {0, 1.5}) == 2.0);
}

TEST_CASE("partition_leaf keeps every ordering") {
    std::mt19937_64 rng(21);
    const auto d = random_grid_data(rng, 30, 3, 3);
    const auto leaf = make_leaf_rows(d, d.all_rows(), 0, 0);
    const auto [l, r] = partition_leaf(d, leaf, {1, 2.5});
    CHECK(l.count() + r.count() == 30);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(l.by_feature[j] == make_leaf_rows(d, l.rows, 0, 0).by_feature[j]);
        CHECK(r.by_feature[j] == make_leaf_rows(d, r.rows, 0, 0).by_feature[j]);
    }
}

TEST_CASE("sweep kernel matches the brute-force reference, serial and parallel") {
    std::mt19937_64 rng(22);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t k = 2 + rng() % 2;
        const auto d = random_grid_data(rng, 6 + rng() % 25, 1 + rng() % 3, k);
        const auto universe = d.all_rows();
        LearnerConfig warm;
        warm.measure = MeasureId::GiniImpurity;
        warm.max_nodes = 1 + 2 * (rng() % 4);
        const auto tree = train(d, universe, warm).tree;
        const auto snap = snapshot(d, tree, universe);
        std::vector<const LeafRows*> leaves;
        for (const auto& l : snap.leaves) leaves.push_back(&l);

        for (MeasureId m : kTableMeasures) {
            for (Evaluation e : {Evaluation::Local, Evaluation::Global}) {
                for (LabelRule rule : {LabelRule::Majority, LabelRule::Exhaustive}) {
                    if (e == Evaluation::Local && rule == LabelRule::Exhaustive) continue;
                    ScoringContext ctx;
                    ctx.data = &d;
                    ctx.measure = m;
                    ctx.evaluation = e;
                    ctx.label_rule = rule;
                    ctx.confusion = snap.confusion;
                    const auto ref = best_split_reference(ctx, tree, universe, snap.leaf_ids);
                    check_same(best_split(ctx, leaves, Exec::Serial), ref);
                    check_same(best_split(ctx, leaves, Exec::Parallel), ref);
                }
            }
        }
    }
}

TEST_CASE("kernel bounds match the reference") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 40; ++trial) {
        const auto d = random_grid_data(rng, 10 + rng() % 15, 2, 2);
        const auto universe = d.all_rows();
        const auto tree = DecisionTree::leaf(majority_label(d, universe));
        const auto snap = snapshot(d, tree, universe);
        if (snap.leaves.empty()) continue;
        std::vector<const LeafRows*> leaves{&snap.leaves[0]};
        ScoringContext ctx;
        ctx.data = &d;
        ctx.measure = MeasureId::GiniImpurity;
        const double bound = std::uniform_real_distribution<double>(0.0, 0.5)(rng);
        const std::vector<double> bounds{bound};
        const auto ref = best_split_reference(ctx, tree, universe, snap.leaf_ids, bounds);
        check_same(best_split(ctx, leaves, Exec::Serial, bounds), ref);
        if (ref.best) CHECK(ref.best->score < bound);
    }
}

TEST_CASE("mts kernel matches the reference") {
    std::mt19937_64 rng(24);
    for (int trial = 0; trial < 20; ++trial) {
        const auto d = random_grid_data(rng, 6 + rng() % 6, 2, 2);
        const auto universe = d.all_rows();
        MtsOracle oracle(d, universe);
        const auto tree = DecisionTree::leaf(0);
        const auto snap = snapshot(d, tree, universe);
        if (snap.leaves.empty()) continue;
        std::vector<const LeafRows*> leaves{&snap.leaves[0]};
        ScoringContext ctx;
        ctx.data = &d;
        ctx.measure = MeasureId::MinimalTreeSize;
        ctx.oracle = &oracle;
        try {
            const auto ref = best_split_reference(ctx, tree, universe, snap.leaf_ids);
            check_same(best_split(ctx, leaves, Exec::Parallel), ref);
        } catch (const NoConsistentTreeError&) {
            // Contradictory duplicates: nothing to compare.
        }
    }
}

TEST_CASE("global mts is rejected") {
    const auto d = test::seven_points();
    ScoringContext ctx;
    ctx.data = &d;
    ctx.measure = MeasureId::MinimalTreeSize;
    ctx.evaluation = Evaluation::Global;
    std::vector<std::size_t> conf(4, 0);
    ctx.confusion = conf;
    CHECK_THROWS_AS(best_split(ctx, {}, Exec::Serial), SpecError);
}
