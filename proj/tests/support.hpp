#pragma once

// Small generators and builders shared by the test files.

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

#include "gdt/clustering.hpp"
#include "gdt/tree.hpp"

namespace gdt::test {

inline std::vector<int> random_labels(std::mt19937_64& rng, std::size_t n, std::size_t k) {
    std::uniform_int_distribution<int> pick(0, static_cast<int>(k) - 1);
    std::vector<int> out(n);
    for (int& v : out) v = pick(rng);
    return out;
}

inline Clustering random_clustering(std::mt19937_64& rng, std::size_t n, std::size_t k) {
    const auto labels = random_labels(rng, n, k);
    return clustering_from_labels(labels, k);
}

inline LabeledDataset line_dataset(const std::vector<double>& x, const std::vector<int>& y, std::size_t k) {
    return LabeledDataset(x, 1, y, k);
}

/// Seven points at 0.5 .. 6.5, class 1 only at 3.5.
inline LabeledDataset seven_points() {
    return line_dataset({0.5, 1.5, 2.5, 3.5, 4.5, 5.5, 6.5}, {0, 0, 0, 1, 0, 0, 0}, 2);
}

/// Random full binary tree with `branches` splits over `m` features; thresholds
/// are drawn from a small integer grid so that repeated features are common.
inline DecisionTree random_tree(std::mt19937_64& rng, std::size_t branches, std::size_t m, int k) {
    if (branches == 0) return DecisionTree::leaf(std::uniform_int_distribution<int>(0, k - 1)(rng));
    const std::size_t left = std::uniform_int_distribution<std::size_t>(0, branches - 1)(rng);
    const SplitCriterion c{std::uniform_int_distribution<std::size_t>(0, m - 1)(rng),
                           static_cast<double>(std::uniform_int_distribution<int>(0, 6)(rng))};
    return DecisionTree::branch(c, random_tree(rng, left, m, k), random_tree(rng, branches - 1 - left, m, k));
}

/// One probe per threshold cell of every feature: each threshold, and points
/// just around it and beyond the extremes.
inline std::vector<std::vector<double>> cell_probes(const std::vector<DecisionTree>& trees, std::size_t m) {
    std::vector<std::vector<double>> axis(m);
    for (const auto& t : trees) {
        for (const auto& node : t.nodes()) {
            if (node.is_leaf) continue;
            const double r = node.criterion.threshold;
            axis[node.criterion.feature].insert(axis[node.criterion.feature].end(), {r - 0.5, r, r + 0.5});
        }
    }
    for (auto& a : axis) a.push_back(-100.0);
    std::vector<std::vector<double>> points{{}};
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<std::vector<double>> next;
        for (const auto& p : points) {
            for (double v : axis[j]) {
                auto q = p;
                q.push_back(v);
                next.push_back(std::move(q));
            }
        }
        points = std::move(next);
    }
    return points;
}

}  // namespace gdt::test
