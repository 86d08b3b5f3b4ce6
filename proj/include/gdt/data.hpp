#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

#include "gdt/clustering.hpp"
#include "gdt/tree.hpp"

namespace gdt {

struct SplitSpec {
    double test_fraction = 0.1;
    std::optional<std::size_t> train_size;  // whole remainder when unset
    std::uint64_t seed = 0;
};

struct RandomTreeSpec {
    std::size_t target_size = 1;  // odd
    std::size_t n_features = 1;
    std::size_t n_classes = 2;
    std::size_t n_samples = 1;
    std::uint64_t seed = 0;
};

/// Header row, numeric features, class label in the last column. Labels are
/// mapped to indices in order of first appearance.
LabeledDataset load_csv(const std::filesystem::path& path);
LabeledDataset parse_csv(std::istream& in);

/// Writes the format load_csv reads. Labels are written by class name when
/// the dataset has names, by index otherwise.
void save_csv(const LabeledDataset& d, const std::filesystem::path& path);
void write_csv(const LabeledDataset& d, std::ostream& out);

/// Sample i belongs to class i mod k; centers uniform in [-10, 10]^m.
LabeledDataset gen_blobs(std::size_t n_samples, std::size_t n_features, std::size_t n_classes, double stddev,
                         std::uint64_t seed);

struct GeneratedTree {
    DecisionTree tree;
    LabeledDataset data;
};

/// Random full binary tree over [0,1]^m plus uniform samples labeled by it.
GeneratedTree gen_random_tree(const RandomTreeSpec& spec);

/// floor(fraction * n) rows, chosen without replacement, get a uniformly
/// resampled label.
LabeledDataset inject_label_noise(const LabeledDataset& d, double fraction, std::uint64_t seed);

struct TrainTestSplit {
    RowIds train;  // ascending
    RowIds test;   // ascending
};

TrainTestSplit split_train_test(const LabeledDataset& d, const SplitSpec& spec);

}  // namespace gdt
