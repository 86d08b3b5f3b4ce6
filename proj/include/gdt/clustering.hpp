#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gdt {

/// Row ids into one LabeledDataset.
using RowIds = std::vector<std::size_t>;

/// Feature matrix (row-major, n x m) plus class labels in [0, k).
class LabeledDataset {
public:
    LabeledDataset() = default;
    LabeledDataset(std::vector<double> features, std::size_t n_features, std::vector<int> labels,
                   std::size_t n_classes, std::vector<std::string> feature_names = {},
                   std::vector<std::string> class_names = {});

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t n_features() const noexcept { return n_features_; }
    std::size_t n_classes() const noexcept { return n_classes_; }

    std::span<const double> row(std::size_t i) const {
        return {features_.data() + i * n_features_, n_features_};
    }
    double value(std::size_t i, std::size_t j) const { return features_[i * n_features_ + j]; }
    int label(std::size_t i) const { return labels_[i]; }
    std::span<const int> labels() const noexcept { return labels_; }
    std::span<const double> features() const noexcept { return features_; }

    const std::vector<std::string>& feature_names() const noexcept { return feature_names_; }
    const std::vector<std::string>& class_names() const noexcept { return class_names_; }

    /// Copy with labels replaced; features and names are kept.
    LabeledDataset with_labels(std::vector<int> labels) const;
    /// Rows in the given order become rows 0..|rows|-1 of the result.
    LabeledDataset subset(std::span<const std::size_t> rows) const;

    RowIds all_rows() const;

private:
    std::vector<double> features_;
    std::size_t n_features_ = 0;
    std::vector<int> labels_;
    std::size_t n_classes_ = 1;
    std::vector<std::string> feature_names_;
    std::vector<std::string> class_names_;
};

/// Indexed partition of an instance universe into a fixed number of parts.
/// Empty parts are kept, so index alignment between clusterings is stable.
class Clustering {
public:
    /// `membership[p]` is the part of `universe[p]`.
    Clustering(RowIds universe, std::vector<std::size_t> membership, std::size_t part_count);

    std::size_t part_count() const noexcept { return part_count_; }
    std::size_t universe_size() const noexcept { return universe_.size(); }
    const RowIds& universe() const noexcept { return universe_; }
    std::span<const std::size_t> membership() const noexcept { return membership_; }

    /// Row ids of part i, ascending by position in the universe.
    RowIds part(std::size_t i) const;
    std::vector<std::size_t> part_sizes() const;
    /// True if some part holds the whole universe.
    bool is_trivial() const;

    /// Relabel parts: part i becomes part perm[i].
    Clustering permuted(std::span<const std::size_t> perm) const;

    friend bool operator==(const Clustering&, const Clustering&) = default;

private:
    RowIds universe_;
    std::vector<std::size_t> membership_;
    std::size_t part_count_;
};

/// Joint counts n_ij = |A_i ∩ B_j| of a k-part and an l-part clustering.
class ContingencyTable {
public:
    /// `counts` is row-major rows x cols.
    ContingencyTable(std::size_t rows, std::size_t cols, std::vector<std::size_t> counts);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t at(std::size_t i, std::size_t j) const { return counts_[i * cols_ + j]; }
    std::size_t row_sum(std::size_t i) const { return row_sums_[i]; }
    std::size_t col_sum(std::size_t j) const { return col_sums_[j]; }
    std::span<const std::size_t> row_sums() const noexcept { return row_sums_; }
    std::span<const std::size_t> col_sums() const noexcept { return col_sums_; }
    std::span<const std::size_t> counts() const noexcept { return counts_; }
    std::size_t total() const noexcept { return total_; }

    ContingencyTable transposed() const;

    friend bool operator==(const ContingencyTable&, const ContingencyTable&) = default;

private:
    std::size_t rows_;
    std::size_t cols_;
    std::vector<std::size_t> counts_;
    std::vector<std::size_t> row_sums_;
    std::vector<std::size_t> col_sums_;
    std::size_t total_ = 0;
};

/// Part i = {x : labels[x] == i}, over universe 0..n-1.
Clustering clustering_from_labels(std::span<const int> labels, std::size_t k);
/// Same, restricted to `rows` of the dataset.
Clustering clustering_from_labels(const LabeledDataset& d, std::span<const std::size_t> rows);

ContingencyTable contingency(const Clustering& a, const Clustering& b);

/// Parts A_i ∩ B_j in row-major order (index i * l + j).
Clustering meet(const Clustering& a, const Clustering& b);

}  // namespace gdt
