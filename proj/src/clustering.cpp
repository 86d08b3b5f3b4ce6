#include "gdt/clustering.hpp"

#include <cmath>
#include <numeric>

#include "gdt/errors.hpp"

namespace gdt {

LabeledDataset::LabeledDataset(std::vector<double> features, std::size_t n_features,
                               std::vector<int> labels, std::size_t n_classes,
                               std::vector<std::string> feature_names,
                               std::vector<std::string> class_names)
    : features_(std::move(features)),
      n_features_(n_features),
      labels_(std::move(labels)),
      n_classes_(n_classes),
      feature_names_(std::move(feature_names)),
      class_names_(std::move(class_names)) {
    if (n_classes_ == 0) throw PreconditionError("dataset needs at least one class");
    if (features_.size() != labels_.size() * n_features_)
        throw PreconditionError("feature matrix size does not match n x m");
    for (int y : labels_) {
        if (y < 0 || static_cast<std::size_t>(y) >= n_classes_)
            throw PreconditionError("invalid label " + std::to_string(y) + " for " +
                                    std::to_string(n_classes_) + " classes");
    }
    for (double v : features_) {
        if (!std::isfinite(v)) throw DataError("non-finite feature value");
    }
    if (!feature_names_.empty() && feature_names_.size() != n_features_)
        throw PreconditionError("feature name count does not match feature count");
    if (!class_names_.empty() && class_names_.size() != n_classes_)
        throw PreconditionError("class name count does not match class count");
}

LabeledDataset LabeledDataset::with_labels(std::vector<int> labels) const {
    return LabeledDataset(features_, n_features_, std::move(labels), n_classes_, feature_names_,
                          class_names_);
}

LabeledDataset LabeledDataset::subset(std::span<const std::size_t> rows) const {
    std::vector<double> features;
    features.reserve(rows.size() * n_features_);
    std::vector<int> labels;
    labels.reserve(rows.size());
    for (std::size_t r : rows) {
        if (r >= size()) throw PreconditionError("row id out of range");
        auto x = row(r);
        features.insert(features.end(), x.begin(), x.end());
        labels.push_back(labels_[r]);
    }
    return LabeledDataset(std::move(features), n_features_, std::move(labels), n_classes_,
                          feature_names_, class_names_);
}

RowIds LabeledDataset::all_rows() const {
    RowIds rows(size());
    std::iota(rows.begin(), rows.end(), std::size_t{0});
    return rows;
}

Clustering::Clustering(RowIds universe, std::vector<std::size_t> membership, std::size_t part_count)
    : universe_(std::move(universe)), membership_(std::move(membership)), part_count_(part_count) {
    if (universe_.size() != membership_.size())
        throw PreconditionError("membership size does not match universe size");
    for (std::size_t p : membership_) {
        if (p >= part_count_) throw PreconditionError("membership index exceeds part count");
    }
}

RowIds Clustering::part(std::size_t i) const {
    RowIds out;
    for (std::size_t p = 0; p < universe_.size(); ++p) {
        if (membership_[p] == i) out.push_back(universe_[p]);
    }
    return out;
}

std::vector<std::size_t> Clustering::part_sizes() const {
    std::vector<std::size_t> sizes(part_count_, 0);
    for (std::size_t p : membership_) ++sizes[p];
    return sizes;
}

bool Clustering::is_trivial() const {
    for (std::size_t s : part_sizes()) {
        if (s == universe_.size()) return true;
    }
    return false;
}

Clustering Clustering::permuted(std::span<const std::size_t> perm) const {
    if (perm.size() != part_count_) throw PreconditionError("permutation size mismatch");
    std::vector<std::size_t> m(membership_.size());
    for (std::size_t p = 0; p < m.size(); ++p) m[p] = perm[membership_[p]];
    return Clustering(universe_, std::move(m), part_count_);
}

ContingencyTable::ContingencyTable(std::size_t rows, std::size_t cols, std::vector<std::size_t> counts)
    : rows_(rows), cols_(cols), counts_(std::move(counts)), row_sums_(rows, 0), col_sums_(cols, 0) {
    if (counts_.size() != rows_ * cols_) throw PreconditionError("contingency shape mismatch");
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            std::size_t n = counts_[i * cols_ + j];
            row_sums_[i] += n;
            col_sums_[j] += n;
            total_ += n;
        }
    }
}

ContingencyTable ContingencyTable::transposed() const {
    std::vector<std::size_t> t(counts_.size());
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t[j * rows_ + i] = counts_[i * cols_ + j];
    return ContingencyTable(cols_, rows_, std::move(t));
}

Clustering clustering_from_labels(std::span<const int> labels, std::size_t k) {
    RowIds universe(labels.size());
    std::iota(universe.begin(), universe.end(), std::size_t{0});
    std::vector<std::size_t> membership(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= k)
            throw PreconditionError("invalid label " + std::to_string(labels[i]) + " for k=" +
                                    std::to_string(k));
        membership[i] = static_cast<std::size_t>(labels[i]);
    }
    return Clustering(std::move(universe), std::move(membership), k);
}

Clustering clustering_from_labels(const LabeledDataset& d, std::span<const std::size_t> rows) {
    std::vector<std::size_t> membership(rows.size());
    for (std::size_t p = 0; p < rows.size(); ++p) {
        membership[p] = static_cast<std::size_t>(d.label(rows[p]));
    }
    return Clustering(RowIds(rows.begin(), rows.end()), std::move(membership), d.n_classes());
}

namespace {

void require_shared_universe(const Clustering& a, const Clustering& b) {
    if (a.universe() != b.universe())
        throw PreconditionError("clusterings are defined over different instance universes");
}

}  // namespace

ContingencyTable contingency(const Clustering& a, const Clustering& b) {
    require_shared_universe(a, b);
    const std::size_t k = a.part_count();
    const std::size_t l = b.part_count();
    std::vector<std::size_t> counts(k * l, 0);
    auto ma = a.membership();
    auto mb = b.membership();
    for (std::size_t p = 0; p < ma.size(); ++p) ++counts[ma[p] * l + mb[p]];
    return ContingencyTable(k, l, std::move(counts));
}

Clustering meet(const Clustering& a, const Clustering& b) {
    require_shared_universe(a, b);
    const std::size_t l = b.part_count();
    auto ma = a.membership();
    auto mb = b.membership();
    std::vector<std::size_t> membership(ma.size());
    for (std::size_t p = 0; p < ma.size(); ++p) membership[p] = ma[p] * l + mb[p];
    return Clustering(a.universe(), std::move(membership), a.part_count() * l);
}

}  // namespace gdt
