#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "gdt/clustering.hpp"

namespace gdt {

// Clustering comparison measures. A is the row clustering of a contingency
// table (k parts), B the column clustering (l parts). Logarithms are base 2
// with 0 log 0 = 0.

enum class MeasureId {
    InformationGain,
    GainRatio,
    NormalizedVI,
    GiniImpurity,
    ExtendedJaccard,
    InvertedAccuracy,
    // Building blocks, exposed so tests can drive them through evaluate().
    Entropy,
    ConditionalEntropy,
    VariationOfInformation,
    Accuracy,
    // Minimal remaining tree size; needs instance features, see oracle.hpp.
    MinimalTreeSize,
};

enum class Orientation { Distance, Similarity };

struct Score {
    double value = 0.0;
    Orientation orientation = Orientation::Distance;

    /// Value with similarities negated, so smaller is always better.
    double as_distance() const noexcept {
        return orientation == Orientation::Similarity ? -value : value;
    }
};

/// Values closer than this compare equal when picking an argmin.
inline constexpr double kScoreTolerance = 1e-12;

Orientation orientation_of(MeasureId m) noexcept;
/// True when relabeling the parts of either clustering leaves the value unchanged.
bool is_permutation_invariant(MeasureId m) noexcept;
/// gain, gain-ratio, nvi, gini, jaccard, accuracy, mts (case-insensitive).
std::optional<MeasureId> parse_measure(std::string_view name);
std::string measure_name(MeasureId m);

// Table forms.
double entropy_rows(const ContingencyTable& t);
double entropy_cols(const ContingencyTable& t);
/// H(A ∩ B).
double joint_entropy(const ContingencyTable& t);
/// H(A | B) = -sum_ij P(A_i ∩ B_j) log P(A_i | B_j).
double conditional_entropy(const ContingencyTable& t);
Score information_gain(const ContingencyTable& t);
Score gain_ratio(const ContingencyTable& t);
double variation_of_information(const ContingencyTable& t);
Score normalized_vi(const ContingencyTable& t);
Score gini_impurity(const ContingencyTable& t);
Score extended_jaccard(const ContingencyTable& t);
Score accuracy(const ContingencyTable& t);

/// Measure value with similarities negated (InvertedAccuracy is 1 - acc).
/// Throws PreconditionError for MinimalTreeSize.
double evaluate(MeasureId m, const ContingencyTable& t);

// Clustering forms; all require a shared universe.
double entropy(const Clustering& a);
double conditional_entropy(const Clustering& a, const Clustering& b);
/// Relative entropy of the part-size distributions of c (over X) and c2 (over Z).
/// Returns +infinity when c2 has an empty part where c has mass.
double kl_divergence(const Clustering& c, const Clustering& c2);
Score information_gain(const Clustering& a, const Clustering& b);
Score gain_ratio(const Clustering& a, const Clustering& b);
double variation_of_information(const Clustering& a, const Clustering& b);
Score normalized_vi(const Clustering& a, const Clustering& b);
Score gini_impurity(const Clustering& a, const Clustering& b);
Score extended_jaccard(const Clustering& a, const Clustering& b);
Score accuracy(const Clustering& a, const Clustering& b);
double evaluate(MeasureId m, const Clustering& a, const Clustering& b);

}  // namespace gdt
