#include "gdt/measures.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

#include "gdt/errors.hpp"

namespace gdt {

namespace {

// -p log2 p for p = count / total, with 0 log 0 = 0.
double plogp(std::size_t count, double total) {
    if (count == 0) return 0.0;
    const double p = static_cast<double>(count) / total;
    return -p * std::log2(p);
}

double entropy_of_counts(std::span<const std::size_t> counts, std::size_t total) {
    if (total == 0) throw PreconditionError("entropy of an empty universe is undefined");
    const double n = static_cast<double>(total);
    double h = 0.0;
    for (std::size_t c : counts) h += plogp(c, n);
    return h;
}

void require_square(const ContingencyTable& t) {
    if (t.rows() != t.cols())
        throw PreconditionError("measure requires clusterings with equal part counts");
}

void require_nonempty(const ContingencyTable& t) {
    if (t.total() == 0) throw PreconditionError("measure undefined on an empty universe");
}

}  // namespace

Orientation orientation_of(MeasureId m) noexcept {
    switch (m) {
        case MeasureId::InformationGain:
        case MeasureId::GainRatio:
        case MeasureId::Accuracy:
            return Orientation::Similarity;
        default:
            return Orientation::Distance;
    }
}

bool is_permutation_invariant(MeasureId m) noexcept {
    switch (m) {
        case MeasureId::ExtendedJaccard:
        case MeasureId::InvertedAccuracy:
        case MeasureId::Accuracy:
            return false;
        default:
            return true;
    }
}

std::optional<MeasureId> parse_measure(std::string_view name) {
    std::string s(name);
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (s == "gain") return MeasureId::InformationGain;
    if (s == "gain-ratio") return MeasureId::GainRatio;
    if (s == "nvi") return MeasureId::NormalizedVI;
    if (s == "gini") return MeasureId::GiniImpurity;
    if (s == "jaccard") return MeasureId::ExtendedJaccard;
    if (s == "accuracy") return MeasureId::InvertedAccuracy;
    if (s == "mts") return MeasureId::MinimalTreeSize;
    return std::nullopt;
}

std::string measure_name(MeasureId m) {
    switch (m) {
        case MeasureId::InformationGain: return "gain";
        case MeasureId::GainRatio: return "gain-ratio";
        case MeasureId::NormalizedVI: return "nvi";
        case MeasureId::GiniImpurity: return "gini";
        case MeasureId::ExtendedJaccard: return "jaccard";
        case MeasureId::InvertedAccuracy: return "accuracy";
        case MeasureId::Entropy: return "entropy";
        case MeasureId::ConditionalEntropy: return "conditional-entropy";
        case MeasureId::VariationOfInformation: return "vi";
        case MeasureId::Accuracy: return "raw-accuracy";
        case MeasureId::MinimalTreeSize: return "mts";
    }
    return "unknown";
}

double entropy_rows(const ContingencyTable& t) { return entropy_of_counts(t.row_sums(), t.total()); }

double entropy_cols(const ContingencyTable& t) { return entropy_of_counts(t.col_sums(), t.total()); }

double joint_entropy(const ContingencyTable& t) { return entropy_of_counts(t.counts(), t.total()); }

double conditional_entropy(const ContingencyTable& t) {
    require_nonempty(t);
    const double n = static_cast<double>(t.total());
    double h = 0.0;
    for (std::size_t j = 0; j < t.cols(); ++j) {
        const std::size_t bj = t.col_sum(j);
        if (bj == 0) continue;
        for (std::size_t i = 0; i < t.rows(); ++i) {
            const std::size_t nij = t.at(i, j);
            if (nij == 0) continue;
            h -= (static_cast<double>(nij) / n) *
                 std::log2(static_cast<double>(nij) / static_cast<double>(bj));
        }
    }
    return std::max(0.0, h);
}

Score information_gain(const ContingencyTable& t) {
    const double gain = entropy_rows(t) - conditional_entropy(t);
    return {std::max(0.0, gain), Orientation::Similarity};
}

Score gain_ratio(const ContingencyTable& t) {
    const double hb = entropy_cols(t);
    if (hb <= 0.0) return {0.0, Orientation::Similarity};
    return {std::clamp(information_gain(t).value / hb, 0.0, 1.0), Orientation::Similarity};
}

double variation_of_information(const ContingencyTable& t) {
    return conditional_entropy(t) + conditional_entropy(t.transposed());
}

Score normalized_vi(const ContingencyTable& t) {
    const double joint = joint_entropy(t);
    if (joint <= 0.0) return {0.0, Orientation::Distance};
    return {std::clamp(variation_of_information(t) / joint, 0.0, 1.0), Orientation::Distance};
}

Score gini_impurity(const ContingencyTable& t) {
    require_nonempty(t);
    const double n = static_cast<double>(t.total());
    double g = 0.0;
    for (std::size_t j = 0; j < t.cols(); ++j) {
        const std::size_t bj = t.col_sum(j);
        if (bj == 0) continue;
        const double b = static_cast<double>(bj);
        double sq = 0.0;
        for (std::size_t i = 0; i < t.rows(); ++i) {
            const double p = static_cast<double>(t.at(i, j)) / b;
            sq += p * p;
        }
        g += (b / n) * (1.0 - sq);
    }
    return {std::clamp(g, 0.0, 1.0), Orientation::Distance};
}

Score extended_jaccard(const ContingencyTable& t) {
    require_square(t);
    require_nonempty(t);
    double similarity = 0.0;
    for (std::size_t i = 0; i < t.rows(); ++i) {
        const std::size_t inter = t.at(i, i);
        const std::size_t uni = t.row_sum(i) + t.col_sum(i) - inter;
        similarity += uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
    }
    return {std::max(0.0, static_cast<double>(t.rows()) - similarity), Orientation::Distance};
}

Score accuracy(const ContingencyTable& t) {
    require_square(t);
    require_nonempty(t);
    std::size_t agree = 0;
    for (std::size_t i = 0; i < t.rows(); ++i) agree += t.at(i, i);
    return {static_cast<double>(agree) / static_cast<double>(t.total()), Orientation::Similarity};
}

double evaluate(MeasureId m, const ContingencyTable& t) {
    switch (m) {
        case MeasureId::InformationGain: return information_gain(t).as_distance();
        case MeasureId::GainRatio: return gain_ratio(t).as_distance();
        case MeasureId::NormalizedVI: return normalized_vi(t).as_distance();
        case MeasureId::GiniImpurity: return gini_impurity(t).as_distance();
        case MeasureId::ExtendedJaccard: return extended_jaccard(t).as_distance();
        case MeasureId::InvertedAccuracy: return 1.0 - accuracy(t).value;
        case MeasureId::Entropy: return entropy_rows(t);
        case MeasureId::ConditionalEntropy: return conditional_entropy(t);
        case MeasureId::VariationOfInformation: return variation_of_information(t);
        case MeasureId::Accuracy: return accuracy(t).as_distance();
        case MeasureId::MinimalTreeSize: break;
    }
    throw PreconditionError("measure '" + measure_name(m) +
                            "' cannot be computed from a contingency table");
}

double entropy(const Clustering& a) {
    auto sizes = a.part_sizes();
    return entropy_of_counts(sizes, a.universe_size());
}

double conditional_entropy(const Clustering& a, const Clustering& b) {
    return conditional_entropy(contingency(a, b));
}

double kl_divergence(const Clustering& c, const Clustering& c2) {
    if (c.part_count() != c2.part_count())
        throw PreconditionError("KL divergence requires equal part counts");
    if (c.universe_size() == 0 || c2.universe_size() == 0)
        throw PreconditionError("KL divergence undefined on an empty universe");
    const auto p = c.part_sizes();
    const auto q = c2.part_sizes();
    const double np = static_cast<double>(c.universe_size());
    const double nq = static_cast<double>(c2.universe_size());
    double kl = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0) continue;
        if (q[i] == 0) return std::numeric_limits<double>::infinity();
        const double pi = static_cast<double>(p[i]) / np;
        kl += pi * std::log2(pi / (static_cast<double>(q[i]) / nq));
    }
    return std::max(0.0, kl);
}

Score information_gain(const Clustering& a, const Clustering& b) { return information_gain(contingency(a, b)); }
Score gain_ratio(const Clustering& a, const Clustering& b) { return gain_ratio(contingency(a, b)); }
double variation_of_information(const Clustering& a, const Clustering& b) {
    return variation_of_information(contingency(a, b));
}
Score normalized_vi(const Clustering& a, const Clustering& b) { return normalized_vi(contingency(a, b)); }
Score gini_impurity(const Clustering& a, const Clustering& b) { return gini_impurity(contingency(a, b)); }
Score extended_jaccard(const Clustering& a, const Clustering& b) {
    return extended_jaccard(contingency(a, b));
}
Score accuracy(const Clustering& a, const Clustering& b) { return accuracy(contingency(a, b)); }

double evaluate(MeasureId m, const Clustering& a, const Clustering& b) {
    return evaluate(m, contingency(a, b));
}

}  // namespace gdt
