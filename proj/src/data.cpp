#include "gdt/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "gdt/errors.hpp"
#include "gdt/random.hpp"

namespace gdt {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        out.push_back(trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string format_real(double v) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

}  // namespace

LabeledDataset parse_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        for (auto f : split_fields(line)) header.emplace_back(f);
        break;
    }
    if (header.empty()) throw ParseError("empty file", line_no ? line_no : 1);
    if (header.size() < 2) throw ParseError("need at least one feature column and a label column", line_no);
    const std::size_t m = header.size() - 1;

    std::vector<double> features;
    std::vector<int> labels;
    std::vector<std::string> class_names;
    std::unordered_map<std::string, int> class_index;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_fields(line);
        if (fields.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(fields.size()),
                             line_no);
        }
        for (std::size_t j = 0; j < m; ++j) {
            const auto f = fields[j];
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v))
                throw ParseError("non-numeric value '" + std::string(f) + "' in column " + header[j], line_no);
            features.push_back(v);
        }
        const std::string name(fields[m]);
        if (name.empty()) throw ParseError("missing class label", line_no);
        auto [it, inserted] = class_index.try_emplace(name, static_cast<int>(class_names.size()));
        if (inserted) class_names.push_back(name);
        labels.push_back(it->second);
    }
    if (labels.empty()) throw ParseError("no data rows", line_no);
    std::vector<std::string> feature_names(header.begin(), header.end() - 1);
    const std::size_t k = class_names.size();
    return LabeledDataset(std::move(features), m, std::move(labels), k, std::move(feature_names),
                          std::move(class_names));
}

LabeledDataset load_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    return parse_csv(in);
}

void write_csv(const LabeledDataset& d, std::ostream& out) {
    for (std::size_t j = 0; j < d.n_features(); ++j) {
        out << (d.feature_names().empty() ? "x" + std::to_string(j) : d.feature_names()[j]) << ',';
    }
    out << "label\n";
    for (std::size_t i = 0; i < d.size(); ++i) {
        for (std::size_t j = 0; j < d.n_features(); ++j) out << format_real(d.value(i, j)) << ',';
        const int y = d.label(i);
        out << (d.class_names().empty() ? std::to_string(y) : d.class_names()[static_cast<std::size_t>(y)]) << '\n';
    }
}

void save_csv(const LabeledDataset& d, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    write_csv(d, out);
    if (!out) throw DataError("write failed: " + path.string());
}

namespace {

std::vector<std::string> index_names(std::size_t count, const char* prefix) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < count; ++i) names.push_back(prefix + std::to_string(i));
    return names;
}

}  // namespace

LabeledDataset gen_blobs(std::size_t n_samples, std::size_t n_features, std::size_t n_classes, double stddev,
                         std::uint64_t seed) {
    if (n_samples == 0 || n_features == 0 || n_classes == 0)
        throw SpecError("gen_blobs needs positive samples, features and classes");
    if (!(stddev >= 0.0) || !std::isfinite(stddev)) throw SpecError("gen_blobs needs a finite stddev >= 0");
    Rng rng(seed);
    std::uniform_real_distribution<double> center_dist(-10.0, 10.0);
    std::vector<double> centers(n_classes * n_features);
    for (double& c : centers) c = center_dist(rng);

    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<double> features(n_samples * n_features);
    std::vector<int> labels(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        const std::size_t y = i % n_classes;
        labels[i] = static_cast<int>(y);
        for (std::size_t j = 0; j < n_features; ++j) {
            features[i * n_features + j] = centers[y * n_features + j] + stddev * noise(rng);
        }
    }
    return LabeledDataset(std::move(features), n_features, std::move(labels), n_classes,
                          index_names(n_features, "x"), index_names(n_classes, ""));
}

namespace {

struct GrowNode {
    bool leaf = true;
    SplitCriterion criterion;
    std::size_t left = 0;
    std::size_t right = 0;
    std::vector<double> lo;
    std::vector<double> hi;
    int label = 0;
};

DecisionTree assemble(const std::vector<GrowNode>& nodes, std::size_t id) {
    const GrowNode& n = nodes[id];
    if (n.leaf) return DecisionTree::leaf(n.label);
    return DecisionTree::branch(n.criterion, assemble(nodes, n.left), assemble(nodes, n.right));
}

}  // namespace

GeneratedTree gen_random_tree(const RandomTreeSpec& spec) {
    if (spec.target_size % 2 == 0) throw SpecError("random tree size must be odd");
    if (spec.n_features == 0 || spec.n_classes == 0 || spec.n_samples == 0)
        throw SpecError("random tree needs positive features, classes and samples");
    if (spec.target_size > 1 && spec.n_classes < 2) throw SpecError("a tree with splits needs at least two classes");

    Rng rng(spec.seed);
    const std::size_t m = spec.n_features;
    std::vector<GrowNode> nodes(1);
    nodes[0].lo.assign(m, 0.0);
    nodes[0].hi.assign(m, 1.0);
    std::vector<std::size_t> leaves{0};
    std::uniform_int_distribution<std::size_t> pick_feature(0, m - 1);
    while (2 * leaves.size() - 1 < spec.target_size) {
        const std::size_t slot = std::uniform_int_distribution<std::size_t>(0, leaves.size() - 1)(rng);
        const std::size_t id = leaves[slot];
        const std::size_t f = pick_feature(rng);
        const double r = std::uniform_real_distribution<double>(nodes[id].lo[f], nodes[id].hi[f])(rng);
        GrowNode left, right;
        left.lo = right.lo = nodes[id].lo;
        left.hi = right.hi = nodes[id].hi;
        left.hi[f] = r;
        right.lo[f] = r;
        nodes[id].leaf = false;
        nodes[id].criterion = {f, r};
        nodes[id].left = nodes.size();
        nodes[id].right = nodes.size() + 1;
        nodes.push_back(std::move(left));
        nodes.push_back(std::move(right));
        leaves[slot] = nodes[id].left;
        leaves.push_back(nodes[id].right);
    }

    const int k = static_cast<int>(spec.n_classes);
    std::uniform_int_distribution<int> any_label(0, k - 1);
    for (GrowNode& n : nodes) {
        if (n.leaf) continue;
        GrowNode& l = nodes[n.left];
        GrowNode& r = nodes[n.right];
        if (l.leaf) l.label = any_label(rng);
        if (r.leaf) {
            if (l.leaf) {
                const int draw = std::uniform_int_distribution<int>(0, k - 2)(rng);
                r.label = draw >= l.label ? draw + 1 : draw;
            } else {
                r.label = any_label(rng);
            }
        }
    }
    if (nodes[0].leaf) nodes[0].label = any_label(rng);

    DecisionTree tree = assemble(nodes, 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<double> features(spec.n_samples * m);
    for (double& v : features) v = unit(rng);
    std::vector<int> labels(spec.n_samples);
    for (std::size_t i = 0; i < spec.n_samples; ++i) {
        labels[i] = predict(tree, std::span<const double>(features.data() + i * m, m));
    }
    return {std::move(tree), LabeledDataset(std::move(features), m, std::move(labels), spec.n_classes,
                                            index_names(m, "x"), index_names(spec.n_classes, ""))};
}

LabeledDataset inject_label_noise(const LabeledDataset& d, double fraction, std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw SpecError("noise fraction must lie in [0, 1]");
    const auto count = static_cast<std::size_t>(std::floor(fraction * static_cast<double>(d.size())));
    Rng rng(seed);
    RowIds order = d.all_rows();
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<int> labels(d.labels().begin(), d.labels().end());
    std::uniform_int_distribution<int> any_label(0, static_cast<int>(d.n_classes()) - 1);
    for (std::size_t i = 0; i < count; ++i) labels[order[i]] = any_label(rng);
    return d.with_labels(std::move(labels));
}

TrainTestSplit split_train_test(const LabeledDataset& d, const SplitSpec& spec) {
    if (!(spec.test_fraction >= 0.0 && spec.test_fraction < 1.0))
        throw SpecError("test fraction must lie in [0, 1)");
    const std::size_t n = d.size();
    const auto n_test = static_cast<std::size_t>(std::floor(spec.test_fraction * static_cast<double>(n)));
    const std::size_t remainder = n - n_test;
    const std::size_t n_train = spec.train_size.value_or(remainder);
    if (n_train > remainder) {
        throw SpecError("train size " + std::to_string(n_train) + " exceeds the " + std::to_string(remainder) +
                        " rows left after the test split");
    }
    Rng rng(spec.seed);
    RowIds order = d.all_rows();
    std::shuffle(order.begin(), order.end(), rng);
    TrainTestSplit out;
    out.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    out.train.assign(order.begin() + static_cast<std::ptrdiff_t>(n_test),
                     order.begin() + static_cast<std::ptrdiff_t>(n_test + n_train));
    std::sort(out.test.begin(), out.test.end());
    std::sort(out.train.begin(), out.train.end());
    return out;
}

}  // namespace gdt
