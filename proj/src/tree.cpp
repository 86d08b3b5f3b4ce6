#include "gdt/tree.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gdt/errors.hpp"

namespace gdt {

using nlohmann::json;

DecisionTree::DecisionTree() : nodes_{Node{}} {}

DecisionTree DecisionTree::leaf(int label) {
    DecisionTree t;
    t.nodes_[0].label = label;
    return t;
}

DecisionTree DecisionTree::branch(SplitCriterion c, const DecisionTree& left, const DecisionTree& right) {
    DecisionTree t;
    t.nodes_.clear();
    t.nodes_.reserve(1 + left.size() + right.size());
    Node root;
    root.is_leaf = false;
    root.criterion = c;
    root.right = 1 + left.size();
    t.nodes_.push_back(root);
    for (Node n : left.nodes_) {
        if (!n.is_leaf) n.right += 1;
        t.nodes_.push_back(n);
    }
    for (Node n : right.nodes_) {
        if (!n.is_leaf) n.right += root.right;
        t.nodes_.push_back(n);
    }
    t.recompute_arity();
    return t;
}

void DecisionTree::recompute_arity() {
    max_feature_plus_one_ = 0;
    for (const Node& n : nodes_) {
        if (!n.is_leaf) max_feature_plus_one_ = std::max(max_feature_plus_one_, n.criterion.feature + 1);
    }
}

std::vector<std::size_t> DecisionTree::leaf_ids() const {
    std::vector<std::size_t> ids;
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        if (nodes_[i].is_leaf) ids.push_back(i);
    }
    return ids;
}

std::size_t DecisionTree::branch_count() const {
    return static_cast<std::size_t>(
        std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return !n.is_leaf; }));
}

namespace {

// One past the last id of the subtree rooted at id.
std::size_t subtree_end(const DecisionTree& t, std::size_t id) {
    std::size_t open = 1;
    std::size_t i = id;
    while (open > 0) {
        open += t.is_leaf(i) ? -1 : 1;
        ++i;
    }
    return i;
}

}  // namespace

DecisionTree DecisionTree::subtree(std::size_t id) const {
    if (id >= nodes_.size()) throw PreconditionError("node id out of range");
    const std::size_t end = subtree_end(*this, id);
    DecisionTree t;
    t.nodes_.assign(nodes_.begin() + static_cast<std::ptrdiff_t>(id),
                    nodes_.begin() + static_cast<std::ptrdiff_t>(end));
    for (Node& n : t.nodes_) {
        if (!n.is_leaf) n.right -= id;
    }
    t.recompute_arity();
    return t;
}

std::size_t DecisionTree::route(std::span<const double> x) const {
    if (x.size() < max_feature_plus_one_)
        throw PreconditionError("instance has " + std::to_string(x.size()) +
                                " features; tree tests feature " +
                                std::to_string(max_feature_plus_one_ - 1));
    std::size_t i = 0;
    while (!nodes_[i].is_leaf) {
        i = nodes_[i].criterion(x) ? i + 1 : nodes_[i].right;
    }
    return i;
}

int predict(const DecisionTree& t, std::span<const double> x) { return t.node(t.route(x)).label; }

std::size_t size(const DecisionTree& t) { return t.size(); }

Clustering induced_clustering(const DecisionTree& t, const LabeledDataset& d,
                              std::span<const std::size_t> universe) {
    std::vector<std::size_t> membership(universe.size());
    for (std::size_t p = 0; p < universe.size(); ++p) {
        const int label = predict(t, d.row(universe[p]));
        if (label < 0 || static_cast<std::size_t>(label) >= d.n_classes())
            throw PreconditionError("tree predicts a class outside the dataset's classes");
        membership[p] = static_cast<std::size_t>(label);
    }
    return Clustering(RowIds(universe.begin(), universe.end()), std::move(membership), d.n_classes());
}

namespace {

void require_leaf(const DecisionTree& t, std::size_t id) {
    if (id >= t.size()) throw PreconditionError("node id out of range");
    if (!t.is_leaf(id)) throw PreconditionError("node " + std::to_string(id) + " is a branch, not a leaf");
}

}  // namespace

RowIds instances_at_leaf(const DecisionTree& t, const LabeledDataset& d,
                         std::span<const std::size_t> universe, std::size_t leaf_id) {
    require_leaf(t, leaf_id);
    RowIds out;
    for (std::size_t r : universe) {
        if (t.route(d.row(r)) == leaf_id) out.push_back(r);
    }
    return out;
}

DecisionTree replace_subtree(const DecisionTree& t, std::size_t id, const DecisionTree& replacement) {
    if (id >= t.size()) throw PreconditionError("node id out of range");
    const std::size_t end = subtree_end(t, id);
    const std::ptrdiff_t shift =
        static_cast<std::ptrdiff_t>(replacement.size()) - static_cast<std::ptrdiff_t>(end - id);
    DecisionTree out;
    out.nodes_.clear();
    out.nodes_.reserve(static_cast<std::size_t>(static_cast<std::ptrdiff_t>(t.size()) + shift));
    for (std::size_t i = 0; i < id; ++i) {
        DecisionTree::Node n = t.nodes_[i];
        // Ancestors of id whose right subtree starts after the replaced range.
        if (!n.is_leaf && n.right >= end) n.right = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(n.right) + shift);
        out.nodes_.push_back(n);
    }
    for (DecisionTree::Node n : replacement.nodes_) {
        if (!n.is_leaf) n.right += id;
        out.nodes_.push_back(n);
    }
    for (std::size_t i = end; i < t.size(); ++i) {
        DecisionTree::Node n = t.nodes_[i];
        if (!n.is_leaf) n.right = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(n.right) + shift);
        out.nodes_.push_back(n);
    }
    out.recompute_arity();
    return out;
}

DecisionTree exchange(const DecisionTree& t, std::size_t leaf_id, const DecisionTree& replacement) {
    require_leaf(t, leaf_id);
    return replace_subtree(t, leaf_id, replacement);
}

bool is_pure(const DecisionTree& t, const LabeledDataset& d, std::span<const std::size_t> universe,
             std::size_t leaf_id) {
    auto rows = instances_at_leaf(t, d, universe, leaf_id);
    for (std::size_t r : rows) {
        if (d.label(r) != d.label(rows.front())) return false;
    }
    return true;
}

namespace {

enum class Pattern { None, LeafFirst, LeafLast };

Pattern match_redundant(const DecisionTree& t, std::size_t b) {
    if (t.is_leaf(b)) return Pattern::None;
    const auto& outer = t.node(b).criterion;
    const std::size_t l = t.left_child(b);
    const std::size_t r = t.right_child(b);
    // Branch(c1, Leaf(i), Branch(c2, Leaf(i), t'))
    if (t.is_leaf(l) && !t.is_leaf(r) && t.node(r).criterion.feature == outer.feature) {
        const std::size_t rl = t.left_child(r);
        if (t.is_leaf(rl) && t.node(rl).label == t.node(l).label) return Pattern::LeafFirst;
    }
    // Branch(c1, Branch(c2, t', Leaf(i)), Leaf(i))
    if (t.is_leaf(r) && !t.is_leaf(l) && t.node(l).criterion.feature == outer.feature) {
        const std::size_t lr = t.right_child(l);
        if (t.is_leaf(lr) && t.node(lr).label == t.node(r).label) return Pattern::LeafLast;
    }
    return Pattern::None;
}

}  // namespace

std::vector<std::size_t> detect_redundant_splits(const DecisionTree& t) {
    std::vector<std::size_t> ids;
    for (std::size_t b = 0; b < t.size(); ++b) {
        if (match_redundant(t, b) != Pattern::None) ids.push_back(b);
    }
    return ids;
}

DecisionTree merge_redundant_splits(const DecisionTree& t) {
    DecisionTree current = t;
    for (;;) {
        auto found = detect_redundant_splits(current);
        if (found.empty()) return current;
        const std::size_t b = found.front();
        const SplitCriterion c1 = current.node(b).criterion;
        DecisionTree merged;
        if (match_redundant(current, b) == Pattern::LeafFirst) {
            const std::size_t inner = current.right_child(b);
            const SplitCriterion c2 = current.node(inner).criterion;
            merged = DecisionTree::branch({c1.feature, std::max(c1.threshold, c2.threshold)},
                                          current.subtree(current.left_child(b)),
                                          current.subtree(current.right_child(inner)));
        } else {
            const std::size_t inner = current.left_child(b);
            const SplitCriterion c2 = current.node(inner).criterion;
            merged = DecisionTree::branch({c1.feature, std::min(c1.threshold, c2.threshold)},
                                          current.subtree(current.left_child(inner)),
                                          current.subtree(current.right_child(b)));
        }
        current = replace_subtree(current, b, merged);
    }
}

namespace {

json node_to_json(const DecisionTree& t, std::size_t id) {
    const auto& n = t.node(id);
    if (n.is_leaf) return json{{"leaf", n.label}};
    json j;
    j["split"] = json{{"feature", n.criterion.feature}, {"threshold", n.criterion.threshold}};
    j["left"] = node_to_json(t, t.left_child(id));
    j["right"] = node_to_json(t, t.right_child(id));
    return j;
}

[[noreturn]] void structure_error(const std::string& where, const std::string& what) {
    throw ParseError("tree document at '" + (where.empty() ? std::string("/") : where) + "': " + what, 0);
}

DecisionTree node_from_json(const json& j, const std::string& where) {
    if (!j.is_object()) structure_error(where, "expected an object");
    if (j.contains("leaf")) {
        const auto& v = j.at("leaf");
        if (!v.is_number_integer() || v.get<long long>() < 0) structure_error(where + "/leaf", "expected a class index");
        return DecisionTree::leaf(v.get<int>());
    }
    if (!j.contains("split") || !j.contains("left") || !j.contains("right"))
        structure_error(where, "expected \"leaf\" or \"split\"/\"left\"/\"right\"");
    const auto& s = j.at("split");
    if (!s.is_object() || !s.contains("feature") || !s.contains("threshold"))
        structure_error(where + "/split", "expected \"feature\" and \"threshold\"");
    if (!s.at("feature").is_number_unsigned()) structure_error(where + "/split/feature", "expected a feature index");
    if (!s.at("threshold").is_number()) structure_error(where + "/split/threshold", "expected a number");
    SplitCriterion c{s.at("feature").get<std::size_t>(), s.at("threshold").get<double>()};
    return DecisionTree::branch(c, node_from_json(j.at("left"), where + "/left"),
                                node_from_json(j.at("right"), where + "/right"));
}

std::size_t line_of(const std::string& text, std::size_t byte) {
    byte = std::min(byte, text.size());
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

std::string serialize(const DecisionTree& t, const std::vector<std::string>& class_names) {
    json j = node_to_json(t, 0);
    if (!class_names.empty()) j["classes"] = class_names;
    return j.dump();
}

TreeDocument deserialize_document(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what(), line_of(text, e.byte == 0 ? 0 : e.byte - 1));
    }
    TreeDocument doc{node_from_json(j, ""), {}};
    if (j.is_object() && j.contains("classes")) {
        if (!j.at("classes").is_array()) structure_error("/classes", "expected an array of names");
        for (const auto& name : j.at("classes")) {
            if (!name.is_string()) structure_error("/classes", "expected an array of names");
            doc.class_names.push_back(name.get<std::string>());
        }
    }
    return doc;
}

DecisionTree deserialize(const std::string& text) { return deserialize_document(text).tree; }

void save_tree(const std::filesystem::path& path, const DecisionTree& t,
               const std::vector<std::string>& class_names) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << serialize(t, class_names) << '\n';
    if (!out) throw DataError("write failed: " + path.string());
}

TreeDocument load_tree(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return deserialize_document(ss.str());
}

}  // namespace gdt
