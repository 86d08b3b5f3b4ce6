#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "gdt/clustering.hpp"

namespace gdt {

/// c(x) = [x_feature <= threshold]. Instances with c(x) = 1 go to the left
/// subtree, the rest to the right.
struct SplitCriterion {
    std::size_t feature = 0;
    double threshold = 0.0;

    bool operator()(std::span<const double> x) const { return x[feature] <= threshold; }
    friend bool operator==(const SplitCriterion&, const SplitCriterion&) = default;
};

/// Immutable binary decision tree stored in preorder. The left child of a
/// branch at id i is i + 1; node ids are preorder positions.
class DecisionTree {
public:
    struct Node {
        bool is_leaf = true;
        int label = 0;              // leaves
        SplitCriterion criterion;   // branches
        std::size_t right = 0;      // branches: id of the right child

        friend bool operator==(const Node&, const Node&) = default;
    };

    /// Leaf(0).
    DecisionTree();
    static DecisionTree leaf(int label);
    static DecisionTree branch(SplitCriterion c, const DecisionTree& left, const DecisionTree& right);

    std::size_t size() const noexcept { return nodes_.size(); }
    const Node& node(std::size_t id) const { return nodes_.at(id); }
    bool is_leaf(std::size_t id) const { return nodes_.at(id).is_leaf; }
    std::size_t left_child(std::size_t id) const { return id + 1; }
    std::size_t right_child(std::size_t id) const { return nodes_.at(id).right; }
    std::span<const Node> nodes() const noexcept { return nodes_; }

    /// Leaf ids in preorder.
    std::vector<std::size_t> leaf_ids() const;
    std::size_t branch_count() const;
    /// Subtree rooted at id, as a standalone tree.
    DecisionTree subtree(std::size_t id) const;

    /// Id of the leaf reached by x.
    std::size_t route(std::span<const double> x) const;

    friend bool operator==(const DecisionTree&, const DecisionTree&) = default;

private:
    std::vector<Node> nodes_;
    std::size_t max_feature_plus_one_ = 0;

    friend DecisionTree replace_subtree(const DecisionTree&, std::size_t, const DecisionTree&);
    void recompute_arity();
};

/// Class of the leaf reached by x. Throws PreconditionError if x is too short
/// for the features the tree tests.
int predict(const DecisionTree& t, std::span<const double> x);

std::size_t size(const DecisionTree& t);

/// Part i = universe rows predicted as class i; d.n_classes() parts.
Clustering induced_clustering(const DecisionTree& t, const LabeledDataset& d,
                              std::span<const std::size_t> universe);

/// Universe rows routed to leaf_id. Throws PreconditionError if it is a branch.
RowIds instances_at_leaf(const DecisionTree& t, const LabeledDataset& d,
                         std::span<const std::size_t> universe, std::size_t leaf_id);

/// Replaces the subtree rooted at id (leaf or branch).
DecisionTree replace_subtree(const DecisionTree& t, std::size_t id, const DecisionTree& replacement);

/// Replaces leaf leaf_id by `replacement`; ids are recomputed in preorder.
DecisionTree exchange(const DecisionTree& t, std::size_t leaf_id, const DecisionTree& replacement);

/// At most one distinct label among the rows routed to leaf_id.
bool is_pure(const DecisionTree& t, const LabeledDataset& d, std::span<const std::size_t> universe,
             std::size_t leaf_id);

/// Branch ids heading a collapsible pair of same-feature splits:
///   Branch([x_j<=r1], Leaf(i), Branch([x_j<=r2], Leaf(i), t))   -> threshold max(r1, r2)
///   Branch([x_j<=r1], Branch([x_j<=r2], t, Leaf(i)), Leaf(i))   -> threshold min(r1, r2)
std::vector<std::size_t> detect_redundant_splits(const DecisionTree& t);

/// Collapses detected patterns until none remain. Predictions are unchanged.
DecisionTree merge_redundant_splits(const DecisionTree& t);

/// Tree document: {"leaf": i} or
/// {"split": {"feature": j, "threshold": r}, "left": ..., "right": ...}.
/// Non-empty class_names are stored on the root as "classes".
std::string serialize(const DecisionTree& t, const std::vector<std::string>& class_names = {});

struct TreeDocument {
    DecisionTree tree;
    std::vector<std::string> class_names;
};

/// Throws ParseError on malformed documents.
TreeDocument deserialize_document(const std::string& text);
DecisionTree deserialize(const std::string& text);

void save_tree(const std::filesystem::path& path, const DecisionTree& t,
               const std::vector<std::string>& class_names = {});
TreeDocument load_tree(const std::filesystem::path& path);

}  // namespace gdt
