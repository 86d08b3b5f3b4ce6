#include "gdt/learner.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>

#include "gdt/errors.hpp"

namespace gdt {

namespace {

std::string lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

}  // namespace

std::optional<Mode> parse_mode(std::string_view name) {
    const auto s = lower(name);
    if (s == "local") return Mode::Local;
    if (s == "global") return Mode::Global;
    if (s == "glocal") return Mode::Glocal;
    return std::nullopt;
}

std::string mode_name(Mode m) {
    switch (m) {
        case Mode::Local: return "local";
        case Mode::Global: return "global";
        case Mode::Glocal: return "glocal";
    }
    return "unknown";
}

std::optional<LabelRule> parse_label_rule(std::string_view name) {
    const auto s = lower(name);
    if (s == "majority") return LabelRule::Majority;
    if (s == "exhaustive") return LabelRule::Exhaustive;
    return std::nullopt;
}

std::string label_rule_name(LabelRule r) { return r == LabelRule::Majority ? "majority" : "exhaustive"; }

std::string stop_reason_name(StopReason r) {
    switch (r) {
        case StopReason::AllLeavesPure: return "all-leaves-pure";
        case StopReason::NoValidSplit: return "no-valid-split";
        case StopReason::MaxNodes: return "max-nodes";
        case StopReason::NoDecay: return "no-decay";
    }
    return "unknown";
}

Guard apply_pruning_guards(const LearnerConfig& cfg, const DecisionTree& t, const StepProposal& p) {
    if (cfg.max_nodes && t.size() + 2 > *cfg.max_nodes) return Guard::Stop;
    if (cfg.min_branch_instances && p.leaf_instances < *cfg.min_branch_instances) return Guard::Stop;
    if (cfg.stop_on_no_decay && !(p.score < p.current_score - kScoreTolerance)) return Guard::Stop;
    return Guard::Allow;
}

namespace {

class Learner {
public:
    Learner(const LabeledDataset& d, std::span<const std::size_t> universe, const LearnerConfig& cfg)
        : d_(d), universe_(universe.begin(), universe.end()), cfg_(cfg), k_(d.n_classes()) {
        if (universe_.empty()) throw PreconditionError("cannot train on an empty universe");
        if (cfg_.measure == MeasureId::MinimalTreeSize) {
            if (cfg_.mode != Mode::Local) throw SpecError("measure 'mts' is only valid with mode=local");
            oracle_.emplace(d_, universe_, cfg_.oracle_budget);
        } else {
            // Rejects building-block ids early.
            evaluate(cfg_.measure, ContingencyTable(1, 1, {1}));
        }
        const int root = majority_label(d_, universe_);
        tree_ = DecisionTree::leaf(root);
        leaves_.push_back(make_leaf_rows(d_, universe_, 0, root));
        local_cache_.emplace_back();
        confusion_.assign(k_ * k_, 0);
        for (std::size_t y = 0; y < k_; ++y) confusion_[y * k_ + static_cast<std::size_t>(root)] = leaves_[0].class_counts[y];
        trace_.initial_label = root;
        trace_.initial_distance = current_distance();
        trace_.initial_accuracy = train_accuracy();
    }

    TrainResult run() {
        for (;;) {
            std::vector<std::size_t> eligible;
            bool any_impure = false;
            for (std::size_t i = 0; i < leaves_.size(); ++i) {
                if (leaves_[i].is_pure()) continue;
                any_impure = true;
                if (cfg_.min_branch_instances && leaves_[i].count() < *cfg_.min_branch_instances) continue;
                eligible.push_back(i);
            }
            if (eligible.empty()) return finish(any_impure ? StopReason::NoValidSplit : StopReason::AllLeavesPure);
            if (cfg_.max_nodes && tree_.size() + 2 > *cfg_.max_nodes) return finish(StopReason::MaxNodes);

            const double before = current_distance();
            std::optional<Chosen> chosen;
            bool any_valid = false;
            switch (cfg_.mode) {
                case Mode::Local:
                    chosen = best_local(eligible, any_valid);
                    break;
                case Mode::Global:
                    chosen = best_global(eligible, any_valid);
                    break;
                case Mode::Glocal: {
                    chosen = best_global(eligible, any_valid);
                    if (!chosen || !(chosen->candidate.score < before - kScoreTolerance)) {
                        bool local_valid = false;
                        chosen = best_local(eligible, local_valid);
                        any_valid = any_valid || local_valid;
                    }
                    break;
                }
            }
            if (!chosen) {
                return finish(any_valid && cfg_.stop_on_no_decay ? StopReason::NoDecay : StopReason::NoValidSplit);
            }

            StepProposal proposal{leaves_[chosen->leaf].count(), chosen->candidate.score, before};
            if (chosen->policy == StepPolicy::Local) {
                proposal.current_score = leaf_bound(leaves_[chosen->leaf]);
                if (cfg_.mode == Mode::Glocal) {
                    // Decay is judged on the whole tree in glocal mode.
                    proposal.score = distance_after(leaves_[chosen->leaf], chosen->candidate);
                    proposal.current_score = before;
                }
            }
            if (apply_pruning_guards(cfg_, tree_, proposal) == Guard::Stop) {
                return finish(cfg_.max_nodes && tree_.size() + 2 > *cfg_.max_nodes ? StopReason::MaxNodes
                                                                                    : StopReason::NoDecay);
            }
            apply(*chosen, before);
        }
    }

private:
    struct Chosen {
        std::size_t leaf = 0;  // index into leaves_
        SplitCandidate candidate;
        StepPolicy policy = StepPolicy::Local;
    };

    ScoringContext context(Evaluation e) {
        ScoringContext ctx;
        ctx.data = &d_;
        ctx.measure = cfg_.measure;
        ctx.evaluation = e;
        ctx.label_rule = cfg_.global_label_rule;
        ctx.confusion = confusion_;
        ctx.oracle = oracle_ ? &*oracle_ : nullptr;
        return ctx;
    }

    double current_distance() {
        if (cfg_.measure != MeasureId::MinimalTreeSize)
            return evaluate(cfg_.measure, ContingencyTable(k_, k_, confusion_));
        // Σ_i mts(T_i ∩ Y) over the predicted classes.
        double total = 0.0;
        for (std::size_t label = 0; label < k_; ++label) {
            RowIds rows;
            for (const auto& leaf : leaves_) {
                if (static_cast<std::size_t>(leaf.label) == label) rows.insert(rows.end(), leaf.rows.begin(), leaf.rows.end());
            }
            if (!rows.empty()) total += static_cast<double>(oracle_->mts(rows));
        }
        return total;
    }

    double train_accuracy() const {
        std::size_t agree = 0;
        for (std::size_t y = 0; y < k_; ++y) agree += confusion_[y * k_ + y];
        return static_cast<double>(agree) / static_cast<double>(universe_.size());
    }

    // Leaf-restricted distance of the unsplit leaf.
    double leaf_bound(const LeafRows& leaf) {
        if (cfg_.measure == MeasureId::MinimalTreeSize) return static_cast<double>(oracle_->mts(leaf.rows));
        if (is_permutation_invariant(cfg_.measure))
            return evaluate(cfg_.measure, ContingencyTable(k_, 1, leaf.class_counts));
        std::vector<std::size_t> counts(k_ * k_, 0);
        for (std::size_t y = 0; y < k_; ++y) counts[y * k_ + static_cast<std::size_t>(leaf.label)] = leaf.class_counts[y];
        return evaluate(cfg_.measure, ContingencyTable(k_, k_, std::move(counts)));
    }

    double distance_after(const LeafRows& leaf, const SplitCandidate& c) {
        auto [left, right] = partition_leaf(d_, leaf, c.criterion);
        std::vector<std::size_t> counts = confusion_;
        for (std::size_t y = 0; y < k_; ++y) {
            counts[y * k_ + static_cast<std::size_t>(leaf.label)] -= leaf.class_counts[y];
            counts[y * k_ + static_cast<std::size_t>(c.left_label)] += left.class_counts[y];
            counts[y * k_ + static_cast<std::size_t>(c.right_label)] += right.class_counts[y];
        }
        return evaluate(cfg_.measure, ContingencyTable(k_, k_, std::move(counts)));
    }

    std::optional<Chosen> best_local(std::span<const std::size_t> eligible, bool& any_valid) {
        const ScoringContext ctx = context(Evaluation::Local);
        std::optional<Chosen> best;
        for (std::size_t i : eligible) {
            auto& cached = local_cache_[i];
            if (!cached) {
                const LeafRows* leaf = &leaves_[i];
                const double bound = cfg_.stop_on_no_decay ? leaf_bound(*leaf) : std::numeric_limits<double>::infinity();
                cached = best_split(ctx, std::span(&leaf, 1), cfg_.exec, std::span(&bound, 1));
            }
            any_valid = any_valid || cached->evaluated > 0;
            if (!cached->best) continue;
            if (!best || cached->best->score < best->candidate.score - kScoreTolerance)
                best = Chosen{i, *cached->best, StepPolicy::Local};
        }
        return best;
    }

    std::optional<Chosen> best_global(std::span<const std::size_t> eligible, bool& any_valid) {
        std::vector<const LeafRows*> leaves;
        leaves.reserve(eligible.size());
        for (std::size_t i : eligible) leaves.push_back(&leaves_[i]);
        const SearchResult r = best_split(context(Evaluation::Global), leaves, cfg_.exec);
        any_valid = any_valid || r.evaluated > 0;
        if (!r.best) return std::nullopt;
        return Chosen{eligible[r.best->leaf], *r.best, StepPolicy::Global};
    }

    void apply(const Chosen& chosen, double before) {
        const SplitCandidate& c = chosen.candidate;
        const std::size_t li = chosen.leaf;
        const LeafRows& leaf = leaves_[li];
        const std::size_t v = leaf.node_id;
        auto [left, right] = partition_leaf(d_, leaf, c.criterion);
        left.node_id = v + 1;
        left.label = c.left_label;
        right.node_id = v + 2;
        right.label = c.right_label;
        for (std::size_t y = 0; y < k_; ++y) {
            confusion_[y * k_ + static_cast<std::size_t>(leaf.label)] -= leaf.class_counts[y];
            confusion_[y * k_ + static_cast<std::size_t>(c.left_label)] += left.class_counts[y];
            confusion_[y * k_ + static_cast<std::size_t>(c.right_label)] += right.class_counts[y];
        }
        tree_ = exchange(tree_, v,
                         DecisionTree::branch(c.criterion, DecisionTree::leaf(c.left_label),
                                              DecisionTree::leaf(c.right_label)));
        for (std::size_t i = li + 1; i < leaves_.size(); ++i) leaves_[i].node_id += 2;
        leaves_[li] = std::move(left);
        leaves_.insert(leaves_.begin() + static_cast<std::ptrdiff_t>(li) + 1, std::move(right));
        local_cache_[li].reset();
        local_cache_.insert(local_cache_.begin() + static_cast<std::ptrdiff_t>(li) + 1, std::nullopt);

        ++steps_;
        if (cfg_.record_trace) {
            TraceStep s;
            s.step = steps_ - 1;
            s.leaf_id = v;
            s.criterion = c.criterion;
            s.left_label = c.left_label;
            s.right_label = c.right_label;
            s.score = c.score;
            s.distance_before = before;
            s.distance_after = current_distance();
            s.tree_size = tree_.size();
            s.train_accuracy = train_accuracy();
            s.policy = chosen.policy;
            trace_.steps.push_back(s);
        }
    }

    TrainResult finish(StopReason reason) {
        trace_.stop_reason = reason;
        return {tree_, std::move(trace_)};
    }

    const LabeledDataset& d_;
    RowIds universe_;
    LearnerConfig cfg_;
    std::size_t k_;
    DecisionTree tree_;
    std::vector<LeafRows> leaves_;  // preorder
    std::vector<std::optional<SearchResult>> local_cache_;
    std::vector<std::size_t> confusion_;  // truth x predicted
    std::optional<MtsOracle> oracle_;
    TrainTrace trace_;
    std::size_t steps_ = 0;
};

void require_mode(const LearnerConfig& cfg, Mode m) {
    if (cfg.mode != m) throw SpecError("learner called with mode=" + mode_name(cfg.mode) + ", expected " + mode_name(m));
}

}  // namespace

TrainResult train(const LabeledDataset& d, std::span<const std::size_t> universe, const LearnerConfig& cfg) {
    return Learner(d, universe, cfg).run();
}

TrainResult id3_local(const LabeledDataset& d, std::span<const std::size_t> universe, const LearnerConfig& cfg) {
    require_mode(cfg, Mode::Local);
    return train(d, universe, cfg);
}

TrainResult id3_global(const LabeledDataset& d, std::span<const std::size_t> universe, const LearnerConfig& cfg) {
    require_mode(cfg, Mode::Global);
    return train(d, universe, cfg);
}

TrainResult id3_glocal(const LabeledDataset& d, std::span<const std::size_t> universe, const LearnerConfig& cfg) {
    require_mode(cfg, Mode::Glocal);
    return train(d, universe, cfg);
}

DecisionTree replay(const TrainTrace& trace, std::optional<std::size_t> steps) {
    DecisionTree t = DecisionTree::leaf(trace.initial_label);
    const std::size_t n = std::min(steps.value_or(trace.steps.size()), trace.steps.size());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& s = trace.steps[i];
        t = exchange(t, s.leaf_id,
                     DecisionTree::branch(s.criterion, DecisionTree::leaf(s.left_label), DecisionTree::leaf(s.right_label)));
    }
    return t;
}

double accuracy_on(const DecisionTree& t, const LabeledDataset& d, std::span<const std::size_t> rows) {
    if (rows.empty()) return 0.0;
    std::size_t agree = 0;
    for (std::size_t r : rows) agree += predict(t, d.row(r)) == d.label(r) ? 1 : 0;
    return static_cast<double>(agree) / static_cast<double>(rows.size());
}

void write_trace_csv(const TrainTrace& trace, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write " + path.string());
    out << "step,leaf_id,feature,threshold,left_label,right_label,score,distance_before,distance_after,"
           "tree_size,train_accuracy,policy\n";
    char buf[512];
    for (const auto& s : trace.steps) {
        std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%.17g,%d,%d,%.17g,%.17g,%.17g,%zu,%.17g,%s\n", s.step, s.leaf_id,
                      s.criterion.feature, s.criterion.threshold, s.left_label, s.right_label, s.score,
                      s.distance_before, s.distance_after, s.tree_size, s.train_accuracy,
                      s.policy == StepPolicy::Global ? "global" : "local");
        out << buf;
    }
    if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace gdt
