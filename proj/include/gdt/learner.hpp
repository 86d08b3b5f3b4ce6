#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gdt/clustering.hpp"
#include "gdt/measures.hpp"
#include "gdt/oracle.hpp"
#include "gdt/split_search.hpp"
#include "gdt/tree.hpp"

namespace gdt {

/// local: score splits on the leaf's instances only.
/// global: score the whole modified tree against the ground truth.
/// glocal: global while that strictly lowers the distance, local otherwise.
enum class Mode { Local, Global, Glocal };

struct LearnerConfig {
    MeasureId measure = MeasureId::InformationGain;
    Mode mode = Mode::Local;
    LabelRule global_label_rule = LabelRule::Majority;
    std::optional<std::size_t> max_nodes;
    /// A leaf may be split only if it holds at least this many instances.
    std::optional<std::size_t> min_branch_instances;
    bool stop_on_no_decay = false;
    bool record_trace = true;
    std::uint64_t seed = 0;
    Exec exec = Exec::Parallel;
    std::size_t oracle_budget = kDefaultOracleBudget;
};

std::optional<Mode> parse_mode(std::string_view name);
std::string mode_name(Mode m);
std::optional<LabelRule> parse_label_rule(std::string_view name);
std::string label_rule_name(LabelRule r);

enum class StepPolicy { Local, Global };

enum class StopReason { AllLeavesPure, NoValidSplit, MaxNodes, NoDecay };
std::string stop_reason_name(StopReason r);

struct TraceStep {
    std::size_t step = 0;
    std::size_t leaf_id = 0;  // node id in the tree before the step
    SplitCriterion criterion;
    int left_label = 0;
    int right_label = 0;
    double score = 0.0;            // selection score of the chosen candidate
    double distance_before = 0.0;  // Δ(Y, T_t) over the whole universe
    double distance_after = 0.0;
    std::size_t tree_size = 0;     // after the step
    double train_accuracy = 0.0;   // after the step
    StepPolicy policy = StepPolicy::Local;
};

struct TrainTrace {
    int initial_label = 0;
    double initial_distance = 0.0;
    double initial_accuracy = 0.0;
    std::vector<TraceStep> steps;
    StopReason stop_reason = StopReason::AllLeavesPure;
};

struct TrainResult {
    DecisionTree tree;
    TrainTrace trace;
};

/// Dispatches on cfg.mode. Throws PreconditionError on an empty universe,
/// SpecError for mts outside local mode, BudgetError when mts exceeds the
/// oracle budget.
TrainResult train(const LabeledDataset& d, std::span<const std::size_t> universe, const LearnerConfig& cfg);
TrainResult id3_local(const LabeledDataset& d, std::span<const std::size_t> universe, const LearnerConfig& cfg);
TrainResult id3_global(const LabeledDataset& d, std::span<const std::size_t> universe, const LearnerConfig& cfg);
TrainResult id3_glocal(const LabeledDataset& d, std::span<const std::size_t> universe, const LearnerConfig& cfg);

enum class Guard { Allow, Stop };

/// A step the learner is about to take.
struct StepProposal {
    std::size_t leaf_instances = 0;
    double score = 0.0;          // distance the step leads to
    double current_score = 0.0;  // distance it is compared against
};

/// max_nodes: the step may not push the tree past the node budget.
/// min_branch_instances: the leaf must hold at least that many instances.
/// stop_on_no_decay: the step must strictly lower the distance.
Guard apply_pruning_guards(const LearnerConfig& cfg, const DecisionTree& t, const StepProposal& p);

/// Tree after the first `steps` steps of a trace (all steps by default).
DecisionTree replay(const TrainTrace& trace, std::optional<std::size_t> steps = std::nullopt);

/// Fraction of rows whose label the tree predicts; 0 for no rows.
double accuracy_on(const DecisionTree& t, const LabeledDataset& d, std::span<const std::size_t> rows);

void write_trace_csv(const TrainTrace& trace, const std::filesystem::path& path);

}  // namespace gdt
