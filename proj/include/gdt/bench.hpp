#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gdt/clustering.hpp"
#include "gdt/learner.hpp"

namespace gdt {

enum class ExperimentKind { AccuracyVsTrainSize, SizeVsMinimal, NoisePruning, GlocalCompare, RedundantTable };

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name);
std::string experiment_kind_name(ExperimentKind k);

/// A CSV file or one of the generators.
struct DatasetSource {
    enum class Kind { File, Blobs, RandomTree, None };
    Kind kind = Kind::None;
    std::filesystem::path path;  // File
    std::size_t samples = 0;
    std::size_t features = 0;
    std::size_t classes = 0;
    double stddev = 1.0;  // Blobs
};

struct LearnerSpec {
    std::string id;
    LearnerConfig config;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::AccuracyVsTrainSize;
    std::string name;  // output file stem
    DatasetSource dataset;
    std::vector<LearnerSpec> learners;
    std::size_t repetitions = 1;
    std::uint64_t seed = 0;
    /// Train sizes, tree sizes or noise fractions depending on the kind.
    std::vector<double> sweep;
    double test_fraction = 0.1;
    /// size_vs_minimal: abort once this many attempts have been made at a
    /// sweep point and more than discard_limit of them were discarded.
    std::size_t discard_window = 20;
    double discard_limit = 0.9;
    bool record_wall_time = false;
};

/// Parses the JSON config. Relative dataset paths resolve against base_dir.
/// Throws SpecError on invalid configs.
ExperimentConfig parse_experiment_config(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

struct Aggregate {
    double mean = 0.0;
    double std = 0.0;   // population
    double ci95 = 0.0;  // 1.96 std / sqrt(count); 0 for one sample
    std::size_t count = 0;
};

/// Throws PreconditionError on an empty sample.
Aggregate aggregate_stats(std::span<const double> samples);

struct StatRow {
    std::string experiment;
    std::string learner_id;
    double sweep_value = 0.0;
    std::string metric;
    Aggregate stats;
};

struct RunStats {
    std::vector<StatRow> rows;
};

/// One point of a per-step training curve.
struct CurveRow {
    std::string experiment;
    std::string learner_id;
    double sweep_value = 0.0;
    std::size_t step = 0;
    std::string metric;  // train_accuracy | test_accuracy | unfinished_fraction
    Aggregate stats;
};

struct RedundantTableRow {
    std::string measure;
    std::string setting;  // L or G
    bool efficient = false;
    std::optional<double> first_threshold;  // L
    std::size_t redundant_splits = 0;       // G
};

struct ExperimentResult {
    RunStats stats;
    std::vector<CurveRow> curves;
    std::vector<RedundantTableRow> table;
};

ExperimentResult run_accuracy_vs_trainsize(const ExperimentConfig& cfg);
ExperimentResult run_size_vs_minimal(const ExperimentConfig& cfg);
ExperimentResult run_noise_pruning(const ExperimentConfig& cfg);
ExperimentResult run_glocal_compare(const ExperimentConfig& cfg);
ExperimentResult run_redundant_table(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Seven points at x = 0.5 .. 6.5, class 1 at 3.5, class 0 elsewhere.
LabeledDataset redundant_line_dataset();
/// 7 x 7 grid at (i - 0.5, j - 0.5); class 1 iff (i=4, j=1), (i>4, j>1) or (i>3, j>4).
LabeledDataset redundant_grid_dataset();

enum class OutputFormat { Csv, Json };

/// Columns: experiment, learner_id, sweep_value, metric, mean, std, ci95, count.
void emit_results(const RunStats& stats, const std::filesystem::path& path, OutputFormat format);
void emit_curves(std::span<const CurveRow> curves, const std::filesystem::path& path);
void emit_table(std::span<const RedundantTableRow> table, const std::filesystem::path& path);

/// Runs the config and writes <name>.csv, <name>.json and, when present,
/// <name>_curves.csv and <name>_table.csv into out_dir. Returns the files written.
std::vector<std::filesystem::path> run_bench_config(const std::filesystem::path& config_path,
                                                    const std::filesystem::path& out_dir,
                                                    std::optional<std::size_t> reps_override = std::nullopt);

}  // namespace gdt
