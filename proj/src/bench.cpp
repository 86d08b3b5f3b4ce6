#include "gdt/bench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <set>
#include <tuple>
#include <sstream>

#include "gdt/data.hpp"
#include "gdt/errors.hpp"
#include "gdt/random.hpp"
#include "json.hpp"

namespace gdt {

using nlohmann::json;

std::optional<ExperimentKind> parse_experiment_kind(std::string_view name) {
    if (name == "accuracy_vs_trainsize") return ExperimentKind::AccuracyVsTrainSize;
    if (name == "size_vs_minimal") return ExperimentKind::SizeVsMinimal;
    if (name == "noise_pruning") return ExperimentKind::NoisePruning;
    if (name == "glocal_compare") return ExperimentKind::GlocalCompare;
    if (name == "redundant_table") return ExperimentKind::RedundantTable;
    return std::nullopt;
}

std::string experiment_kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::AccuracyVsTrainSize: return "accuracy_vs_trainsize";
        case ExperimentKind::SizeVsMinimal: return "size_vs_minimal";
        case ExperimentKind::NoisePruning: return "noise_pruning";
        case ExperimentKind::GlocalCompare: return "glocal_compare";
        case ExperimentKind::RedundantTable: return "redundant_table";
    }
    return "unknown";
}

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return fallback;
    return it->get<T>();
}

LearnerSpec parse_learner(const json& j, std::size_t index) {
    if (!j.is_object()) throw SpecError("learner " + std::to_string(index) + " is not an object");
    LearnerSpec spec;
    const auto measure = get_or<std::string>(j, "measure", "");
    const auto m = parse_measure(measure);
    if (!m) throw SpecError("learner " + std::to_string(index) + ": unknown measure '" + measure + "'");
    spec.config.measure = *m;
    const auto mode = get_or<std::string>(j, "mode", "local");
    const auto md = parse_mode(mode);
    if (!md) throw SpecError("learner " + std::to_string(index) + ": unknown mode '" + mode + "'");
    spec.config.mode = *md;
    const auto labels = get_or<std::string>(j, "global_labels", "majority");
    const auto rule = parse_label_rule(labels);
    if (!rule) throw SpecError("learner " + std::to_string(index) + ": unknown global_labels '" + labels + "'");
    spec.config.global_label_rule = *rule;
    if (j.contains("max_nodes")) spec.config.max_nodes = j.at("max_nodes").get<std::size_t>();
    if (j.contains("min_branch")) spec.config.min_branch_instances = j.at("min_branch").get<std::size_t>();
    spec.config.stop_on_no_decay = get_or<bool>(j, "stop_on_no_decay", false);
    spec.config.oracle_budget = get_or<std::size_t>(j, "oracle_budget", kDefaultOracleBudget);
    if (spec.config.measure == MeasureId::MinimalTreeSize && spec.config.mode != Mode::Local)
        throw SpecError("learner " + std::to_string(index) + ": mts requires mode local");
    spec.id = get_or<std::string>(j, "id", mode + "-" + measure);
    return spec;
}

DatasetSource parse_dataset(const json& j, const std::filesystem::path& base_dir) {
    DatasetSource src;
    if (j.is_null()) return src;
    if (!j.is_object()) throw SpecError("dataset must be an object");
    if (j.contains("path")) {
        src.kind = DatasetSource::Kind::File;
        const std::filesystem::path p = j.at("path").get<std::string>();
        src.path = p.is_absolute() ? p : base_dir / p;
        return src;
    }
    const auto gen = get_or<std::string>(j, "generator", "");
    if (gen == "blobs") {
        src.kind = DatasetSource::Kind::Blobs;
        src.stddev = get_or<double>(j, "stddev", 1.0);
    } else if (gen == "random_tree") {
        src.kind = DatasetSource::Kind::RandomTree;
    } else {
        throw SpecError("dataset needs a path or a generator (blobs | random_tree)");
    }
    src.samples = get_or<std::size_t>(j, "samples", 0);
    src.features = get_or<std::size_t>(j, "features", 0);
    src.classes = get_or<std::size_t>(j, "classes", 0);
    if (src.samples == 0 || src.features == 0 || src.classes == 0)
        throw SpecError("generator needs positive samples, features and classes");
    return src;
}

bool is_integer(double v) { return std::isfinite(v) && v >= 0 && std::floor(v) == v; }

void validate(const ExperimentConfig& cfg) {
    if (cfg.repetitions < 1) throw SpecError("repetitions must be at least 1");
    for (std::size_t i = 1; i < cfg.sweep.size(); ++i) {
        if (!(cfg.sweep[i] > cfg.sweep[i - 1])) throw SpecError("sweep values must be strictly increasing");
    }
    if (cfg.kind != ExperimentKind::RedundantTable && cfg.learners.empty())
        throw SpecError("experiment needs at least one learner");
    if (!(cfg.test_fraction >= 0.0 && cfg.test_fraction < 1.0)) throw SpecError("test_fraction must lie in [0, 1)");
    switch (cfg.kind) {
        case ExperimentKind::AccuracyVsTrainSize:
            if (cfg.dataset.kind != DatasetSource::Kind::File && cfg.dataset.kind != DatasetSource::Kind::Blobs)
                throw SpecError("accuracy_vs_trainsize needs a file or blobs dataset");
            if (cfg.sweep.empty()) throw SpecError("accuracy_vs_trainsize needs train sizes");
            for (double v : cfg.sweep) {
                if (!is_integer(v) || v < 1) throw SpecError("train sizes must be positive integers");
            }
            break;
        case ExperimentKind::SizeVsMinimal:
            if (cfg.dataset.kind != DatasetSource::Kind::RandomTree)
                throw SpecError("size_vs_minimal needs a random_tree generator");
            if (cfg.sweep.empty()) throw SpecError("size_vs_minimal needs tree sizes");
            for (double v : cfg.sweep) {
                if (!is_integer(v) || static_cast<std::size_t>(v) % 2 == 0)
                    throw SpecError("tree sizes must be odd integers");
            }
            break;
        case ExperimentKind::NoisePruning:
        case ExperimentKind::GlocalCompare:
            if (cfg.dataset.kind != DatasetSource::Kind::File && cfg.dataset.kind != DatasetSource::Kind::Blobs)
                throw SpecError(experiment_kind_name(cfg.kind) + " needs a file or blobs dataset");
            for (double v : cfg.sweep) {
                if (!(v >= 0.0 && v <= 1.0)) throw SpecError("noise fractions must lie in [0, 1]");
            }
            if (cfg.kind == ExperimentKind::GlocalCompare &&
                std::none_of(cfg.learners.begin(), cfg.learners.end(),
                             [](const LearnerSpec& l) { return l.config.mode == Mode::Glocal; }))
                throw SpecError("glocal_compare needs a glocal learner");
            break;
        case ExperimentKind::RedundantTable:
            break;
    }
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text, const std::filesystem::path& base_dir) {
    ExperimentConfig cfg;
    try {
        const json j = json::parse(text);
        if (!j.is_object()) throw SpecError("config must be a JSON object");
        const auto kind_name = get_or<std::string>(j, "experiment", "");
        const auto kind = parse_experiment_kind(kind_name);
        if (!kind) throw SpecError("unknown experiment '" + kind_name + "'");
        cfg.kind = *kind;
        cfg.name = get_or<std::string>(j, "name", kind_name);
        if (cfg.name.empty() || cfg.name.find_first_of("/\\") != std::string::npos)
            throw SpecError("name must be a plain file stem");
        cfg.dataset = parse_dataset(j.contains("dataset") ? j.at("dataset") : json(), base_dir);
        if (j.contains("learners")) {
            const auto& ls = j.at("learners");
            if (!ls.is_array()) throw SpecError("learners must be an array");
            for (std::size_t i = 0; i < ls.size(); ++i) cfg.learners.push_back(parse_learner(ls[i], i));
        }
        const auto reps = get_or<long long>(j, "repetitions", 1);
        if (reps < 1) throw SpecError("repetitions must be at least 1");
        cfg.repetitions = static_cast<std::size_t>(reps);
        cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
        cfg.sweep = get_or<std::vector<double>>(j, "sweep", {});
        cfg.test_fraction = get_or<double>(j, "test_fraction", 0.1);
        cfg.discard_window = get_or<std::size_t>(j, "discard_window", 20);
        cfg.discard_limit = get_or<double>(j, "discard_limit", 0.9);
        cfg.record_wall_time = get_or<bool>(j, "record_wall_time", false);
    } catch (const json::exception& e) {
        throw SpecError(std::string("invalid config: ") + e.what());
    }
    if ((cfg.kind == ExperimentKind::NoisePruning || cfg.kind == ExperimentKind::GlocalCompare) && cfg.sweep.empty())
        cfg.sweep = {cfg.kind == ExperimentKind::NoisePruning ? 0.5 : 0.0};
    std::set<std::string> ids;
    for (const auto& l : cfg.learners) {
        if (!ids.insert(l.id).second) throw SpecError("duplicate learner id '" + l.id + "'");
    }
    validate(cfg);
    return cfg;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str(), path.parent_path());
}

Aggregate aggregate_stats(std::span<const double> samples) {
    if (samples.empty()) throw PreconditionError("cannot aggregate an empty sample");
    Aggregate a;
    a.count = samples.size();
    const double n = static_cast<double>(a.count);
    double sum = 0.0;
    for (double v : samples) sum += v;
    a.mean = sum / n;
    double sq = 0.0;
    for (double v : samples) sq += (v - a.mean) * (v - a.mean);
    a.std = std::sqrt(sq / n);
    a.ci95 = a.count > 1 ? 1.96 * a.std / std::sqrt(n) : 0.0;
    return a;
}

namespace {

template <class F>
void parallel_for(std::size_t n, F&& f) {
    std::exception_ptr error;
#pragma omp parallel for schedule(dynamic)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        try {
            f(static_cast<std::size_t>(i));
        } catch (...) {
#pragma omp critical(gdt_bench_error)
            if (!error) error = std::current_exception();
        }
    }
    if (error) std::rethrow_exception(error);
}

LabeledDataset load_source(const ExperimentConfig& cfg) {
    switch (cfg.dataset.kind) {
        case DatasetSource::Kind::File: return load_csv(cfg.dataset.path);
        case DatasetSource::Kind::Blobs:
            return gen_blobs(cfg.dataset.samples, cfg.dataset.features, cfg.dataset.classes, cfg.dataset.stddev,
                             derive_seed(cfg.seed, 0));
        default: throw SpecError("experiment has no loadable dataset");
    }
}

// Sample lists keyed by (sweep index, learner id, metric), kept in insertion
// order so emitted rows are stable.
class Samples {
public:
    void add(std::size_t sweep, const std::string& learner, const std::string& metric, double v) {
        const Key key{sweep, learner, metric};
        auto it = index_.find(key);
        if (it == index_.end()) {
            it = index_.emplace(key, order_.size()).first;
            order_.push_back(key);
            values_.emplace_back();
        }
        values_[it->second].push_back(v);
    }

    RunStats finish(const std::string& experiment, std::span<const double> sweep) const {
        std::vector<std::size_t> idx(order_.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](std::size_t a, std::size_t b) { return std::get<0>(order_[a]) < std::get<0>(order_[b]); });
        RunStats stats;
        for (std::size_t i : idx) {
            const auto& [s, learner, metric] = order_[i];
            stats.rows.push_back({experiment, learner, sweep.empty() ? 0.0 : sweep[s], metric, aggregate_stats(values_[i])});
        }
        return stats;
    }

private:
    using Key = std::tuple<std::size_t, std::string, std::string>;
    std::map<Key, std::size_t> index_;
    std::vector<Key> order_;
    std::vector<std::vector<double>> values_;
};

struct LearnerOutcome {
    std::vector<std::pair<std::string, double>> metrics;
};

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

LearnerConfig for_run(const LearnerSpec& spec, std::uint64_t seed) {
    LearnerConfig c = spec.config;
    c.seed = seed;
    c.exec = Exec::Serial;  // repetitions are the parallel axis
    return c;
}

}  // namespace

ExperimentResult run_accuracy_vs_trainsize(const ExperimentConfig& cfg) {
    if (cfg.kind != ExperimentKind::AccuracyVsTrainSize) throw SpecError("config is not accuracy_vs_trainsize");
    const LabeledDataset d = load_source(cfg);
    const auto n_test = static_cast<std::size_t>(std::floor(cfg.test_fraction * static_cast<double>(d.size())));
    const double largest = cfg.sweep.back();
    if (largest > static_cast<double>(d.size() - n_test)) {
        throw SpecError("train size " + std::to_string(static_cast<std::size_t>(largest)) + " exceeds the " +
                        std::to_string(d.size() - n_test) + " rows left after the test split");
    }
    const std::string kind = experiment_kind_name(cfg.kind);
    const std::size_t reps = cfg.repetitions;
    const std::size_t L = cfg.learners.size();
    std::vector<LearnerOutcome> outcomes(cfg.sweep.size() * reps * L);
    parallel_for(cfg.sweep.size() * reps, [&](std::size_t job) {
        const std::size_t s = job / reps;
        const std::size_t r = job % reps;
        const std::uint64_t seed = stable_hash(cfg.seed, kind, cfg.sweep[s], r);
        const auto split = split_train_test(d, {cfg.test_fraction, static_cast<std::size_t>(cfg.sweep[s]), seed});
        for (std::size_t l = 0; l < L; ++l) {
            const auto start = std::chrono::steady_clock::now();
            const auto res = train(d, split.train, for_run(cfg.learners[l], seed));
            const double ms = elapsed_ms(start);
            auto& out = outcomes[job * L + l].metrics;
            out = {{"test_accuracy", accuracy_on(res.tree, d, split.test)},
                   {"train_accuracy", accuracy_on(res.tree, d, split.train)},
                   {"tree_size", static_cast<double>(res.tree.size())},
                   {"redundant_splits", static_cast<double>(detect_redundant_splits(res.tree).size())}};
            if (cfg.record_wall_time) out.emplace_back("wall_time_ms", ms);
        }
    });
    Samples samples;
    for (std::size_t job = 0; job < outcomes.size() / L; ++job) {
        for (std::size_t l = 0; l < L; ++l) {
            for (const auto& [metric, v] : outcomes[job * L + l].metrics)
                samples.add(job / reps, cfg.learners[l].id, metric, v);
        }
    }
    return {samples.finish(kind, cfg.sweep), {}, {}};
}

ExperimentResult run_size_vs_minimal(const ExperimentConfig& cfg) {
    if (cfg.kind != ExperimentKind::SizeVsMinimal) throw SpecError("config is not size_vs_minimal");
    const std::string kind = experiment_kind_name(cfg.kind);
    const std::size_t reps = cfg.repetitions;
    const std::size_t L = cfg.learners.size();
    // A single repetition giving up after this many attempts has a discard
    // rate above the limit on its own.
    const std::size_t max_attempts = std::max<std::size_t>(
        cfg.discard_window, static_cast<std::size_t>(std::ceil(1.0 / std::max(1e-9, 1.0 - cfg.discard_limit))) + 1);

    struct RepOutcome {
        std::vector<LearnerOutcome> learners;
        std::size_t attempts = 0;
        bool exhausted = false;
    };
    std::vector<RepOutcome> outcomes(cfg.sweep.size() * reps);
    parallel_for(outcomes.size(), [&](std::size_t job) {
        const std::size_t s = job / reps;
        const std::size_t r = job % reps;
        const std::uint64_t seed = stable_hash(cfg.seed, kind, cfg.sweep[s], r);
        const auto size = static_cast<std::size_t>(cfg.sweep[s]);
        RepOutcome& out = outcomes[job];
        for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
            out.attempts = attempt + 1;
            const std::uint64_t gen_seed = derive_seed(seed, attempt);
            const auto gen = gen_random_tree(
                {size, cfg.dataset.features, cfg.dataset.classes, cfg.dataset.samples, gen_seed});
            const RowIds rows = gen.data.all_rows();
            std::vector<LearnerOutcome> learners(L);
            bool discard = false;
            for (std::size_t l = 0; l < L && !discard; ++l) {
                const auto start = std::chrono::steady_clock::now();
                const auto res = train(gen.data, rows, for_run(cfg.learners[l], gen_seed));
                const double ms = elapsed_ms(start);
                const double acc = accuracy_on(res.tree, gen.data, rows);
                if (acc == 1.0 && res.tree.size() < size) discard = true;
                learners[l].metrics = {{"tree_size", static_cast<double>(res.tree.size())},
                                       {"train_accuracy", acc},
                                       {"redundant_splits", static_cast<double>(detect_redundant_splits(res.tree).size())}};
                if (cfg.record_wall_time) learners[l].metrics.emplace_back("wall_time_ms", ms);
            }
            if (!discard) {
                out.learners = std::move(learners);
                return;
            }
        }
        out.exhausted = true;
    });

    Samples samples;
    for (std::size_t s = 0; s < cfg.sweep.size(); ++s) {
        std::size_t attempts = 0;
        std::size_t kept = 0;
        bool exhausted = false;
        for (std::size_t r = 0; r < reps; ++r) {
            const RepOutcome& out = outcomes[s * reps + r];
            attempts += out.attempts;
            kept += out.exhausted ? 0 : 1;
            exhausted = exhausted || out.exhausted;
        }
        const double rate = static_cast<double>(attempts - kept) / static_cast<double>(attempts);
        if (exhausted || (attempts >= cfg.discard_window && rate > cfg.discard_limit)) {
            throw BudgetError("tree size " + std::to_string(static_cast<std::size_t>(cfg.sweep[s])) +
                              ": discarded " + std::to_string(attempts - kept) + " of " + std::to_string(attempts) +
                              " generated instances; a learner keeps finding smaller consistent trees");
        }
        for (std::size_t r = 0; r < reps; ++r) {
            samples.add(s, "original", "tree_size", cfg.sweep[s]);
            const RepOutcome& out = outcomes[s * reps + r];
            for (std::size_t l = 0; l < L; ++l) {
                for (const auto& [metric, v] : out.learners[l].metrics) samples.add(s, cfg.learners[l].id, metric, v);
            }
            for (std::size_t a = 0; a < out.attempts; ++a)
                samples.add(s, "all", "discard_rate", a + 1 < out.attempts ? 1.0 : 0.0);
        }
    }
    return {samples.finish(kind, cfg.sweep), {}, {}};
}

namespace {

struct TraceRun {
    std::vector<double> train_accuracy;  // per step, step 0 = single leaf
    std::vector<double> test_accuracy;
    std::size_t tree_size = 0;
    std::size_t redundant = 0;
};

ExperimentResult run_traces(const ExperimentConfig& cfg) {
    const LabeledDataset d = load_source(cfg);
    const std::string kind = experiment_kind_name(cfg.kind);
    const std::size_t reps = cfg.repetitions;
    const std::size_t L = cfg.learners.size();
    std::vector<TraceRun> runs(cfg.sweep.size() * reps * L);
    parallel_for(cfg.sweep.size() * reps, [&](std::size_t job) {
        const std::size_t s = job / reps;
        const std::size_t r = job % reps;
        const std::uint64_t seed = stable_hash(cfg.seed, kind, cfg.sweep[s], r);
        const auto split = split_train_test(d, {cfg.test_fraction, std::nullopt, seed});
        // Noise touches train rows only; test accuracy uses the clean labels.
        const LabeledDataset noisy = inject_label_noise(d.subset(split.train), cfg.sweep[s], derive_seed(seed, 1));
        const RowIds rows = noisy.all_rows();
        for (std::size_t l = 0; l < L; ++l) {
            LearnerConfig lc = for_run(cfg.learners[l], seed);
            lc.record_trace = true;
            const auto res = train(noisy, rows, lc);
            TraceRun& run = runs[job * L + l];
            DecisionTree t = DecisionTree::leaf(res.trace.initial_label);
            run.train_accuracy.push_back(res.trace.initial_accuracy);
            run.test_accuracy.push_back(accuracy_on(t, d, split.test));
            for (const auto& step : res.trace.steps) {
                t = exchange(t, step.leaf_id,
                             DecisionTree::branch(step.criterion, DecisionTree::leaf(step.left_label),
                                                  DecisionTree::leaf(step.right_label)));
                run.train_accuracy.push_back(step.train_accuracy);
                run.test_accuracy.push_back(accuracy_on(t, d, split.test));
            }
            run.tree_size = res.tree.size();
            run.redundant = detect_redundant_splits(res.tree).size();
        }
    });

    Samples samples;
    std::vector<CurveRow> curves;
    for (std::size_t s = 0; s < cfg.sweep.size(); ++s) {
        for (std::size_t l = 0; l < L; ++l) {
            const std::string& id = cfg.learners[l].id;
            std::size_t longest = 0;
            for (std::size_t r = 0; r < reps; ++r) {
                const TraceRun& run = runs[(s * reps + r) * L + l];
                longest = std::max(longest, run.test_accuracy.size());
                samples.add(s, id, "test_accuracy", run.test_accuracy.back());
                samples.add(s, id, "train_accuracy", run.train_accuracy.back());
                samples.add(s, id, "tree_size", static_cast<double>(run.tree_size));
                samples.add(s, id, "redundant_splits", static_cast<double>(run.redundant));
                samples.add(s, id, "steps", static_cast<double>(run.test_accuracy.size() - 1));
            }
            for (std::size_t step = 0; step < longest; ++step) {
                std::vector<double> train_acc, test_acc, unfinished;
                for (std::size_t r = 0; r < reps; ++r) {
                    const TraceRun& run = runs[(s * reps + r) * L + l];
                    // Finished runs keep their final tree.
                    const std::size_t at = std::min(step, run.test_accuracy.size() - 1);
                    train_acc.push_back(run.train_accuracy[at]);
                    test_acc.push_back(run.test_accuracy[at]);
                    unfinished.push_back(run.test_accuracy.size() - 1 > step ? 1.0 : 0.0);
                }
                curves.push_back({kind, id, cfg.sweep[s], step, "train_accuracy", aggregate_stats(train_acc)});
                curves.push_back({kind, id, cfg.sweep[s], step, "test_accuracy", aggregate_stats(test_acc)});
                curves.push_back({kind, id, cfg.sweep[s], step, "unfinished_fraction", aggregate_stats(unfinished)});
            }
        }
    }
    return {samples.finish(kind, cfg.sweep), std::move(curves), {}};
}

}  // namespace

ExperimentResult run_noise_pruning(const ExperimentConfig& cfg) {
    if (cfg.kind != ExperimentKind::NoisePruning) throw SpecError("config is not noise_pruning");
    return run_traces(cfg);
}

ExperimentResult run_glocal_compare(const ExperimentConfig& cfg) {
    if (cfg.kind != ExperimentKind::GlocalCompare) throw SpecError("config is not glocal_compare");
    return run_traces(cfg);
}

LabeledDataset redundant_line_dataset() {
    std::vector<double> x;
    std::vector<int> y;
    for (int i = 1; i <= 7; ++i) {
        x.push_back(i - 0.5);
        y.push_back(i == 4 ? 1 : 0);
    }
    return LabeledDataset(std::move(x), 1, std::move(y), 2, {"x1"}, {"red", "blue"});
}

LabeledDataset redundant_grid_dataset() {
    std::vector<double> x;
    std::vector<int> y;
    for (int i = 1; i <= 7; ++i) {
        for (int j = 1; j <= 7; ++j) {
            x.push_back(i - 0.5);
            x.push_back(j - 0.5);
            const bool blue = (i == 4 && j == 1) || (i > 4 && j > 1) || (i > 3 && j > 4);
            y.push_back(blue ? 1 : 0);
        }
    }
    return LabeledDataset(std::move(x), 2, std::move(y), 2, {"x1", "x2"}, {"red", "blue"});
}

ExperimentResult run_redundant_table(const ExperimentConfig& cfg) {
    if (cfg.kind != ExperimentKind::RedundantTable) throw SpecError("config is not redundant_table");
    const std::string kind = experiment_kind_name(cfg.kind);
    const LabeledDataset line = redundant_line_dataset();
    const LabeledDataset grid = redundant_grid_dataset();
    const MeasureId measures[] = {MeasureId::InformationGain, MeasureId::GainRatio,       MeasureId::NormalizedVI,
                                  MeasureId::GiniImpurity,    MeasureId::ExtendedJaccard, MeasureId::InvertedAccuracy};
    ExperimentResult result;
    for (MeasureId m : measures) {
        const std::string name = measure_name(m);
        LearnerConfig local;
        local.measure = m;
        local.mode = Mode::Local;
        local.max_nodes = 3;
        local.seed = cfg.seed;
        const auto first = train(line, line.all_rows(), local);
        RedundantTableRow row{name, "L", false, std::nullopt, 0};
        if (!first.trace.steps.empty()) {
            const double r = first.trace.steps.front().criterion.threshold;
            row.first_threshold = r;
            row.efficient = r == 3.0 || r == 4.0;
        }
        result.table.push_back(row);

        LearnerConfig global = local;
        global.mode = Mode::Global;
        global.max_nodes.reset();
        const auto grown = train(grid, grid.all_rows(), global);
        const std::size_t found = detect_redundant_splits(grown.tree).size();
        result.table.push_back({name, "G", found == 0, std::nullopt, found});

        result.stats.rows.push_back({kind, name + "-local", 0.0, "efficient", aggregate_stats(std::vector{row.efficient ? 1.0 : 0.0})});
        result.stats.rows.push_back({kind, name + "-global", 0.0, "redundant_splits",
                                     aggregate_stats(std::vector{static_cast<double>(found)})});
        result.stats.rows.push_back({kind, name + "-global", 0.0, "tree_size",
                                     aggregate_stats(std::vector{static_cast<double>(grown.tree.size())})});
    }
    return result;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    switch (cfg.kind) {
        case ExperimentKind::AccuracyVsTrainSize: return run_accuracy_vs_trainsize(cfg);
        case ExperimentKind::SizeVsMinimal: return run_size_vs_minimal(cfg);
        case ExperimentKind::NoisePruning: return run_noise_pruning(cfg);
        case ExperimentKind::GlocalCompare: return run_glocal_compare(cfg);
        case ExperimentKind::RedundantTable: return run_redundant_table(cfg);
    }
    throw SpecError("unknown experiment kind");
}

namespace {

std::string num(double v) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    return out;
}

void check_written(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw DataError("write failed: " + path.string());
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

}  // namespace

void emit_results(const RunStats& stats, const std::filesystem::path& path, OutputFormat format) {
    auto out = open_for_write(path);
    if (format == OutputFormat::Csv) {
        out << "experiment,learner_id,sweep_value,metric,mean,std,ci95,count\n";
        for (const auto& r : stats.rows) {
            out << csv_field(r.experiment) << ',' << csv_field(r.learner_id) << ',' << num(r.sweep_value) << ','
                << csv_field(r.metric) << ',' << num(r.stats.mean) << ',' << num(r.stats.std) << ','
                << num(r.stats.ci95) << ',' << r.stats.count << '\n';
        }
    } else {
        json rows = json::array();
        for (const auto& r : stats.rows) {
            json row = json::object();
            row["experiment"] = r.experiment;
            row["learner_id"] = r.learner_id;
            row["sweep_value"] = r.sweep_value;
            row["metric"] = r.metric;
            row["mean"] = r.stats.mean;
            row["std"] = r.stats.std;
            row["ci95"] = r.stats.ci95;
            row["count"] = r.stats.count;
            rows.push_back(std::move(row));
        }
        out << json{{"rows", rows}}.dump(2) << '\n';
    }
    check_written(out, path);
}

void emit_curves(std::span<const CurveRow> curves, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    out << "experiment,learner_id,sweep_value,step,metric,mean,std,ci95,count\n";
    for (const auto& r : curves) {
        out << csv_field(r.experiment) << ',' << csv_field(r.learner_id) << ',' << num(r.sweep_value) << ','
            << r.step << ',' << r.metric << ',' << num(r.stats.mean) << ',' << num(r.stats.std) << ','
            << num(r.stats.ci95) << ',' << r.stats.count << '\n';
    }
    check_written(out, path);
}

void emit_table(std::span<const RedundantTableRow> table, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    out << "measure,setting,outcome,first_threshold,redundant_splits\n";
    for (const auto& r : table) {
        out << r.measure << ',' << r.setting << ',' << (r.efficient ? "efficient" : "redundant") << ','
            << (r.first_threshold ? num(*r.first_threshold) : "") << ',' << r.redundant_splits << '\n';
    }
    check_written(out, path);
}

std::vector<std::filesystem::path> run_bench_config(const std::filesystem::path& config_path,
                                                    const std::filesystem::path& out_dir,
                                                    std::optional<std::size_t> reps_override) {
    ExperimentConfig cfg = load_experiment_config(config_path);
    if (reps_override) {
        if (*reps_override < 1) throw SpecError("--reps must be at least 1");
        cfg.repetitions = *reps_override;
    }
    const ExperimentResult result = run_experiment(cfg);
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw DataError("cannot create " + out_dir.string() + ": " + ec.message());
    std::vector<std::filesystem::path> written;
    written.push_back(out_dir / (cfg.name + ".csv"));
    emit_results(result.stats, written.back(), OutputFormat::Csv);
    written.push_back(out_dir / (cfg.name + ".json"));
    emit_results(result.stats, written.back(), OutputFormat::Json);
    if (!result.curves.empty()) {
        written.push_back(out_dir / (cfg.name + "_curves.csv"));
        emit_curves(result.curves, written.back());
    }
    if (!result.table.empty()) {
        written.push_back(out_dir / (cfg.name + "_table.csv"));
        emit_table(result.table, written.back());
    }
    return written;
}

}  // namespace gdt
