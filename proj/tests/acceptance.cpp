// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gdt/bench.hpp"
#include "gdt/data.hpp"
#include "gdt/errors.hpp"
#include "gdt/learner.hpp"
#include "gdt/measures.hpp"
#include "gdt/oracle.hpp"
#include "gdt/tree.hpp"
#include "support.hpp"

using namespace gdt;

namespace {

constexpr double kIdentityTol = 1e-9;
constexpr double kTriangleTol = 1e-9;
constexpr double kTrainSizeMaxGap = 0.08;
constexpr double kTrainSizeMinAccuracy = 0.85;
constexpr double kTreeSizeMaxLocalRatio = 1.5;
constexpr double kNoiseFinalLow = 0.45;
constexpr double kNoiseFinalHigh = 0.75;
constexpr double kNoiseMinPeakDrop = 0.05;

const std::filesystem::path kData = GDT_DATA_DIR;
const std::filesystem::path kConfigs = GDT_CONFIG_DIR;

struct Outcome {
    bool pass = true;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs >= limit_s) {
        o.pass = false;
        o.detail += " [runtime limit exceeded]";
    }
    if (!o.pass) ++failures;
    std::printf("criterion %2d %s: %s (%.1fs) %s\n", id, o.pass ? "PASS" : "FAIL", title.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

const StatRow* find_row(const RunStats& s, const std::string& id, double sweep, const std::string& metric) {
    for (const auto& r : s.rows) {
        if (r.learner_id == id && r.sweep_value == sweep && r.metric == metric) return &r;
    }
    return nullptr;
}

const StatRow& need_row(const RunStats& s, const std::string& id, double sweep, const std::string& metric) {
    const auto* r = find_row(s, id, sweep, metric);
    if (!r) throw std::runtime_error("missing row " + id + "/" + metric);
    return *r;
}

// Labels with parts renumbered by first appearance.
std::vector<int> canonical(const Clustering& c) {
    std::map<std::size_t, int> seen;
    std::vector<int> out;
    for (auto p : c.membership()) {
        auto it = seen.emplace(p, static_cast<int>(seen.size())).first;
        out.push_back(it->second);
    }
    return out;
}

Outcome identities() {
    std::mt19937_64 rng(101);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 12;
        const auto a = test::random_clustering(rng, n, 1 + rng() % 4);
        const auto b = test::random_clustering(rng, n, 1 + rng() % 4);
        const double ha = entropy(a), hb = entropy(b), hab = entropy(meet(a, b));
        const double cond = conditional_entropy(a, b);
        const double gain = information_gain(a, b).value;
        worst = std::max(worst, std::abs(cond - (hab - hb)));
        worst = std::max(worst, std::abs(gain - (ha - cond)));
        if (hab > 0) worst = std::max(worst, std::abs(normalized_vi(a, b).value - (1 - gain / hab)));
        worst = std::max(worst, gain - std::min(ha, hb));
    }
    return {worst <= kIdentityTol, "worst residual " + fmt("%.3g", worst)};
}

Outcome table_properties() {
    std::mt19937_64 rng(202);
    bool ok = true;
    std::string detail;

    const MeasureId invariant[] = {MeasureId::InformationGain, MeasureId::GainRatio, MeasureId::NormalizedVI,
                                   MeasureId::GiniImpurity};
    double worst_perm = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 12, k = 1 + rng() % 4;
        const auto a = test::random_clustering(rng, n, k);
        const auto b = test::random_clustering(rng, n, 1 + rng() % 4);
        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        std::shuffle(perm.begin(), perm.end(), rng);
        const auto pa = a.permuted(perm);
        for (auto m : invariant) worst_perm = std::max(worst_perm, std::abs(evaluate(m, a, b) - evaluate(m, pa, b)));
    }
    ok = ok && worst_perm <= kTriangleTol;
    const auto halves = clustering_from_labels(std::vector<int>{0, 0, 1, 1}, 2);
    const auto swapped = halves.permuted(std::vector<std::size_t>{1, 0});
    const bool jac_witness = evaluate(MeasureId::ExtendedJaccard, halves, halves) !=
                             evaluate(MeasureId::ExtendedJaccard, swapped, halves);
    const bool acc_witness = evaluate(MeasureId::InvertedAccuracy, halves, halves) !=
                             evaluate(MeasureId::InvertedAccuracy, swapped, halves);
    ok = ok && jac_witness && acc_witness;
    detail += "perm residual " + fmt("%.3g", worst_perm) + (jac_witness && acc_witness ? ", jaccard/accuracy witnesses found" : ", witness missing");

    // Triples over one universe; jaccard needs equal part counts.
    std::size_t nvi_bad = 0, jac_bad = 0, gini_triangle = 0, gini_identity = 0, gini_symmetry = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 12, k = 1 + rng() % 4;
        const Clustering c[3] = {test::random_clustering(rng, n, k), test::random_clustering(rng, n, k),
                                 test::random_clustering(rng, n, k)};
        auto d = [&](MeasureId m, int i, int j) { return evaluate(m, c[i], c[j]); };
        int order[3] = {0, 1, 2};
        do {
            const int x = order[0], y = order[1], z = order[2];
            nvi_bad += d(MeasureId::NormalizedVI, x, z) > d(MeasureId::NormalizedVI, x, y) + d(MeasureId::NormalizedVI, y, z) + kTriangleTol;
            jac_bad += d(MeasureId::ExtendedJaccard, x, z) > d(MeasureId::ExtendedJaccard, x, y) + d(MeasureId::ExtendedJaccard, y, z) + kTriangleTol;
            gini_triangle += d(MeasureId::GiniImpurity, x, z) > d(MeasureId::GiniImpurity, x, y) + d(MeasureId::GiniImpurity, y, z) + kTriangleTol;
        } while (std::next_permutation(order, order + 3));
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                if (i == j) continue;
                const double g = d(MeasureId::GiniImpurity, i, j);
                gini_identity += std::abs(g) <= kTriangleTol && canonical(c[i]) != canonical(c[j]);
                gini_symmetry += std::abs(g - d(MeasureId::GiniImpurity, j, i)) > kTriangleTol;
            }
        }
    }
    ok = ok && nvi_bad == 0 && jac_bad == 0;
    // Gini counts as non-metric on a triangle or identity counterexample.
    const bool gini_violation = gini_triangle + gini_identity > 0;
    ok = ok && gini_violation;
    detail += "; triangle violations nvi " + std::to_string(nvi_bad) + ", jaccard " + std::to_string(jac_bad) +
              "; gini violations: triangle " + std::to_string(gini_triangle) + ", identity " +
              std::to_string(gini_identity) + ", symmetry " + std::to_string(gini_symmetry);
    return {ok, detail};
}

// Smallest tree over binary features (threshold 0.5) that agrees with the
// dataset, found by enumerating trees as truth tables.
class TruthTableSearch {
public:
    explicit TruthTableSearch(std::size_t m) : points_(std::size_t{1} << m) {
        // Each tree over m binary features is a function {0,1}^m -> {0,1};
        // record the smallest size that realizes each function.
        std::vector<std::vector<unsigned>> by_size(8);
        by_size[1] = {0u, (1u << points_) - 1};
        for (std::size_t s = 3; s <= 7; s += 2) {
            std::set<unsigned> out;
            for (std::size_t sl = 1; sl + 1 < s; sl += 2) {
                for (unsigned l : by_size[sl]) {
                    for (unsigned r : by_size[s - 1 - sl]) {
                        for (std::size_t j = 0; j < m; ++j) {
                            unsigned f = 0;
                            for (std::size_t p = 0; p < points_; ++p) {
                                const bool left = ((p >> j) & 1u) == 0;  // x_j = 0 <= 0.5
                                f |= ((left ? l : r) >> p & 1u) << p;
                            }
                            out.insert(f);
                        }
                    }
                }
            }
            by_size[s].assign(out.begin(), out.end());
        }
        for (std::size_t s = 1; s <= 7; s += 2) {
            for (unsigned f : by_size[s]) best_.emplace(f, s);  // keeps the first, smallest
        }
    }

    // present: bitmask of points in the data; labels: required label bits.
    std::size_t min_size(unsigned present, unsigned labels) const {
        std::size_t best = 0;
        for (const auto& [f, s] : best_) {
            if ((f & present) == (labels & present) && (best == 0 || s < best)) best = s;
        }
        return best;
    }

private:
    std::size_t points_;
    std::map<unsigned, std::size_t> best_;
};

Outcome oracle_equivalence() {
    std::size_t checked = 0, skipped = 0, mismatches = 0;
    for (std::size_t m = 1; m <= 2; ++m) {
        const TruthTableSearch truth(m);
        const std::size_t codes = (std::size_t{1} << m) * 2;  // feature point x label
        for (std::size_t n = 1; n <= 6; ++n) {
            std::size_t total = 1;
            for (std::size_t i = 0; i < n; ++i) total *= codes;
            for (std::size_t id = 0; id < total; ++id) {
                std::vector<double> x;
                std::vector<int> y;
                unsigned present = 0, ones = 0, zeros = 0;
                for (std::size_t i = 0, c = id; i < n; ++i, c /= codes) {
                    const unsigned point = static_cast<unsigned>((c % codes) >> 1);
                    const int label = static_cast<int>(c % 2);
                    for (std::size_t j = 0; j < m; ++j) x.push_back(static_cast<double>((point >> j) & 1u));
                    y.push_back(label);
                    present |= 1u << point;
                    (label ? ones : zeros) |= 1u << point;
                }
                const LabeledDataset d(x, m, y, 2);
                const auto rows = d.all_rows();
                if (ones & zeros) {
                    ++skipped;
                    try {
                        mts(d, rows);
                        ++mismatches;
                    } catch (const NoConsistentTreeError&) {
                    }
                    continue;
                }
                ++checked;
                const std::size_t expect = truth.min_size(present, ones);
                const std::size_t got = mts(d, rows);
                LearnerConfig cfg;
                cfg.measure = MeasureId::MinimalTreeSize;
                cfg.mode = Mode::Local;
                cfg.exec = Exec::Serial;
                const auto res = train(d, rows, cfg);
                if (got != expect || res.tree.size() != got || accuracy_on(res.tree, d, rows) != 1.0) ++mismatches;
            }
        }
    }
    return {mismatches == 0, std::to_string(checked) + " consistent datasets, " + std::to_string(skipped) +
                                 " contradictory, " + std::to_string(mismatches) + " mismatches"};
}

Outcome redundant_table() {
    ExperimentConfig cfg;
    cfg.kind = ExperimentKind::RedundantTable;
    const auto res = run_redundant_table(cfg);
    bool local_ok = true;
    std::string local, warn;
    for (const auto& row : res.table) {
        if (row.setting == "L") {
            const bool expect = row.measure != "jaccard" && row.measure != "accuracy";
            local_ok = local_ok && row.efficient == expect;
            local += " " + row.measure + "=" + (row.first_threshold ? fmt("%g", *row.first_threshold) : "none");
        } else if (row.redundant_splits == 0) {
            warn += " " + row.measure;
        }
    }
    std::string detail = "(L) first thresholds:" + local;
    detail += warn.empty() ? "; (G) redundant split found for every measure"
                           : "; WARN (G) no redundant split detected for:" + warn;
    return {local_ok, detail};
}

// Rows whose feature vector appears with another label.
RowIds consistent_rows(const LabeledDataset& d) {
    std::map<std::vector<double>, std::set<int>> seen;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto r = d.row(i);
        seen[{r.begin(), r.end()}].insert(d.label(i));
    }
    RowIds out;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const auto r = d.row(i);
        if (seen[{r.begin(), r.end()}].size() == 1) out.push_back(i);
    }
    return out;
}

Outcome consistency() {
    const std::pair<std::string, LabeledDataset> sets[] = {{"iris", load_csv(kData / "iris.csv")},
                                                           {"blobs", gen_blobs(2000, 3, 3, 1.0, 7)}};
    const MeasureId measures[] = {MeasureId::InformationGain, MeasureId::GainRatio,       MeasureId::NormalizedVI,
                                  MeasureId::GiniImpurity,    MeasureId::ExtendedJaccard, MeasureId::InvertedAccuracy};
    // Default label rule. With exhaustive labels, permutation-invariant
    // measures cannot tell a class from its relabeling, so indices may swap.
    const Mode modes[] = {Mode::Local, Mode::Global, Mode::Glocal};
    std::size_t runs = 0;
    std::string bad;
    for (const auto& [name, d] : sets) {
        const auto rows = consistent_rows(d);
        for (auto m : measures) {
            for (const auto mode : modes) {
                LearnerConfig cfg;
                cfg.measure = m;
                cfg.mode = mode;
                const auto res = train(d, rows, cfg);
                ++runs;
                if (accuracy_on(res.tree, d, rows) != 1.0) {
                    bad += " " + name + "/" + measure_name(m) + "/" + mode_name(mode);
                }
            }
        }
    }
    return {bad.empty(), std::to_string(runs) + " runs (majority labels)" + (bad.empty() ? ", all consistent" : ", short of 1.0:" + bad)};
}

Outcome merge_preserves_predictions() {
    std::mt19937_64 rng(606);
    std::size_t fired = 0;
    std::string bad;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t m = 1 + rng() % 2;
        const auto t = test::random_tree(rng, 1 + rng() % 8, m, 2);
        const auto merged = merge_redundant_splits(t);
        for (const auto& p : test::cell_probes({t}, m)) {
            if (predict(t, p) != predict(merged, p)) {
                bad += " prediction@" + std::to_string(trial);
                break;
            }
        }
        if (!detect_redundant_splits(t).empty()) {
            ++fired;
            if (merged.size() >= t.size()) bad += " size@" + std::to_string(trial);
        }
        if (!detect_redundant_splits(merged).empty()) bad += " residual@" + std::to_string(trial);
    }
    return {bad.empty() && fired > 0,
            "detector fired on " + std::to_string(fired) + "/100 trees" + (bad.empty() ? "" : "; failures:" + bad)};
}

Outcome trainsize_accuracy() {
    const auto cfg = load_experiment_config(kConfigs / "iris_trainsize.json");
    const auto res = run_experiment(cfg);
    const double top = cfg.sweep.back();
    const double local = need_row(res.stats, "local-gini", top, "test_accuracy").stats.mean;
    const double global = need_row(res.stats, "global-gini", top, "test_accuracy").stats.mean;
    const bool ok = cfg.repetitions == 50 && std::abs(local - global) < kTrainSizeMaxGap && local > kTrainSizeMinAccuracy &&
                    global > kTrainSizeMinAccuracy;
    return {ok, "train size " + fmt("%g", top) + ": local " + fmt("%.3f", local) + ", global " + fmt("%.3f", global)};
}

Outcome tree_sizes() {
    const auto cfg = load_experiment_config(kConfigs / "random_tree_sizes.json");
    const auto res = run_experiment(cfg);
    bool ok = cfg.repetitions == 20;
    std::string detail;
    for (double size : cfg.sweep) {
        const double original = need_row(res.stats, "original", size, "tree_size").stats.mean;
        detail += " [size " + fmt("%g", size) + " orig " + fmt("%.1f", original);
        for (const char* m : {"gain", "gini", "nvi"}) {
            const double l = need_row(res.stats, std::string("local-") + m, size, "tree_size").stats.mean;
            const double g = need_row(res.stats, std::string("global-") + m, size, "tree_size").stats.mean;
            ok = ok && g >= l && l <= kTreeSizeMaxLocalRatio * original;
            detail += std::string(" ") + m + " " + fmt("%.1f", l) + "/" + fmt("%.1f", g);
        }
        detail += " discard " + fmt("%.2f", need_row(res.stats, "all", size, "discard_rate").stats.mean) + "]";
    }
    return {ok, "local/global mean sizes:" + detail};
}

Outcome noise_overfitting() {
    const auto cfg = load_experiment_config(kConfigs / "iris_noise.json");
    const auto res = run_experiment(cfg);
    const double noise = cfg.sweep.front();
    const double local = need_row(res.stats, "local-gini", noise, "test_accuracy").stats.mean;
    const double global = need_row(res.stats, "global-gini", noise, "test_accuracy").stats.mean;
    double peak = 0.0;
    for (const auto& c : res.curves) {
        if (c.learner_id == "global-gini" && c.metric == "test_accuracy" && c.sweep_value == noise) {
            peak = std::max(peak, c.stats.mean);
        }
    }
    auto in_band = [](double v) { return v >= kNoiseFinalLow && v <= kNoiseFinalHigh; };
    const bool ok = cfg.repetitions == 100 && noise == 0.5 && in_band(local) && in_band(global) &&
                    peak - global >= kNoiseMinPeakDrop;
    return {ok, "final test accuracy local " + fmt("%.3f", local) + ", global " + fmt("%.3f", global) +
                    "; global peak " + fmt("%.3f", peak)};
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Outcome determinism() {
    const auto root = std::filesystem::temp_directory_path() / "gdt_acceptance_determinism";
    std::filesystem::remove_all(root);
    std::size_t files = 0;
    std::string bad;
    for (const char* name : {"iris_trainsize.json", "random_tree_sizes.json", "redundant_splits.json", "iris_noise.json",
                             "iris_glocal.json"}) {
        const auto a = run_bench_config(kConfigs / name, root / "a");
        const auto b = run_bench_config(kConfigs / name, root / "b");
        if (a.size() != b.size()) bad += std::string(" ") + name;
        for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
            ++files;
            if (slurp(a[i]).empty() || slurp(a[i]) != slurp(b[i])) bad += " " + a[i].filename().string();
        }
    }
    std::filesystem::remove_all(root);
    return {bad.empty(), std::to_string(files) + " file pairs compared" + (bad.empty() ? ", identical" : "; differ:" + bad)};
}

}  // namespace

int main() {
    report(1, "measure identities", 5, identities);
    report(2, "permutation invariance and metric properties", 10, table_properties);
    report(3, "mts oracle vs exhaustive tree search", 60, oracle_equivalence);
    report(4, "efficient/redundant split table", 10, redundant_table);
    report(5, "unpruned learners are consistent", 120, consistency);
    report(6, "redundant-split merge", 30, merge_preserves_predictions);
    report(7, "local vs global accuracy on iris", 120, trainsize_accuracy);
    report(8, "global trees are larger", 600, tree_sizes);
    report(9, "overfitting under label noise", 300, noise_overfitting);
    report(10, "bench output is deterministic", 1200, determinism);
    std::printf("%d criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
