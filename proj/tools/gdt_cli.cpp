// Command line front end: dataset generation, training, prediction,
// simplification and experiment runs.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "gdt/bench.hpp"
#include "gdt/data.hpp"
#include "gdt/errors.hpp"
#include "gdt/learner.hpp"
#include "gdt/tree.hpp"

namespace {

constexpr int kUsageExit = 2;

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw gdt::DataError("cannot write " + path);
    out << text;
    if (!out) throw gdt::DataError("write failed: " + path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decision trees grown by comparing clusterings"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
    gen->require_subcommand(1);

    struct {
        std::size_t samples = 0, features = 0, classes = 0;
        double stddev = 1.0;
        std::uint64_t seed = 0;
        std::string out;
    } blobs;
    auto* gen_blobs = gen->add_subcommand("blobs", "Isotropic Gaussian blobs");
    gen_blobs->add_option("--samples", blobs.samples)->required();
    gen_blobs->add_option("--features", blobs.features)->required();
    gen_blobs->add_option("--classes", blobs.classes)->required();
    gen_blobs->add_option("--stddev", blobs.stddev, "Per-feature standard deviation")->capture_default_str();
    gen_blobs->add_option("--seed", blobs.seed)->required();
    gen_blobs->add_option("-o", blobs.out, "Output CSV")->required();

    struct {
        gdt::RandomTreeSpec spec;
        std::string out, tree_out;
    } rtree;
    auto* gen_tree = gen->add_subcommand("tree", "Random tree plus uniform samples labeled by it");
    gen_tree->add_option("--size", rtree.spec.target_size, "Odd node count")->required();
    gen_tree->add_option("--samples", rtree.spec.n_samples)->required();
    gen_tree->add_option("--features", rtree.spec.n_features)->required();
    gen_tree->add_option("--classes", rtree.spec.n_classes)->required();
    gen_tree->add_option("--seed", rtree.spec.seed)->required();
    gen_tree->add_option("-o", rtree.out, "Output CSV")->required();
    gen_tree->add_option("--tree-out", rtree.tree_out, "Write the generating tree here");

    // noise
    struct {
        std::string data, out;
        double fraction = 0.0;
        std::uint64_t seed = 0;
    } noise;
    auto* noise_cmd = app.add_subcommand("noise", "Resample the labels of a fraction of the rows");
    noise_cmd->add_option("--data", noise.data)->required();
    noise_cmd->add_option("--fraction", noise.fraction)->required();
    noise_cmd->add_option("--seed", noise.seed)->required();
    noise_cmd->add_option("-o", noise.out, "Output CSV")->required();

    // train
    struct {
        std::string data, measure, mode, labels = "majority", out, trace;
        std::optional<std::size_t> max_nodes, min_branch;
        bool no_decay = false;
        std::uint64_t seed = 0;
    } tr;
    auto* train_cmd = app.add_subcommand("train", "Grow a tree on a CSV dataset");
    train_cmd->add_option("--data", tr.data)->required();
    train_cmd->add_option("--measure", tr.measure)
        ->required()
        ->check(CLI::IsMember({"gain", "gain-ratio", "nvi", "gini", "jaccard", "accuracy", "mts"}));
    train_cmd->add_option("--mode", tr.mode)->required()->check(CLI::IsMember({"local", "global", "glocal"}));
    train_cmd->add_option("--global-labels", tr.labels)->check(CLI::IsMember({"exhaustive", "majority"}))->capture_default_str();
    train_cmd->add_option("--max-nodes", tr.max_nodes);
    train_cmd->add_option("--min-branch", tr.min_branch);
    train_cmd->add_flag("--stop-on-no-decay", tr.no_decay);
    train_cmd->add_option("--seed", tr.seed)->required();
    train_cmd->add_option("-o", tr.out, "Output tree document")->required();
    train_cmd->add_option("--trace", tr.trace, "Write the per-step trace as CSV");

    // predict
    struct {
        std::string tree, data, out;
    } pr;
    auto* predict_cmd = app.add_subcommand("predict", "Predict the class of every row");
    predict_cmd->add_option("--tree", pr.tree)->required();
    predict_cmd->add_option("--data", pr.data)->required();
    predict_cmd->add_option("-o", pr.out, "Output CSV")->required();

    // simplify
    struct {
        std::string tree, out;
    } simp;
    auto* simplify_cmd = app.add_subcommand("simplify", "Merge redundant same-feature splits");
    simplify_cmd->add_option("--tree", simp.tree)->required();
    simplify_cmd->add_option("-o", simp.out, "Output tree document")->required();

    // bench
    struct {
        std::string config, out;
        std::optional<std::size_t> reps;
    } bench;
    auto* bench_cmd = app.add_subcommand("bench", "Run an experiment config");
    bench_cmd->add_option("--config", bench.config)->required();
    bench_cmd->add_option("-o", bench.out, "Output directory")->required();
    bench_cmd->add_option("--reps", bench.reps, "Override the repetition count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageExit;
    }

    try {
        if (gen_blobs->parsed()) {
            const auto d = gdt::gen_blobs(blobs.samples, blobs.features, blobs.classes, blobs.stddev, blobs.seed);
            gdt::save_csv(d, blobs.out);
        } else if (gen_tree->parsed()) {
            const auto g = gdt::gen_random_tree(rtree.spec);
            gdt::save_csv(g.data, rtree.out);
            if (!rtree.tree_out.empty()) gdt::save_tree(rtree.tree_out, g.tree, g.data.class_names());
        } else if (noise_cmd->parsed()) {
            const auto d = gdt::load_csv(noise.data);
            gdt::save_csv(gdt::inject_label_noise(d, noise.fraction, noise.seed), noise.out);
        } else if (train_cmd->parsed()) {
            const auto d = gdt::load_csv(tr.data);
            gdt::LearnerConfig cfg;
            cfg.measure = *gdt::parse_measure(tr.measure);
            cfg.mode = *gdt::parse_mode(tr.mode);
            cfg.global_label_rule = *gdt::parse_label_rule(tr.labels);
            cfg.max_nodes = tr.max_nodes;
            cfg.min_branch_instances = tr.min_branch;
            cfg.stop_on_no_decay = tr.no_decay;
            cfg.seed = tr.seed;
            const auto rows = d.all_rows();
            const auto res = gdt::train(d, rows, cfg);
            gdt::save_tree(tr.out, res.tree, d.class_names());
            if (!tr.trace.empty()) gdt::write_trace_csv(res.trace, tr.trace);
            std::cerr << "size " << res.tree.size() << ", train accuracy " << gdt::accuracy_on(res.tree, d, rows)
                      << ", stop: " << gdt::stop_reason_name(res.trace.stop_reason) << '\n';
        } else if (predict_cmd->parsed()) {
            const auto doc = gdt::load_tree(pr.tree);
            const auto d = gdt::load_csv(pr.data);
            std::string text = "prediction\n";
            for (std::size_t i = 0; i < d.size(); ++i) {
                const int y = gdt::predict(doc.tree, d.row(i));
                const auto label = static_cast<std::size_t>(y);
                text += label < doc.class_names.size() ? doc.class_names[label] : std::to_string(y);
                text += '\n';
            }
            write_text(pr.out, text);
        } else if (simplify_cmd->parsed()) {
            const auto doc = gdt::load_tree(simp.tree);
            const auto merged = gdt::merge_redundant_splits(doc.tree);
            gdt::save_tree(simp.out, merged, doc.class_names);
            std::cerr << "size " << doc.tree.size() << " -> " << merged.size() << '\n';
        } else if (bench_cmd->parsed()) {
            for (const auto& p : gdt::run_bench_config(bench.config, bench.out, bench.reps)) std::cout << p.string() << '\n';
        }
    } catch (const gdt::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
