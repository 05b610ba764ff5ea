// Command-line front end: runs one experiment family per invocation, driven by
// a JSON config file. Exit codes: 0 ok, 1 runtime failure, 2 bad usage/config,
// 3 invariant violation (only with --assert-invariants).
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "plth/experiments.hpp"

namespace {

nlohmann::json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw plth::ConfigError(path + ": cannot open config file");
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw plth::ConfigError(path + ": " + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"perturbed subset-sum, growth dynamics, network construction, and "
                 "train/prune experiments"};
    app.require_subcommand(1);

    std::string config_path;
    plth::RunOptions opts;
    long long seed_flag = -1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "path to a JSON config file")->required();
        sub->add_option("--seed", seed_flag, "override the config's seed(s)");
        sub->add_option("--out", opts.out_dir, "output directory (default: out)");
        sub->add_option("--workers", opts.workers,
                        "worker threads, 0 = all hardware threads");
        sub->add_flag("--assert-invariants", opts.assert_invariants,
                      "exit 3 if a checked invariant fails");
    };

    CLI::App* sub_subsetsum =
        app.add_subcommand("subsetsum", "minimal-width search for perturbed subset-sum");
    CLI::App* sub_theory =
        app.add_subcommand("theory", "growth-dynamics trajectories and expectation checks");
    CLI::App* sub_construct =
        app.add_subcommand("construct", "prune-and-perturb approximation of a target network");
    CLI::App* sub_train = app.add_subcommand("train", "box-constrained training plus pruning sweep");
    for (CLI::App* sub : {sub_subsetsum, sub_theory, sub_construct, sub_train}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (seed_flag >= 0) opts.seed_override = static_cast<std::uint64_t>(seed_flag);
        nlohmann::json cfg = load_config(config_path);
        if (sub_subsetsum->parsed()) return plth::run_subsetsum(cfg, opts);
        if (sub_theory->parsed()) return plth::run_theory(cfg, opts);
        if (sub_construct->parsed()) return plth::run_construct(cfg, opts);
        return plth::run_train(cfg, opts);
    } catch (const plth::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
