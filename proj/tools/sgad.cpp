#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "sgad/experiment.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> runs;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config (JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&args](std::uint64_t v) { args.seed = v; }, "base seed (overrides config)");
    cmd->add_option_function<std::size_t>(
        "--runs", [&args](std::size_t v) { args.runs = v; },
        "number of runs (overrides config)");
}

sgad::ExperimentConfig load_config(const CommonArgs& args) {
    sgad::ExperimentConfig cfg = sgad::parse_config_file(args.config_path);
    if (!args.out_dir.empty()) cfg.output.dir = args.out_dir;
    if (args.seed) cfg.schedule.seed = *args.seed;
    if (args.runs) cfg.schedule.n_runs = *args.runs;
    return cfg;
}

void print_aggregates(const sgad::RunArtifact& artifact) {
    for (const auto& [key, agg] : artifact.aggregates)
        std::cout << key << ": " << sgad::format_double(agg.mean) << " +- "
                  << sgad::format_double(agg.stddev) << "\n";
    std::cout << "artifacts: " << artifact.out_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"score-guided anomaly detection experiment runner"};
    app.require_subcommand(1);

    CommonArgs simulate_args, evaluate_args, sweep_args, rate_args;
    CLI::App* simulate = app.add_subcommand(
        "simulate", "synthetic-data run tracing per-field score differences");
    add_common(simulate, simulate_args);
    CLI::App* evaluate =
        app.add_subcommand("evaluate", "full pipeline: preprocess, train, score, report");
    add_common(evaluate, evaluate_args);
    CLI::App* sweep = app.add_subcommand("sweep", "two-parameter grid of evaluate runs");
    add_common(sweep, sweep_args);
    CLI::App* rate =
        app.add_subcommand("rate", "evaluate across training anomaly rates per variant");
    add_common(rate, rate_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (simulate->parsed()) {
            print_aggregates(sgad::cmd_simulate(load_config(simulate_args)));
        } else if (evaluate->parsed()) {
            print_aggregates(sgad::cmd_evaluate(load_config(evaluate_args)));
        } else if (sweep->parsed()) {
            print_aggregates(sgad::cmd_sweep(load_config(sweep_args)));
        } else if (rate->parsed()) {
            print_aggregates(sgad::cmd_rate(load_config(rate_args)));
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
