#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sgad/dataset.hpp"
#include "sgad/metrics.hpp"
#include "sgad/model.hpp"
#include "sgad/tabular.hpp"

namespace sgad {

struct ModelConfig {
    SgLossConfig loss;
    std::string preset = "simulation";  // "simulation" or "tabular"
    std::optional<std::vector<std::size_t>> encoder_widths;
    std::optional<std::vector<std::size_t>> scorer_widths;
    EpsilonMode epsilon_mode = EpsilonMode::PerBatch;
};

struct CsvDataConfig {
    std::string path;
    PreprocessSpec spec;
};

struct DataConfig {
    std::optional<SyntheticSpec> synthetic;
    std::optional<CsvDataConfig> csv;
};

struct ScheduleConfig {
    std::size_t epochs = 100;
    std::size_t batch_size = 1024;
    double learning_rate = 1e-4;
    std::uint64_t seed = 0;
    std::size_t n_runs = 1;
};

struct OutputConfig {
    std::string dir = "out";
    std::size_t histogram_bins = 50;
};

struct SweepConfig {
    // exactly one two-parameter grid: (eps_p, a) or (lambda_se, lambda_a)
    std::string kind;  // "eps_p_a" or "lambda"
    std::vector<double> first;
    std::vector<double> second;
};

struct RateConfig {
    std::vector<double> rates;
    std::vector<Variant> variants;
};

struct ExperimentConfig {
    ModelConfig model;
    DataConfig data;
    ScheduleConfig schedule;
    OutputConfig output;
    std::optional<SweepConfig> sweep;
    std::optional<RateConfig> rates;
};

// Parses and validates the JSON config document; referenced files must exist.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);

struct RunResult {
    std::uint64_t seed = 0;
    EvalReport report;
    TrainTrace trace;
};

struct Aggregate {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation, 0 for a single run
};
Aggregate aggregate_of(const std::vector<double>& values);

struct RunArtifact {
    std::string out_dir;
    std::vector<RunResult> runs;
    std::map<std::string, Aggregate> aggregates;  // auc_roc, auc_pr, ks
};

// Per-run seeds are schedule.seed + run_index. Every command snapshots its
// effective config into the output directory and writes per-run artifacts
// (report.txt, trace.csv, scores.csv, histogram.csv, model.ckpt) plus an
// aggregate report.txt; all files are written atomically and are bitwise
// reproducible from the config snapshot.
RunArtifact cmd_simulate(const ExperimentConfig& config);
RunArtifact cmd_evaluate(const ExperimentConfig& config);

// One evaluate per grid cell; emits heatmap.csv (mean AUC-ROC per cell).
RunArtifact cmd_sweep(const ExperimentConfig& config);

// Per-rate training-split subsampling for each configured variant; emits
// rates.csv. Rates above the training split's native anomaly rate produce an
// error row, the remaining rates still run.
RunArtifact cmd_rate(const ExperimentConfig& config);

// Writes content to path via a temporary file and rename.
void atomic_write(const std::string& path, const std::string& content);

std::string format_double(double v);

}  // namespace sgad
