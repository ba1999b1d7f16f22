#include "sgad/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "sgad/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sgad {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp + " for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("write to " + tmp + " failed");
    }
    fs::rename(tmp, path);
}

Aggregate aggregate_of(const std::vector<double>& values) {
    Aggregate agg;
    if (values.empty()) return agg;
    for (double v : values) agg.mean += v;
    agg.mean /= static_cast<double>(values.size());
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - agg.mean) * (v - agg.mean);
        agg.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return agg;
}

// --- config parsing ----------------------------------------------------------

namespace {

[[noreturn]] void config_error(const std::string& msg) {
    throw std::invalid_argument("config: " + msg);
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

std::vector<std::size_t> get_widths(const json& j, const char* key) {
    std::vector<std::size_t> widths = j.at(key).get<std::vector<std::size_t>>();
    if (widths.empty()) config_error(std::string(key) + " must be nonempty");
    return widths;
}

ModelConfig parse_model(const json& j) {
    ModelConfig mc;
    mc.loss.variant = variant_from_string(get_or<std::string>(j, "variant", "original"));
    mc.loss.lambda_se = get_or(j, "lambda_se", mc.loss.lambda_se);
    mc.loss.lambda_a = get_or(j, "lambda_a", mc.loss.lambda_a);
    mc.loss.a = get_or(j, "a", mc.loss.a);
    mc.loss.mu0 = get_or(j, "mu0", mc.loss.mu0);
    mc.loss.eps_p = get_or(j, "eps_p", mc.loss.eps_p);
    mc.loss.validate();
    mc.preset = get_or<std::string>(j, "preset", "simulation");
    if (mc.preset != "simulation" && mc.preset != "tabular")
        config_error("model.preset must be 'simulation' or 'tabular'");
    if (j.contains("encoder_widths")) mc.encoder_widths = get_widths(j, "encoder_widths");
    if (j.contains("scorer_widths")) mc.scorer_widths = get_widths(j, "scorer_widths");
    const std::string mode = get_or<std::string>(j, "epsilon_mode", "batch");
    if (mode == "batch")
        mc.epsilon_mode = EpsilonMode::PerBatch;
    else if (mode == "epoch")
        mc.epsilon_mode = EpsilonMode::PerEpoch;
    else
        config_error("model.epsilon_mode must be 'batch' or 'epoch'");
    return mc;
}

DataConfig parse_data(const json& j) {
    DataConfig dc;
    if (j.contains("synthetic") == j.contains("csv"))
        config_error("data must hold exactly one of 'synthetic' or 'csv'");
    if (j.contains("synthetic")) {
        const json& s = j.at("synthetic");
        SyntheticSpec spec;
        spec.family = synthetic_family_from_string(get_or<std::string>(s, "family", "gauss1d"));
        spec.mu_normal = get_or(s, "mu_normal", spec.mu_normal);
        spec.mu_abnormal = get_or(s, "mu_abnormal", spec.mu_abnormal);
        spec.sigma = get_or(s, "sigma", spec.sigma);
        spec.n_samples = get_or(s, "n_samples", spec.n_samples);
        spec.anomaly_ratio = get_or(s, "anomaly_ratio", spec.anomaly_ratio);
        spec.validate();
        dc.synthetic = spec;
    } else {
        const json& c = j.at("csv");
        CsvDataConfig csv;
        csv.path = c.at("path").get<std::string>();
        if (!fs::exists(csv.path)) config_error("data.csv.path does not exist: " + csv.path);
        csv.spec.numeric_columns =
            get_or(c, "numeric_columns", std::vector<std::string>{});
        csv.spec.categorical_columns =
            get_or(c, "categorical_columns", std::vector<std::string>{});
        if (!c.contains("label_column")) config_error("data.csv.label_column required");
        csv.spec.label_column = c.at("label_column").get<std::string>();
        csv.spec.drop_duplicates = get_or(c, "drop_duplicates", csv.spec.drop_duplicates);
        csv.spec.drop_missing = get_or(c, "drop_missing", csv.spec.drop_missing);
        csv.spec.noise_sample_rate = get_or(c, "noise_sample_rate", csv.spec.noise_sample_rate);
        csv.spec.noise_feature_rate = get_or(c, "noise_feature_rate", csv.spec.noise_feature_rate);
        if (c.contains("split")) {
            const auto split = c.at("split").get<std::vector<double>>();
            if (split.size() != 3) config_error("data.csv.split needs three fractions");
            csv.spec.split = {split[0], split[1], split[2]};
        }
        csv.spec.validate();
        dc.csv = csv;
    }
    return dc;
}

ScheduleConfig parse_schedule(const json& j) {
    ScheduleConfig sc;
    sc.epochs = get_or(j, "epochs", sc.epochs);
    sc.batch_size = get_or(j, "batch_size", sc.batch_size);
    sc.learning_rate = get_or(j, "learning_rate", sc.learning_rate);
    sc.seed = get_or(j, "seed", sc.seed);
    sc.n_runs = get_or(j, "n_runs", sc.n_runs);
    if (sc.epochs < 1) config_error("schedule.epochs must be at least 1");
    if (sc.batch_size < 1) config_error("schedule.batch_size must be at least 1");
    if (sc.learning_rate <= 0.0) config_error("schedule.learning_rate must be positive");
    if (sc.n_runs < 1) config_error("schedule.n_runs must be at least 1");
    return sc;
}

SweepConfig parse_sweep(const json& j) {
    SweepConfig sw;
    const bool has_eps_a = j.contains("eps_p") && j.contains("a");
    const bool has_lambda = j.contains("lambda_se") && j.contains("lambda_a");
    if (has_eps_a == has_lambda)
        config_error("sweep must hold exactly one grid: (eps_p, a) or (lambda_se, lambda_a)");
    if (has_eps_a) {
        sw.kind = "eps_p_a";
        sw.first = j.at("eps_p").get<std::vector<double>>();
        sw.second = j.at("a").get<std::vector<double>>();
    } else {
        sw.kind = "lambda";
        sw.first = j.at("lambda_se").get<std::vector<double>>();
        sw.second = j.at("lambda_a").get<std::vector<double>>();
    }
    if (sw.first.empty() || sw.second.empty()) config_error("sweep grid must be nonempty");
    return sw;
}

RateConfig parse_rates(const json& j) {
    RateConfig rc;
    rc.rates = j.at("values").get<std::vector<double>>();
    if (rc.rates.empty()) config_error("rates.values must be nonempty");
    const auto names =
        get_or(j, "variants", std::vector<std::string>{"original", "plain_ae"});
    for (const auto& name : names) rc.variants.push_back(variant_from_string(name));
    if (rc.variants.empty()) config_error("rates.variants must be nonempty");
    return rc;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        config_error(std::string("invalid JSON: ") + e.what());
    }
    ExperimentConfig cfg;
    try {
        if (!j.contains("data")) config_error("data block required");
        cfg.data = parse_data(j.at("data"));
        if (j.contains("model")) cfg.model = parse_model(j.at("model"));
        if (j.contains("schedule")) cfg.schedule = parse_schedule(j.at("schedule"));
        if (j.contains("output")) {
            cfg.output.dir = get_or<std::string>(j.at("output"), "dir", cfg.output.dir);
            cfg.output.histogram_bins =
                get_or(j.at("output"), "histogram_bins", cfg.output.histogram_bins);
            if (cfg.output.histogram_bins < 1) config_error("output.histogram_bins must be >= 1");
        }
        if (j.contains("sweep")) cfg.sweep = parse_sweep(j.at("sweep"));
        if (j.contains("rates")) cfg.rates = parse_rates(j.at("rates"));
    } catch (const json::exception& e) {
        config_error(e.what());
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    json& m = j["model"];
    m["variant"] = to_string(cfg.model.loss.variant);
    m["lambda_se"] = cfg.model.loss.lambda_se;
    m["lambda_a"] = cfg.model.loss.lambda_a;
    m["a"] = cfg.model.loss.a;
    m["mu0"] = cfg.model.loss.mu0;
    m["eps_p"] = cfg.model.loss.eps_p;
    m["preset"] = cfg.model.preset;
    if (cfg.model.encoder_widths) m["encoder_widths"] = *cfg.model.encoder_widths;
    if (cfg.model.scorer_widths) m["scorer_widths"] = *cfg.model.scorer_widths;
    m["epsilon_mode"] = cfg.model.epsilon_mode == EpsilonMode::PerBatch ? "batch" : "epoch";

    json& d = j["data"];
    if (cfg.data.synthetic) {
        const auto& s = *cfg.data.synthetic;
        d["synthetic"] = {{"family", to_string(s.family)},
                          {"mu_normal", s.mu_normal},
                          {"mu_abnormal", s.mu_abnormal},
                          {"sigma", s.sigma},
                          {"n_samples", s.n_samples},
                          {"anomaly_ratio", s.anomaly_ratio}};
    } else if (cfg.data.csv) {
        const auto& c = *cfg.data.csv;
        d["csv"] = {{"path", c.path},
                    {"numeric_columns", c.spec.numeric_columns},
                    {"categorical_columns", c.spec.categorical_columns},
                    {"label_column", c.spec.label_column},
                    {"drop_duplicates", c.spec.drop_duplicates},
                    {"drop_missing", c.spec.drop_missing},
                    {"noise_sample_rate", c.spec.noise_sample_rate},
                    {"noise_feature_rate", c.spec.noise_feature_rate},
                    {"split", std::vector<double>{c.spec.split[0], c.spec.split[1],
                                                  c.spec.split[2]}}};
    }

    j["schedule"] = {{"epochs", cfg.schedule.epochs},
                     {"batch_size", cfg.schedule.batch_size},
                     {"learning_rate", cfg.schedule.learning_rate},
                     {"seed", cfg.schedule.seed},
                     {"n_runs", cfg.schedule.n_runs}};
    j["output"] = {{"dir", cfg.output.dir}, {"histogram_bins", cfg.output.histogram_bins}};
    if (cfg.sweep) {
        json& sw = j["sweep"];
        if (cfg.sweep->kind == "eps_p_a") {
            sw["eps_p"] = cfg.sweep->first;
            sw["a"] = cfg.sweep->second;
        } else {
            sw["lambda_se"] = cfg.sweep->first;
            sw["lambda_a"] = cfg.sweep->second;
        }
    }
    if (cfg.rates) {
        std::vector<std::string> names;
        for (Variant v : cfg.rates->variants) names.push_back(to_string(v));
        j["rates"] = {{"values", cfg.rates->rates}, {"variants", names}};
    }
    return j.dump(2) + "\n";
}

// --- single runs --------------------------------------------------------------

namespace {

struct SingleRun {
    RunResult result;
    SgaeModel model;
    std::vector<double> scores;
    std::vector<int> labels;
};

std::string sanitize_dir_name(std::string name) {
    for (char& c : name)
        if (c == '=' || c == ',' || c == '/' || c == '\\' || c == ' ') c = '_';
    return name;
}

SgaeModel build_model(const ModelConfig& mc, std::size_t input_dim, std::uint64_t seed,
                      std::optional<Variant> variant_override) {
    SgLossConfig loss = mc.loss;
    if (variant_override) loss.variant = *variant_override;
    LayerPreset preset =
        mc.preset == "tabular" ? tabular_preset(input_dim) : simulation_preset(input_dim);
    if (mc.encoder_widths) preset.encoder_widths = *mc.encoder_widths;
    if (mc.scorer_widths) preset.scorer_widths = *mc.scorer_widths;
    return make_sgae(input_dim, preset, loss, seed);
}

TrainSchedule build_schedule(const ExperimentConfig& cfg, std::uint64_t run_seed) {
    TrainSchedule schedule;
    schedule.epochs = cfg.schedule.epochs;
    schedule.batch_size = cfg.schedule.batch_size;
    schedule.learning_rate = cfg.schedule.learning_rate;
    schedule.seed = derive_seed(run_seed, 5);
    schedule.epsilon_mode = cfg.model.epsilon_mode;
    return schedule;
}

// Simulation protocol: independent train and test sets, field partition on
// the test set, score differences traced per epoch. The training set doubles
// as the validation set (the protocol defines no separate one).
SingleRun run_simulate_once(const ExperimentConfig& cfg, std::uint64_t run_seed) {
    SyntheticSpec train_spec = *cfg.data.synthetic;
    train_spec.seed = derive_seed(run_seed, 1);
    SyntheticSpec test_spec = *cfg.data.synthetic;
    test_spec.seed = derive_seed(run_seed, 2);

    const LabeledDataset train_set = generate_synthetic(train_spec);
    LabeledDataset test = generate_synthetic(test_spec);
    test = partition_fields(std::move(test), test_spec.mu_normal, test_spec.sigma);

    SingleRun run;
    run.result.seed = run_seed;
    run.model = build_model(cfg.model, train_set.features.cols(), derive_seed(run_seed, 4), {});
    run.result.trace = train(run.model, train_set.features, train_set.features,
                             build_schedule(cfg, run_seed), &test);
    run.scores = predict_scores(run.model, test.features);
    run.labels = test.labels;
    run.result.report =
        evaluate_scores(run.scores, run.labels, test.field_id, cfg.output.histogram_bins);
    return run;
}

// Evaluation protocol: split into train/val/test, inject swap noise into the
// training split, train, and score the test split.
SingleRun run_evaluate_once(const ExperimentConfig& cfg, std::uint64_t run_seed,
                            std::optional<double> subsample_rate,
                            std::optional<Variant> variant_override, const RawTable* table) {
    const std::uint64_t split_seed = derive_seed(run_seed, 1);
    LabeledDataset full;
    double noise_sample_rate = 0.01, noise_feature_rate = 0.05;
    std::array<double, 3> fractions = {0.6, 0.2, 0.2};
    if (cfg.data.synthetic) {
        SyntheticSpec spec = *cfg.data.synthetic;
        spec.seed = derive_seed(run_seed, 0);
        full = generate_synthetic(spec);
        full = partition_fields(std::move(full), spec.mu_normal, spec.sigma);
    } else {
        PreprocessSpec spec = cfg.data.csv->spec;
        spec.seed = split_seed;
        full = preprocess(*table, spec);
        noise_sample_rate = spec.noise_sample_rate;
        noise_feature_rate = spec.noise_feature_rate;
        fractions = spec.split;
    }

    SplitDataset splits = split_dataset(full, fractions, split_seed);
    if (subsample_rate) {
        const double native = anomaly_rate(full);
        if (*subsample_rate > native + 1e-9)
            throw std::invalid_argument("rate " + format_double(*subsample_rate) +
                                        " above the dataset's native anomaly rate " +
                                        format_double(native));
        // the split's realized rate fluctuates around the native rate; a
        // target at the native rate keeps the training split untouched
        const double split_rate = anomaly_rate(splits.train);
        const double effective = std::min(*subsample_rate, split_rate);
        if (effective * static_cast<double>(splits.train.size()) >= 1.0)
            splits.train =
                subsample_anomaly_rate(splits.train, effective, derive_seed(run_seed, 2));
    }
    splits.train =
        inject_noise(splits.train, noise_sample_rate, noise_feature_rate, derive_seed(run_seed, 3));

    SingleRun run;
    run.result.seed = run_seed;
    run.model = build_model(cfg.model, full.features.cols(), derive_seed(run_seed, 4),
                            variant_override);
    run.result.trace = train(run.model, splits.train.features, splits.val.features,
                             build_schedule(cfg, run_seed), nullptr);
    run.scores = predict_scores(run.model, splits.test.features);
    run.labels = splits.test.labels;
    run.result.report = evaluate_scores(run.scores, run.labels, splits.test.field_id,
                                        cfg.output.histogram_bins);
    return run;
}

// --- artifact writing ---------------------------------------------------------

std::string run_dir_name(std::size_t run_index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "run_%03zu", run_index);
    return buf;
}

std::string trace_csv(const TrainTrace& trace) {
    std::string out = "epoch,train_loss,val_loss,S0,S1,S2,S3\n";
    for (std::size_t e = 0; e < trace.epochs.size(); ++e) {
        const auto& es = trace.epochs[e];
        out += std::to_string(e + 1) + ',' + format_double(es.train_loss) + ',' +
               format_double(es.val_loss);
        for (int f = 0; f < 4; ++f) {
            out += ',';
            if (es.has_score_diff && es.score_diff[f]) out += format_double(*es.score_diff[f]);
        }
        out += '\n';
    }
    return out;
}

std::string scores_csv(const std::vector<double>& scores, const std::vector<int>& labels) {
    std::string out = "sample_id,score,label\n";
    for (std::size_t i = 0; i < scores.size(); ++i)
        out += std::to_string(i) + ',' + format_double(scores[i]) + ',' +
               std::to_string(labels[i]) + '\n';
    return out;
}

std::string histogram_csv(const Histogram& hist) {
    std::string out = "bin_lo,bin_hi,normal_count,anomaly_count\n";
    for (std::size_t b = 0; b < hist.normal_counts.size(); ++b)
        out += format_double(hist.edges[b]) + ',' + format_double(hist.edges[b + 1]) + ',' +
               std::to_string(hist.normal_counts[b]) + ',' +
               std::to_string(hist.anomaly_counts[b]) + '\n';
    return out;
}

void write_run_artifacts(const std::string& dir, const SingleRun& run) {
    fs::create_directories(dir);
    atomic_write(dir + "/report.txt", to_text(run.result.report));
    atomic_write(dir + "/trace.csv", trace_csv(run.result.trace));
    atomic_write(dir + "/scores.csv", scores_csv(run.scores, run.labels));
    atomic_write(dir + "/histogram.csv", histogram_csv(run.result.report.hist));
    const std::string tmp = dir + "/model.ckpt.tmp";
    save_checkpoint(run.model, tmp);
    fs::rename(tmp, dir + "/model.ckpt");
}

RunArtifact assemble_artifact(const std::string& out_dir, const std::string& command,
                              std::vector<RunResult> runs) {
    RunArtifact artifact;
    artifact.out_dir = out_dir;
    artifact.runs = std::move(runs);

    std::vector<double> roc, pr, ks;
    for (const auto& run : artifact.runs) {
        roc.push_back(run.report.auc_roc);
        pr.push_back(run.report.auc_pr);
        ks.push_back(run.report.ks);
    }
    artifact.aggregates["auc_roc"] = aggregate_of(roc);
    artifact.aggregates["auc_pr"] = aggregate_of(pr);
    artifact.aggregates["ks"] = aggregate_of(ks);

    std::string report = "command: " + command + "\n";
    report += "runs: " + std::to_string(artifact.runs.size()) + "\n";
    for (const auto& [key, agg] : artifact.aggregates) {
        report += key + "_mean: " + format_double(agg.mean) + "\n";
        report += key + "_std: " + format_double(agg.stddev) + "\n";
    }
    for (std::size_t i = 0; i < artifact.runs.size(); ++i) {
        const auto& run = artifact.runs[i];
        const std::string prefix = run_dir_name(i);
        report += prefix + ".seed: " + std::to_string(run.seed) + "\n";
        report += prefix + ".auc_roc: " + format_double(run.report.auc_roc) + "\n";
        report += prefix + ".auc_pr: " + format_double(run.report.auc_pr) + "\n";
        report += prefix + ".ks: " + format_double(run.report.ks) + "\n";
        report += prefix + ".best_epoch: " + std::to_string(run.trace.best_epoch + 1) + "\n";
    }
    atomic_write(out_dir + "/report.txt", report);
    return artifact;
}

RunArtifact run_command(const ExperimentConfig& cfg, const std::string& command,
                        const std::string& out_dir) {
    fs::create_directories(out_dir);
    atomic_write(out_dir + "/config.json", config_to_json(cfg));

    const RawTable* table = nullptr;
    RawTable loaded;
    if (cfg.data.csv) {
        loaded = load_csv(cfg.data.csv->path, cfg.data.csv->spec);
        table = &loaded;
    }

    std::vector<RunResult> runs;
    for (std::size_t i = 0; i < cfg.schedule.n_runs; ++i) {
        const std::uint64_t run_seed = cfg.schedule.seed + i;
        SingleRun run = command == "simulate"
                            ? run_simulate_once(cfg, run_seed)
                            : run_evaluate_once(cfg, run_seed, {}, {}, table);
        write_run_artifacts(out_dir + "/runs/" + run_dir_name(i), run);
        runs.push_back(std::move(run.result));
    }
    return assemble_artifact(out_dir, command, std::move(runs));
}

}  // namespace

RunArtifact cmd_simulate(const ExperimentConfig& cfg) {
    if (!cfg.data.synthetic)
        throw std::invalid_argument("simulate: data block must be synthetic");
    return run_command(cfg, "simulate", cfg.output.dir);
}

RunArtifact cmd_evaluate(const ExperimentConfig& cfg) {
    return run_command(cfg, "evaluate", cfg.output.dir);
}

RunArtifact cmd_sweep(const ExperimentConfig& cfg) {
    if (!cfg.sweep) throw std::invalid_argument("sweep: config has no sweep block");
    const auto& sw = *cfg.sweep;
    fs::create_directories(cfg.output.dir);
    atomic_write(cfg.output.dir + "/config.json", config_to_json(cfg));

    RunArtifact artifact;
    artifact.out_dir = cfg.output.dir;

    const std::string first_name = sw.kind == "eps_p_a" ? "eps_p" : "lambda_se";
    const std::string second_name = sw.kind == "eps_p_a" ? "a" : "lambda_a";

    std::string heatmap = first_name + "\\" + second_name;
    for (double v : sw.second) heatmap += ',' + format_double(v);
    heatmap += '\n';

    for (std::size_t i = 0; i < sw.first.size(); ++i) {
        heatmap += format_double(sw.first[i]);
        for (std::size_t k = 0; k < sw.second.size(); ++k) {
            ExperimentConfig cell = cfg;
            cell.sweep.reset();
            if (sw.kind == "eps_p_a") {
                cell.model.loss.eps_p = sw.first[i];
                cell.model.loss.a = sw.second[k];
            } else {
                cell.model.loss.lambda_se = sw.first[i];
                cell.model.loss.lambda_a = sw.second[k];
            }
            cell.model.loss.validate();
            const std::string cell_dir = cfg.output.dir + "/cells/cell_" + std::to_string(i) +
                                         "_" + std::to_string(k);
            cell.output.dir = cell_dir;
            const RunArtifact cell_artifact = run_command(cell, "evaluate", cell_dir);
            const Aggregate agg = cell_artifact.aggregates.at("auc_roc");
            heatmap += ',' + format_double(agg.mean);
            artifact.aggregates[first_name + "=" + format_double(sw.first[i]) + "," + second_name +
                                "=" + format_double(sw.second[k]) + ".auc_roc"] = agg;
        }
        heatmap += '\n';
    }
    atomic_write(cfg.output.dir + "/heatmap.csv", heatmap);
    return artifact;
}

RunArtifact cmd_rate(const ExperimentConfig& cfg) {
    if (!cfg.rates) throw std::invalid_argument("rate: config has no rates block");
    const auto& rc = *cfg.rates;
    fs::create_directories(cfg.output.dir);
    atomic_write(cfg.output.dir + "/config.json", config_to_json(cfg));

    const RawTable* table = nullptr;
    RawTable loaded;
    if (cfg.data.csv) {
        loaded = load_csv(cfg.data.csv->path, cfg.data.csv->spec);
        table = &loaded;
    }

    RunArtifact artifact;
    artifact.out_dir = cfg.output.dir;

    std::string rates_csv = "rate,variant,auc_roc_mean,auc_roc_std,error\n";
    for (std::size_t r = 0; r < rc.rates.size(); ++r) {
        for (Variant variant : rc.variants) {
            const std::string key =
                "rate=" + format_double(rc.rates[r]) + "," + to_string(variant);
            std::string error;
            std::vector<double> roc;
            for (std::size_t i = 0; i < cfg.schedule.n_runs && error.empty(); ++i) {
                const std::uint64_t run_seed = cfg.schedule.seed + i;
                try {
                    SingleRun run =
                        run_evaluate_once(cfg, run_seed, rc.rates[r], variant, table);
                    const std::string dir = cfg.output.dir + "/" + sanitize_dir_name(key) + "/" +
                                            run_dir_name(i);
                    write_run_artifacts(dir, run);
                    roc.push_back(run.result.report.auc_roc);
                } catch (const std::invalid_argument& e) {
                    error = e.what();  // e.g. rate above the split's native rate
                }
            }
            rates_csv += format_double(rc.rates[r]) + ',' + to_string(variant) + ',';
            if (error.empty()) {
                const Aggregate agg = aggregate_of(roc);
                artifact.aggregates[key + ".auc_roc"] = agg;
                rates_csv += format_double(agg.mean) + ',' + format_double(agg.stddev) + ",\n";
            } else {
                rates_csv += ",,\"" + error + "\"\n";
            }
        }
    }
    atomic_write(cfg.output.dir + "/rates.csv", rates_csv);
    return artifact;
}

}  // namespace sgad
