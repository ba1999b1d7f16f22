#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sgad {

// Probability that a random anomaly outranks a random normal, ties counted
// half (the rank-sum form of the ROC area). Both classes must be present.
double auc_roc(std::span<const double> scores, std::span<const int> labels);

// Average precision with step interpolation. Ties are broken pessimistically:
// equal-scored normals rank ahead of anomalies. At least one anomaly required.
double auc_pr(std::span<const double> scores, std::span<const int> labels);

// Two-sample Kolmogorov-Smirnov statistic, computed exactly over the merged
// sample points.
double ks_statistic(std::span<const double> scores_normal,
                    std::span<const double> scores_abnormal);

// Per-field difference between mean anomaly and mean normal scores. Fields
// missing either class are reported absent.
std::array<std::optional<double>, 4> score_difference(std::span<const double> scores,
                                                      std::span<const int> labels,
                                                      std::span<const int> field_id);

// Shared equal-width bins spanning [min, max] of all scores, counted per
// class. A degenerate range puts all mass in the first bin.
struct Histogram {
    std::vector<double> edges;  // n_bins + 1 ascending edges
    std::vector<std::size_t> normal_counts;
    std::vector<std::size_t> anomaly_counts;
};
Histogram histogram(std::span<const double> scores, std::span<const int> labels,
                    std::size_t n_bins);

struct EvalReport {
    double auc_roc = 0.0;
    double auc_pr = 0.0;
    double ks = 0.0;
    std::array<std::optional<double>, 4> score_diffs{};
    bool has_score_diffs = false;
    Histogram hist;
};

EvalReport evaluate_scores(std::span<const double> scores, std::span<const int> labels,
                           std::span<const int> field_id, std::size_t histogram_bins);

// Stable key-value rendering (keys: auc_roc, auc_pr, ks, score_diffs, histogram).
std::string to_text(const EvalReport& report);

}  // namespace sgad
