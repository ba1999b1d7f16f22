#include "sgad/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace sgad {

namespace {

void check_scores(std::span<const double> scores, std::span<const int> labels) {
    if (scores.size() != labels.size())
        throw std::invalid_argument("metrics: score and label lengths differ");
    if (scores.empty()) throw std::invalid_argument("metrics: empty input");
    for (double s : scores)
        if (!std::isfinite(s)) throw std::invalid_argument("metrics: non-finite score");
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

double auc_roc(std::span<const double> scores, std::span<const int> labels) {
    check_scores(scores, labels);
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (int l : labels) n_pos += l != 0;
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0)
        throw std::invalid_argument("auc_roc: both classes must be present");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // rank sum of anomalies with average ranks for ties
    double pos_rank_sum = 0.0;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);  // 1-based ranks i+1..j
        for (std::size_t k = i; k < j; ++k)
            if (labels[order[k]] != 0) pos_rank_sum += avg_rank;
        i = j;
    }
    const double u = pos_rank_sum - static_cast<double>(n_pos) * (n_pos + 1) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double auc_pr(std::span<const double> scores, std::span<const int> labels) {
    check_scores(scores, labels);
    const std::size_t n = scores.size();
    std::size_t n_pos = 0;
    for (int l : labels) n_pos += l != 0;
    if (n_pos == 0) throw std::invalid_argument("auc_pr: at least one anomaly required");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return labels[a] < labels[b];  // pessimistic: normals ahead on ties
    });

    double ap = 0.0;
    std::size_t hits = 0;
    for (std::size_t rank = 1; rank <= n; ++rank) {
        if (labels[order[rank - 1]] != 0) {
            ++hits;
            ap += static_cast<double>(hits) / static_cast<double>(rank);
        }
    }
    return ap / static_cast<double>(n_pos);
}

double ks_statistic(std::span<const double> scores_normal,
                    std::span<const double> scores_abnormal) {
    if (scores_normal.empty() || scores_abnormal.empty())
        throw std::invalid_argument("ks_statistic: both samples must be nonempty");
    std::vector<double> a(scores_normal.begin(), scores_normal.end());
    std::vector<double> b(scores_abnormal.begin(), scores_abnormal.end());
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());

    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double best = 0.0;
    std::size_t ia = 0, ib = 0;
    while (ia < a.size() || ib < b.size()) {
        const double v = ia < a.size() && (ib >= b.size() || a[ia] <= b[ib]) ? a[ia] : b[ib];
        while (ia < a.size() && a[ia] <= v) ++ia;
        while (ib < b.size() && b[ib] <= v) ++ib;
        best = std::max(best, std::abs(static_cast<double>(ia) / na -
                                       static_cast<double>(ib) / nb));
    }
    return best;
}

std::array<std::optional<double>, 4> score_difference(std::span<const double> scores,
                                                      std::span<const int> labels,
                                                      std::span<const int> field_id) {
    if (scores.size() != labels.size() || scores.size() != field_id.size())
        throw std::invalid_argument("score_difference: length mismatch");
    std::array<double, 4> sum_a{}, sum_n{};
    std::array<std::size_t, 4> cnt_a{}, cnt_n{};
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const int f = field_id[i];
        if (f < 0 || f > 3) throw std::invalid_argument("score_difference: field_id out of range");
        if (labels[i] != 0) {
            sum_a[f] += scores[i];
            ++cnt_a[f];
        } else {
            sum_n[f] += scores[i];
            ++cnt_n[f];
        }
    }
    std::array<std::optional<double>, 4> out{};
    for (int f = 0; f < 4; ++f) {
        if (cnt_a[f] > 0 && cnt_n[f] > 0)
            out[f] = sum_a[f] / static_cast<double>(cnt_a[f]) -
                     sum_n[f] / static_cast<double>(cnt_n[f]);
    }
    return out;
}

Histogram histogram(std::span<const double> scores, std::span<const int> labels,
                    std::size_t n_bins) {
    check_scores(scores, labels);
    if (n_bins == 0) throw std::invalid_argument("histogram: n_bins must be positive");
    const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
    const double lo = *lo_it, hi = *hi_it;

    Histogram h;
    h.edges.resize(n_bins + 1);
    for (std::size_t i = 0; i <= n_bins; ++i)
        h.edges[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n_bins);
    h.normal_counts.assign(n_bins, 0);
    h.anomaly_counts.assign(n_bins, 0);

    const double width = hi - lo;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        std::size_t bin = 0;
        if (width > 0.0) {
            bin = static_cast<std::size_t>((scores[i] - lo) / width * static_cast<double>(n_bins));
            bin = std::min(bin, n_bins - 1);  // max lands in the last bin
        }
        if (labels[i] != 0)
            ++h.anomaly_counts[bin];
        else
            ++h.normal_counts[bin];
    }
    return h;
}

EvalReport evaluate_scores(std::span<const double> scores, std::span<const int> labels,
                           std::span<const int> field_id, std::size_t histogram_bins) {
    EvalReport report;
    report.auc_roc = auc_roc(scores, labels);
    report.auc_pr = auc_pr(scores, labels);

    std::vector<double> normal, abnormal;
    for (std::size_t i = 0; i < scores.size(); ++i)
        (labels[i] != 0 ? abnormal : normal).push_back(scores[i]);
    report.ks = ks_statistic(normal, abnormal);

    if (!field_id.empty()) {
        report.score_diffs = score_difference(scores, labels, field_id);
        report.has_score_diffs = true;
    }
    report.hist = histogram(scores, labels, histogram_bins);
    return report;
}

std::string to_text(const EvalReport& report) {
    std::string out;
    out += "auc_roc: " + format_double(report.auc_roc) + "\n";
    out += "auc_pr: " + format_double(report.auc_pr) + "\n";
    out += "ks: " + format_double(report.ks) + "\n";
    out += "score_diffs:";
    if (report.has_score_diffs) {
        for (int f = 0; f < 4; ++f) {
            out += " S" + std::to_string(f) + "=";
            out += report.score_diffs[f] ? format_double(*report.score_diffs[f]) : "absent";
        }
        out += "\n";
    } else {
        out += " absent\n";
    }
    out += "histogram: edges=";
    for (std::size_t i = 0; i < report.hist.edges.size(); ++i)
        out += (i == 0 ? "" : ",") + format_double(report.hist.edges[i]);
    out += " normal=";
    for (std::size_t i = 0; i < report.hist.normal_counts.size(); ++i)
        out += (i == 0 ? "" : ",") + std::to_string(report.hist.normal_counts[i]);
    out += " anomaly=";
    for (std::size_t i = 0; i < report.hist.anomaly_counts.size(); ++i)
        out += (i == 0 ? "" : ",") + std::to_string(report.hist.anomaly_counts[i]);
    out += "\n";
    return out;
}

}  // namespace sgad
