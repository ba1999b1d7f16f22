#include "sgad/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "sgad/matrix.hpp"

namespace sgad {

std::string to_string(Variant v) {
    switch (v) {
        case Variant::Original: return "original";
        case Variant::Recon: return "recon";
        case Variant::Normal: return "normal";
        case Variant::Lognormal: return "lognormal";
        case Variant::PlainAe: return "plain_ae";
    }
    throw std::logic_error("to_string: unknown variant");
}

Variant variant_from_string(const std::string& s) {
    if (s == "original") return Variant::Original;
    if (s == "recon") return Variant::Recon;
    if (s == "normal") return Variant::Normal;
    if (s == "lognormal") return Variant::Lognormal;
    if (s == "plain_ae") return Variant::PlainAe;
    throw std::invalid_argument("unknown variant: " + s);
}

void SgLossConfig::validate() const {
    if (lambda_se < 0.0 || lambda_a < 0.0)
        throw std::invalid_argument("SgLossConfig: lambda weights must be nonnegative");
    if (a <= 0.0) throw std::invalid_argument("SgLossConfig: a must be positive");
    if (mu0 <= 0.0 || mu0 >= a)
        throw std::invalid_argument("SgLossConfig: mu0 must lie in (0, a)");
    if (eps_p <= 0.0 || eps_p >= 1.0)
        throw std::invalid_argument("SgLossConfig: eps_p must lie strictly inside (0, 1)");
}

double reconstruction_loss(const Matrix& batch, const Matrix& reconstructions) {
    if (!batch.same_shape(reconstructions))
        throw std::invalid_argument("reconstruction_loss: shapes differ");
    if (batch.rows() == 0) throw std::invalid_argument("reconstruction_loss: empty batch");
    double total = 0.0;
    for (std::size_t i = 0; i < batch.rows(); ++i) {
        auto x = batch.row(i);
        auto xt = reconstructions.row(i);
        double sq = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double d = x[j] - xt[j];
            sq += d * d;
        }
        total += std::sqrt(sq);
    }
    return total / static_cast<double>(batch.rows());
}

double epsilon_from_percentile(std::span<const double> recon_errors, double eps_p) {
    if (recon_errors.empty())
        throw std::invalid_argument("epsilon_from_percentile: empty error list");
    if (eps_p <= 0.0 || eps_p >= 1.0)
        throw std::invalid_argument("epsilon_from_percentile: eps_p must lie in (0, 1)");
    const std::size_t n = recon_errors.size();
    // rank = ceil(eps_p * n), with a tolerance so that e.g. 0.8 * 10 lands on 8
    const double target = eps_p * static_cast<double>(n);
    std::size_t rank = static_cast<std::size_t>(std::ceil(target - 1e-9));
    rank = std::clamp<std::size_t>(rank, 1, n);
    std::vector<double> sorted(recon_errors.begin(), recon_errors.end());
    std::nth_element(sorted.begin(), sorted.begin() + (rank - 1), sorted.end());
    return sorted[rank - 1];
}

namespace {

struct BranchTerms {
    double normal_sum = 0.0;    // sum of |s - mu0| over normal-branch samples
    double abnormal_sum = 0.0;  // sum of max(0, a - s) over abnormal-branch samples
};

BranchTerms branch_terms(const std::vector<PerSampleForward>& samples, double eps,
                         const SgLossConfig& cfg, bool use_mu_head) {
    BranchTerms t;
    for (const auto& sample : samples) {
        const double s = use_mu_head ? sample.s_mu : sample.s;
        if (sample.recon_error < eps)
            t.normal_sum += std::abs(s - cfg.mu0);
        else
            t.abnormal_sum += std::max(0.0, cfg.a - s);
    }
    return t;
}

}  // namespace

double score_guided_loss(const std::vector<PerSampleForward>& samples, double eps,
                         const SgLossConfig& cfg) {
    if (cfg.variant != Variant::Original)
        throw std::invalid_argument("score_guided_loss: variant must be original");
    if (!std::isfinite(eps)) throw std::invalid_argument("score_guided_loss: eps not finite");
    if (samples.empty()) return 0.0;
    const auto t = branch_terms(samples, eps, cfg, false);
    return (t.normal_sum + cfg.lambda_a * t.abnormal_sum) / static_cast<double>(samples.size());
}

double decomposed_loss(const std::vector<PerSampleForward>& samples, double eps,
                       const SgLossConfig& cfg, double lambda_normal, double lambda_abnormal) {
    if (!std::isfinite(eps)) throw std::invalid_argument("decomposed_loss: eps not finite");
    if (samples.empty()) return 0.0;
    const auto t = branch_terms(samples, eps, cfg, false);
    const double n = static_cast<double>(samples.size());
    return lambda_normal * (t.normal_sum / n) + lambda_abnormal * (t.abnormal_sum / n);
}

double kl_unit_divergence(double mu, double sigma) {
    if (sigma <= 0.0) throw std::logic_error("kl_unit_divergence: sigma must be positive");
    return std::log(1.0 / sigma) + (sigma * sigma + mu * mu) / 2.0 - 0.5;
}

double kl_score_loss(const std::vector<PerSampleForward>& samples, double eps,
                     const SgLossConfig& cfg) {
    if (cfg.variant != Variant::Normal && cfg.variant != Variant::Lognormal)
        throw std::invalid_argument("kl_score_loss: variant must be normal or lognormal");
    if (!std::isfinite(eps)) throw std::invalid_argument("kl_score_loss: eps not finite");
    if (samples.empty()) return 0.0;
    double total = 0.0;
    for (const auto& sample : samples) {
        if (sample.recon_error < eps)
            total += kl_unit_divergence(sample.s_mu, sample.s_sigma);
        else
            total += cfg.lambda_a * std::max(0.0, cfg.a - sample.s_mu);
    }
    return total / static_cast<double>(samples.size());
}

}  // namespace sgad
