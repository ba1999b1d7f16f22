#pragma once

#include <span>
#include <string>
#include <vector>

namespace sgad {

// Loss variants. Original learns a scalar anomaly score; Recon applies the
// score guidance to the reconstruction error itself (no scoring network);
// Normal / Lognormal learn a score distribution (mu, sigma) matched against a
// unit reference by KL divergence; PlainAe trains on reconstruction loss only.
enum class Variant { Original, Recon, Normal, Lognormal, PlainAe };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct SgLossConfig {
    double lambda_se = 0.01;  // weight of the score-guidance term
    double lambda_a = 18.0;   // weight of the suspected-abnormal branch
    double a = 6.0;           // target score for suspected-abnormal samples
    double mu0 = 0.01;        // target score for obvious-normal samples
    double eps_p = 0.8;       // percentile selecting the branch threshold
    Variant variant = Variant::Original;

    void validate() const;
};

// One row of a model forward pass.
struct PerSampleForward {
    std::vector<double> z;        // latent representation
    std::vector<double> x_tilde;  // reconstruction
    double s = 0.0;               // anomaly score (Original)
    double s_mu = 0.0;            // score mean (Normal / Lognormal)
    double s_sigma = 1.0;         // score stddev, positive (Normal / Lognormal)
    double recon_error = 0.0;     // ||x - x_tilde||_2
};

// Mean of the per-sample Euclidean reconstruction norms (not squared).
double reconstruction_loss(const class Matrix& batch, const class Matrix& reconstructions);

// Branch threshold: the ceil(eps_p * N)-th smallest error. Samples with
// error < epsilon take the obvious-normal branch, error >= epsilon the
// suspected-abnormal branch.
double epsilon_from_percentile(std::span<const double> recon_errors, double eps_p);

// Mean over all samples of |s - mu0| (normal branch) or
// lambda_a * max(0, a - s) (abnormal branch). Variant must be Original.
double score_guided_loss(const std::vector<PerSampleForward>& samples, double eps,
                         const SgLossConfig& cfg);

// Decomposed form: lambda_normal * L_normal + lambda_abnormal * L_abnormal,
// both branch means taken over all N samples and without lambda_a inside.
// Coincides with lambda_se * score_guided_loss when lambda_normal = lambda_se
// and lambda_abnormal = lambda_se * lambda_a.
double decomposed_loss(const std::vector<PerSampleForward>& samples, double eps,
                       const SgLossConfig& cfg, double lambda_normal, double lambda_abnormal);

// Distribution-matching form: normal branch KL(D(mu, sigma) || D(0, 1)) in
// closed form log(1/sigma) + (sigma^2 + mu^2)/2 - 1/2, abnormal branch
// lambda_a * max(0, a - mu); mean over all samples. Variant Normal or
// Lognormal (same closed form; Lognormal reads (mu, sigma) as the underlying
// normal's parameters).
double kl_score_loss(const std::vector<PerSampleForward>& samples, double eps,
                     const SgLossConfig& cfg);

// KL(D(mu, sigma) || D(0, 1)) for one sample.
double kl_unit_divergence(double mu, double sigma);

}  // namespace sgad
