#include <cmath>

#include "doctest.h"
#include "sgad/losses.hpp"
#include "sgad/matrix.hpp"
#include "sgad/rng.hpp"

using namespace sgad;

namespace {

PerSampleForward sample_with(double recon_error, double s) {
    PerSampleForward out;
    out.recon_error = recon_error;
    out.s = s;
    return out;
}

SgLossConfig defaults() {
    SgLossConfig cfg;  // lambda_se 0.01, lambda_a 18, a 6, mu0 0.01, eps_p 0.8
    return cfg;
}

}  // namespace

TEST_CASE("reconstruction loss: zero, hand norm, homogeneity") {
    const Matrix x = Matrix::from_rows({{1, 2}, {3, 4}});
    CHECK(reconstruction_loss(x, x) == 0.0);

    const Matrix xt = Matrix::from_rows({{1 + 3, 2 + 4}, {3, 4}});
    CHECK(reconstruction_loss(x, xt) == doctest::Approx(2.5).epsilon(1e-15));

    Rng rng(17);
    Matrix base(5, 3), diff(5, 3);
    for (double& v : base.values()) v = rng.normal();
    for (double& v : diff.values()) v = rng.normal();
    for (double c : {0.0, 0.5, 2.0, 7.25}) {
        Matrix shifted = base;
        for (std::size_t i = 0; i < shifted.size(); ++i)
            shifted.values()[i] += c * diff.values()[i];
        Matrix reference = base;
        for (std::size_t i = 0; i < reference.size(); ++i)
            reference.values()[i] += diff.values()[i];
        CHECK(reconstruction_loss(base, shifted) ==
              doctest::Approx(c * reconstruction_loss(base, reference)).epsilon(1e-12));
    }

    CHECK_THROWS_AS(reconstruction_loss(x, Matrix(2, 3)), std::invalid_argument);
}

TEST_CASE("epsilon from percentile follows the rank convention") {
    const std::vector<double> errors = {7, 3, 10, 1, 5, 9, 2, 8, 6, 4};
    const double eps = epsilon_from_percentile(errors, 0.8);
    CHECK(eps == 8.0);
    std::size_t normal = 0, abnormal = 0;
    for (double e : errors) (e < eps ? normal : abnormal)++;
    CHECK(normal == 7);
    CHECK(abnormal == 3);

    const std::vector<double> equal(6, 2.5);
    const double eps_equal = epsilon_from_percentile(equal, 0.5);
    for (double e : equal) CHECK(e >= eps_equal);  // all take the abnormal branch

    // eps_p just above 1/N on distinct errors: only the minimum stays normal
    const std::vector<double> distinct = {4, 1, 3, 2, 5};
    const double eps_low = epsilon_from_percentile(distinct, 0.2000001);
    std::size_t below = 0;
    for (double e : distinct) below += e < eps_low;
    CHECK(below == 1);
    CHECK(eps_low == 2.0);

    CHECK_THROWS_AS(epsilon_from_percentile({}, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(epsilon_from_percentile(errors, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(epsilon_from_percentile(errors, 1.0), std::invalid_argument);
}

TEST_CASE("score-guided loss branch values") {
    SgLossConfig cfg = defaults();

    // all normal-branch samples sitting at mu0
    std::vector<PerSampleForward> at_target = {sample_with(0.1, cfg.mu0),
                                               sample_with(0.2, cfg.mu0)};
    CHECK(score_guided_loss(at_target, 1.0, cfg) == 0.0);

    // all abnormal-branch samples at or above a
    std::vector<PerSampleForward> saturated = {sample_with(2.0, cfg.a),
                                               sample_with(3.0, cfg.a + 4.0)};
    CHECK(score_guided_loss(saturated, 1.0, cfg) == 0.0);

    // one abnormal-branch sample with s = 0: lambda_a * a
    std::vector<PerSampleForward> one = {sample_with(2.0, 0.0)};
    CHECK(score_guided_loss(one, 1.0, cfg) == 108.0);

    SgLossConfig wrong = cfg;
    wrong.variant = Variant::PlainAe;
    CHECK_THROWS_AS(score_guided_loss(one, 1.0, wrong), std::invalid_argument);
}

TEST_CASE("decomposed form matches the weighted single-threshold form") {
    SgLossConfig cfg = defaults();

    std::vector<PerSampleForward> abnormal = {sample_with(2.0, 1.0), sample_with(3.0, 0.5)};
    CHECK(decomposed_loss(abnormal, 1.0, cfg, 0.7, 0.0) == 0.0);

    std::vector<PerSampleForward> one_normal = {sample_with(0.1, cfg.mu0 + 2.0)};
    CHECK(decomposed_loss(one_normal, 1.0, cfg, 1.0, 0.0) ==
          doctest::Approx(2.0).epsilon(1e-15));

    Rng rng(23);
    for (int rep = 0; rep < 200; ++rep) {
        std::vector<PerSampleForward> samples;
        const std::size_t n = 1 + rng.index(40);
        for (std::size_t i = 0; i < n; ++i)
            samples.push_back(sample_with(rng.uniform(0.0, 4.0), rng.uniform(-10.0, 10.0)));
        const double eps = rng.uniform(0.0, 4.0);
        const double combined = cfg.lambda_se * score_guided_loss(samples, eps, cfg);
        const double decomposed =
            decomposed_loss(samples, eps, cfg, cfg.lambda_se, cfg.lambda_se * cfg.lambda_a);
        CHECK(std::abs(combined - decomposed) <= 1e-12);
    }
}

TEST_CASE("kl score loss closed form") {
    SgLossConfig cfg = defaults();
    cfg.variant = Variant::Normal;

    PerSampleForward unit;
    unit.recon_error = 0.1;
    unit.s_mu = 0.0;
    unit.s_sigma = 1.0;
    CHECK(kl_score_loss({unit}, 1.0, cfg) == 0.0);

    PerSampleForward shifted = unit;
    shifted.s_mu = 1.0;
    CHECK(kl_score_loss({shifted}, 1.0, cfg) == doctest::Approx(0.5).epsilon(1e-15));

    PerSampleForward saturated;
    saturated.recon_error = 2.0;
    saturated.s_mu = cfg.a + 1.0;
    saturated.s_sigma = 0.5;
    CHECK(kl_score_loss({saturated}, 1.0, cfg) == 0.0);

    CHECK_THROWS_AS(kl_unit_divergence(0.0, 0.0), std::logic_error);
    SgLossConfig wrong = cfg;
    wrong.variant = Variant::Original;
    CHECK_THROWS_AS(kl_score_loss({unit}, 1.0, wrong), std::invalid_argument);
}

TEST_CASE("branch structure: exhaustive, isolated, and hinge-monotone") {
    SgLossConfig cfg = defaults();
    Rng rng(31);

    // every sample contributes to exactly one branch; moving one sample's
    // error across the threshold changes only its own contribution
    std::vector<PerSampleForward> samples;
    for (int i = 0; i < 20; ++i)
        samples.push_back(sample_with(rng.uniform(0.0, 2.0), rng.uniform(-2.0, 8.0)));
    const double eps = 1.0;
    const double n = static_cast<double>(samples.size());

    double rebuilt = 0.0;
    for (const auto& s : samples) {
        const bool normal_branch = s.recon_error < eps;
        rebuilt += normal_branch ? std::abs(s.s - cfg.mu0)
                                 : cfg.lambda_a * std::max(0.0, cfg.a - s.s);
    }
    CHECK(score_guided_loss(samples, eps, cfg) == doctest::Approx(rebuilt / n).epsilon(1e-15));

    auto moved = samples;
    moved[3].recon_error = eps + 1.0;  // force the abnormal branch
    const double before_term = std::abs(samples[3].s - cfg.mu0);
    const double after_term = cfg.lambda_a * std::max(0.0, cfg.a - samples[3].s);
    const double expected_delta = (after_term - before_term) / n;
    CHECK(score_guided_loss(moved, eps, cfg) - score_guided_loss(samples, eps, cfg) ==
          doctest::Approx(expected_delta).epsilon(1e-12));

    // abnormal branch non-increasing in s; normal branch minimized at mu0
    double previous = std::numeric_limits<double>::infinity();
    for (double s = -5.0; s <= 10.0; s += 0.25) {
        const double value = score_guided_loss({sample_with(eps + 1.0, s)}, eps, cfg);
        CHECK(value <= previous);
        previous = value;
    }
    const double at_mu0 = score_guided_loss({sample_with(0.0, cfg.mu0)}, eps, cfg);
    for (double delta : {-1.0, -0.1, 0.1, 1.0}) {
        CHECK(at_mu0 < score_guided_loss({sample_with(0.0, cfg.mu0 + delta)}, eps, cfg));
    }
    CHECK(at_mu0 == 0.0);
}

TEST_CASE("loss config validation") {
    SgLossConfig cfg = defaults();
    CHECK_NOTHROW(cfg.validate());
    cfg.mu0 = 7.0;  // must stay below a
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = defaults();
    cfg.eps_p = 1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = defaults();
    cfg.lambda_a = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
