#pragma once

// Central finite-difference oracle for model gradients. Kink-adjacent
// coordinates are excluded by comparing the per-sample branch signature
// (branch bit, hinge activity, abs-term sign, zero-norm bit) plus the ReLU
// activation pattern at the two evaluation points; a coordinate whose
// perturbation flips any of them straddles a nondifferentiable point and is
// skipped.

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "sgad/losses.hpp"
#include "sgad/model.hpp"

namespace sgad::testing {

inline std::vector<std::uint8_t> branch_signature(const SgaeModel& model, const Matrix& batch) {
    const auto samples = forward_batch(model, batch);
    std::vector<std::uint8_t> sig;
    sig.reserve(samples.size());

    const ForwardCache enc = mlp_forward_cached(model.encoder, batch);
    const ForwardCache dec = mlp_forward_cached(model.decoder, enc.output());
    auto append_relu_pattern = [&sig](const MlpNetwork& net, const ForwardCache& cache) {
        for (std::size_t l = 0; l < net.layers.size(); ++l) {
            if (net.layers[l].activation != Activation::Relu) continue;
            for (double v : cache.preacts[l].values()) sig.push_back(v > 0.0 ? 1 : 0);
        }
    };
    append_relu_pattern(model.encoder, enc);
    append_relu_pattern(model.decoder, dec);
    if (model.has_scorer())
        append_relu_pattern(model.scorer, mlp_forward_cached(model.scorer, enc.output()));

    if (model.hyper.variant == Variant::PlainAe) {
        for (const auto& s : samples) sig.push_back(s.recon_error < 1e-12 ? 1 : 0);
        return sig;
    }
    std::vector<double> errors;
    errors.reserve(samples.size());
    for (const auto& s : samples) errors.push_back(s.recon_error);
    const double eps = epsilon_from_percentile(errors, model.hyper.eps_p);
    for (const auto& s : samples) {
        const double score = model.hyper.variant == Variant::Recon ? s.recon_error : s.s;
        std::uint8_t bits = 0;
        bits |= s.recon_error < eps ? 1 : 0;                       // branch
        bits |= (score < model.hyper.a ? 1 : 0) << 1;              // hinge active
        bits |= (score > model.hyper.mu0 ? 1 : 0) << 2;            // abs-term sign
        bits |= (s.recon_error < 1e-12 ? 1 : 0) << 3;              // norm kink
        sig.push_back(bits);
    }
    return sig;
}

struct FdCheckResult {
    std::size_t checked = 0;
    std::size_t passed = 0;
    std::size_t skipped = 0;
    double worst_rel = 0.0;

    double pass_fraction() const {
        return checked == 0 ? 1.0 : static_cast<double>(passed) / static_cast<double>(checked);
    }
};

inline FdCheckResult fd_check_model(SgaeModel model, const Matrix& batch, double h, double tol) {
    SgaeGradients grads;
    total_loss_with_gradients(model, batch, grads);

    auto nets = {&model.encoder, &model.decoder, &model.scorer};
    auto grad_of = [&](const MlpNetwork* net) -> const MlpGradients* {
        if (net == &model.encoder) return &grads.encoder;
        if (net == &model.decoder) return &grads.decoder;
        return &grads.scorer;
    };

    FdCheckResult result;
    for (MlpNetwork* net : nets) {
        if (net->layers.empty()) continue;
        auto params = net->parameter_views();
        auto analytic = grad_of(net)->parameter_views();
        for (std::size_t b = 0; b < params.size(); ++b) {
            for (std::size_t i = 0; i < params[b].size(); ++i) {
                double& p = params[b][i];
                const double saved = p;

                p = saved + h;
                const double up = total_loss(model, batch).total;
                const auto sig_up = branch_signature(model, batch);
                p = saved - h;
                const double down = total_loss(model, batch).total;
                const auto sig_down = branch_signature(model, batch);
                p = saved;

                if (sig_up != sig_down) {
                    ++result.skipped;
                    continue;
                }
                const double fd = (up - down) / (2.0 * h);
                const double g = analytic[b][i];
                const double denom = std::max(std::abs(fd), std::abs(g));
                const double rel = std::abs(fd - g) <= 1e-10 ? 0.0 : std::abs(fd - g) / denom;
                ++result.checked;
                result.worst_rel = std::max(result.worst_rel, rel);
                if (rel <= tol) ++result.passed;
            }
        }
    }
    return result;
}

}  // namespace sgad::testing
