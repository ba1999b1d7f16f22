#include "sgad/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace sgad {

void AdamState::validate() const {
    if (learning_rate <= 0.0) throw std::invalid_argument("AdamState: learning_rate must be positive");
    if (beta1 < 0.0 || beta1 >= 1.0 || beta2 < 0.0 || beta2 >= 1.0)
        throw std::invalid_argument("AdamState: betas must lie in [0, 1)");
    if (first_moment.size() != second_moment.size())
        throw std::invalid_argument("AdamState: moment buffers differ in size");
}

AdamState make_adam_state(std::size_t param_count, double learning_rate, double beta1,
                          double beta2, double eps_hat) {
    AdamState state;
    state.learning_rate = learning_rate;
    state.beta1 = beta1;
    state.beta2 = beta2;
    state.eps_hat = eps_hat;
    state.first_moment.assign(param_count, 0.0);
    state.second_moment.assign(param_count, 0.0);
    state.validate();
    return state;
}

namespace {

void update_block(AdamState& state, std::span<double> params, std::span<const double> grads,
                  std::size_t offset, double bias1, double bias2) {
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        double& m = state.first_moment[offset + i];
        double& v = state.second_moment[offset + i];
        m = state.beta1 * m + (1.0 - state.beta1) * g;
        v = state.beta2 * v + (1.0 - state.beta2) * g * g;
        const double m_hat = m / bias1;
        const double v_hat = v / bias2;
        params[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.eps_hat);
    }
}

}  // namespace

void adam_update(AdamState& state, std::span<double> params, std::span<const double> grads) {
    adam_update(state, std::vector<std::span<double>>{params},
                std::vector<std::span<const double>>{grads});
}

void adam_update(AdamState& state, const std::vector<std::span<double>>& params,
                 const std::vector<std::span<const double>>& grads) {
    state.validate();
    if (params.size() != grads.size())
        throw std::invalid_argument("adam_update: parameter and gradient block counts differ");
    std::size_t total = 0;
    for (std::size_t b = 0; b < params.size(); ++b) {
        if (params[b].size() != grads[b].size())
            throw std::invalid_argument("adam_update: parameter and gradient block shapes differ");
        total += params[b].size();
    }
    if (total != state.first_moment.size())
        throw std::invalid_argument("adam_update: parameter count does not match optimizer state");

    state.step += 1;
    const double bias1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bias2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    std::size_t offset = 0;
    for (std::size_t b = 0; b < params.size(); ++b) {
        update_block(state, params[b], grads[b], offset, bias1, bias2);
        offset += params[b].size();
    }
}

}  // namespace sgad
