#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace sgad {

// Adam optimizer state over a flat parameter vector. Callers pass the same
// parameter blocks in the same order on every update; the moments live here.
struct AdamState {
    std::uint64_t step = 0;
    double learning_rate = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps_hat = 1e-8;
    std::vector<double> first_moment;
    std::vector<double> second_moment;

    void validate() const;
};

AdamState make_adam_state(std::size_t param_count, double learning_rate = 1e-4,
                          double beta1 = 0.9, double beta2 = 0.999, double eps_hat = 1e-8);

// Single update step across one parameter block.
void adam_update(AdamState& state, std::span<double> params, std::span<const double> grads);

// Single update step across several blocks that together map onto the state's
// flat moments (e.g. all layers of a network).
void adam_update(AdamState& state, const std::vector<std::span<double>>& params,
                 const std::vector<std::span<const double>>& grads);

}  // namespace sgad
