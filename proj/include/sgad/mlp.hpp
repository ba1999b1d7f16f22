#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "sgad/matrix.hpp"
#include "sgad/rng.hpp"

namespace sgad {

enum class Activation { Relu, Linear };

std::string to_string(Activation a);
Activation activation_from_string(const std::string& s);

struct DenseLayer {
    Matrix weights;             // in_dim x out_dim
    std::vector<double> bias;   // out_dim
    Activation activation = Activation::Linear;

    std::size_t in_dim() const { return weights.rows(); }
    std::size_t out_dim() const { return weights.cols(); }
};

struct MlpNetwork {
    std::vector<DenseLayer> layers;

    std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().in_dim(); }
    std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().out_dim(); }
    std::size_t parameter_count() const;

    // adjacent layers must be dimension-compatible, biases sized to out_dim
    void validate() const;

    // parameter blocks in a fixed order (layer 0 weights, layer 0 bias, ...)
    std::vector<std::span<double>> parameter_views();
    std::vector<std::span<const double>> parameter_views() const;
};

// Fan-in scaled uniform initialization: U(-sqrt(6/fan_in), sqrt(6/fan_in)).
// Layers draw from `rng` in order, so two networks built from the same stream
// prefix initialize identically.
MlpNetwork make_mlp(std::size_t input_dim, const std::vector<std::size_t>& layer_widths,
                    Activation hidden_activation, Activation output_activation, Rng& rng);

// Per-layer activations retained by a forward pass for the matching backward
// pass: acts[0] is the input batch, acts[l+1] the output of layer l, and
// preacts[l] the affine output of layer l before its activation.
struct ForwardCache {
    std::vector<Matrix> acts;
    std::vector<Matrix> preacts;

    const Matrix& output() const { return acts.back(); }
};

Matrix mlp_forward(const MlpNetwork& net, const Matrix& batch);
ForwardCache mlp_forward_cached(const MlpNetwork& net, const Matrix& batch);

struct LayerGrads {
    Matrix weights;
    std::vector<double> bias;
};

struct MlpGradients {
    std::vector<LayerGrads> layers;
    Matrix input;  // gradient with respect to the input batch

    std::vector<std::span<const double>> parameter_views() const;
};

// Backpropagates `output_grad` (same shape as the cached forward output)
// through the network. ReLU uses subgradient 0 at the kink.
MlpGradients mlp_backward(const MlpNetwork& net, const ForwardCache& cache,
                          const Matrix& output_grad);

MlpGradients zero_gradients(const MlpNetwork& net, std::size_t batch_rows);
void accumulate(MlpGradients& into, const MlpGradients& from);

}  // namespace sgad
