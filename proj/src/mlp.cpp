#include "sgad/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace sgad {

std::string to_string(Activation a) {
    return a == Activation::Relu ? "relu" : "linear";
}

Activation activation_from_string(const std::string& s) {
    if (s == "relu") return Activation::Relu;
    if (s == "linear") return Activation::Linear;
    throw std::invalid_argument("unknown activation: " + s);
}

std::size_t MlpNetwork::parameter_count() const {
    std::size_t n = 0;
    for (const auto& layer : layers) n += layer.weights.size() + layer.bias.size();
    return n;
}

void MlpNetwork::validate() const {
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const auto& layer = layers[l];
        if (layer.bias.size() != layer.out_dim())
            throw std::invalid_argument("MlpNetwork: bias size does not match layer output dim");
        if (l > 0 && layers[l - 1].out_dim() != layer.in_dim())
            throw std::invalid_argument("MlpNetwork: adjacent layers dimension-incompatible");
    }
}

std::vector<std::span<double>> MlpNetwork::parameter_views() {
    std::vector<std::span<double>> views;
    views.reserve(layers.size() * 2);
    for (auto& layer : layers) {
        views.push_back(layer.weights.values());
        views.emplace_back(layer.bias.data(), layer.bias.size());
    }
    return views;
}

std::vector<std::span<const double>> MlpNetwork::parameter_views() const {
    std::vector<std::span<const double>> views;
    views.reserve(layers.size() * 2);
    for (const auto& layer : layers) {
        views.push_back(layer.weights.values());
        views.emplace_back(layer.bias.data(), layer.bias.size());
    }
    return views;
}

std::vector<std::span<const double>> MlpGradients::parameter_views() const {
    std::vector<std::span<const double>> views;
    views.reserve(layers.size() * 2);
    for (const auto& layer : layers) {
        views.push_back(layer.weights.values());
        views.emplace_back(layer.bias.data(), layer.bias.size());
    }
    return views;
}

MlpNetwork make_mlp(std::size_t input_dim, const std::vector<std::size_t>& layer_widths,
                    Activation hidden_activation, Activation output_activation, Rng& rng) {
    if (input_dim == 0 || layer_widths.empty())
        throw std::invalid_argument("make_mlp: empty network");
    MlpNetwork net;
    std::size_t in_dim = input_dim;
    for (std::size_t l = 0; l < layer_widths.size(); ++l) {
        DenseLayer layer;
        layer.weights = Matrix(in_dim, layer_widths[l]);
        layer.bias.assign(layer_widths[l], 0.0);
        layer.activation = l + 1 == layer_widths.size() ? output_activation : hidden_activation;
        const double bound = std::sqrt(6.0 / static_cast<double>(in_dim));
        for (double& w : layer.weights.values()) w = rng.uniform(-bound, bound);
        in_dim = layer_widths[l];
        net.layers.push_back(std::move(layer));
    }
    return net;
}

namespace {

Matrix layer_forward(const DenseLayer& layer, const Matrix& input, Matrix* preact_out) {
    Matrix out = matmul(input, layer.weights);
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto row = out.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) row[j] += layer.bias[j];
    }
    if (preact_out) *preact_out = out;
    if (layer.activation == Activation::Relu) {
        for (double& v : out.values())
            if (v < 0.0) v = 0.0;
    }
    return out;
}

}  // namespace

Matrix mlp_forward(const MlpNetwork& net, const Matrix& batch) {
    if (batch.cols() != net.input_dim())
        throw std::invalid_argument("mlp_forward: batch width does not match network input dim");
    Matrix current = batch;
    for (const auto& layer : net.layers) current = layer_forward(layer, current, nullptr);
    return current;
}

ForwardCache mlp_forward_cached(const MlpNetwork& net, const Matrix& batch) {
    if (batch.cols() != net.input_dim())
        throw std::invalid_argument("mlp_forward: batch width does not match network input dim");
    ForwardCache cache;
    cache.acts.reserve(net.layers.size() + 1);
    cache.preacts.resize(net.layers.size());
    cache.acts.push_back(batch);
    for (std::size_t l = 0; l < net.layers.size(); ++l)
        cache.acts.push_back(layer_forward(net.layers[l], cache.acts.back(), &cache.preacts[l]));
    return cache;
}

MlpGradients mlp_backward(const MlpNetwork& net, const ForwardCache& cache,
                          const Matrix& output_grad) {
    if (cache.acts.size() != net.layers.size() + 1 || cache.preacts.size() != net.layers.size())
        throw std::invalid_argument("mlp_backward: cache does not match network");
    if (!output_grad.same_shape(cache.output()))
        throw std::invalid_argument("mlp_backward: output_grad shape does not match forward output");
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        if (cache.acts[l].cols() != net.layers[l].in_dim())
            throw std::invalid_argument("mlp_backward: cache does not match network");
    }

    MlpGradients grads;
    grads.layers.resize(net.layers.size());
    Matrix delta = output_grad;
    for (std::size_t l = net.layers.size(); l-- > 0;) {
        const auto& layer = net.layers[l];
        if (layer.activation == Activation::Relu) {
            const auto pre = cache.preacts[l].values();
            auto d = delta.values();
            for (std::size_t i = 0; i < d.size(); ++i)
                if (pre[i] <= 0.0) d[i] = 0.0;
        }
        grads.layers[l].weights = matmul_at_b(cache.acts[l], delta);
        grads.layers[l].bias.assign(layer.out_dim(), 0.0);
        for (std::size_t i = 0; i < delta.rows(); ++i) {
            auto row = delta.row(i);
            for (std::size_t j = 0; j < row.size(); ++j) grads.layers[l].bias[j] += row[j];
        }
        delta = matmul_a_bt(delta, layer.weights);
    }
    grads.input = std::move(delta);
    return grads;
}

MlpGradients zero_gradients(const MlpNetwork& net, std::size_t batch_rows) {
    MlpGradients grads;
    grads.layers.resize(net.layers.size());
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        grads.layers[l].weights = Matrix(net.layers[l].in_dim(), net.layers[l].out_dim());
        grads.layers[l].bias.assign(net.layers[l].out_dim(), 0.0);
    }
    grads.input = Matrix(batch_rows, net.input_dim());
    return grads;
}

void accumulate(MlpGradients& into, const MlpGradients& from) {
    if (into.layers.size() != from.layers.size())
        throw std::invalid_argument("accumulate: gradient layer counts differ");
    for (std::size_t l = 0; l < into.layers.size(); ++l) {
        auto dst = into.layers[l].weights.values();
        auto src = from.layers[l].weights.values();
        if (dst.size() != src.size())
            throw std::invalid_argument("accumulate: gradient shapes differ");
        for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
        for (std::size_t i = 0; i < into.layers[l].bias.size(); ++i)
            into.layers[l].bias[i] += from.layers[l].bias[i];
    }
    auto dst = into.input.values();
    auto src = from.input.values();
    for (std::size_t i = 0; i < dst.size() && i < src.size(); ++i) dst[i] += src[i];
}

}  // namespace sgad
