#include "sgad/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include "sgad/metrics.hpp"
#include "sgad/rng.hpp"

namespace sgad {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kSigmaFloor = 1e-12;

double softplus(double t) { return t > 30.0 ? t : std::log1p(std::exp(t)); }

double sigmoid(double t) {
    return t >= 0.0 ? 1.0 / (1.0 + std::exp(-t)) : std::exp(t) / (1.0 + std::exp(t));
}

// subgradient 0 at the kink
double sign0(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

bool variant_has_scorer(Variant v) {
    return v == Variant::Original || v == Variant::Normal || v == Variant::Lognormal;
}

std::vector<double> row_norms(const Matrix& batch, const Matrix& recon) {
    std::vector<double> errors(batch.rows());
    for (std::size_t i = 0; i < batch.rows(); ++i) {
        auto x = batch.row(i);
        auto xt = recon.row(i);
        double sq = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double d = x[j] - xt[j];
            sq += d * d;
        }
        errors[i] = std::sqrt(sq);
    }
    return errors;
}

struct GuidanceTerms {
    double loss = 0.0;  // mean guidance term, unweighted by lambda_se
    double epsilon = kNaN;
    Matrix d_raw;                   // dL/d(head raw outputs), scaled by lambda_se / N
    std::vector<double> d_signal;   // dL/df per sample, scaled by lambda_se / N
};

// Branch losses and derivatives for one batch. `signal` selects the branch
// per sample; `raw_head` is the scoring head output (width 1 for Original,
// width 2 for Normal/Lognormal) and is null for the Recon variant.
GuidanceTerms score_guidance_terms(const SgLossConfig& cfg, std::span<const double> signal,
                                   const Matrix* raw_head, double eps_override) {
    GuidanceTerms terms;
    const std::size_t n = signal.size();
    terms.epsilon = std::isnan(eps_override) ? epsilon_from_percentile(signal, cfg.eps_p)
                                             : eps_override;
    const double scale = cfg.lambda_se / static_cast<double>(n);
    if (raw_head) terms.d_raw = Matrix(raw_head->rows(), raw_head->cols());
    if (cfg.variant == Variant::Recon) terms.d_signal.assign(n, 0.0);

    double loss_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const bool normal_branch = signal[i] < terms.epsilon;
        switch (cfg.variant) {
            case Variant::Original: {
                const double s = (*raw_head)(i, 0);
                if (normal_branch) {
                    loss_sum += std::abs(s - cfg.mu0);
                    terms.d_raw(i, 0) = scale * sign0(s - cfg.mu0);
                } else {
                    loss_sum += cfg.lambda_a * std::max(0.0, cfg.a - s);
                    terms.d_raw(i, 0) = s < cfg.a ? -scale * cfg.lambda_a : 0.0;
                }
                break;
            }
            case Variant::Normal:
            case Variant::Lognormal: {
                const double mu = (*raw_head)(i, 0);
                const double sigma_raw = (*raw_head)(i, 1);
                const double sigma = std::max(softplus(sigma_raw), kSigmaFloor);
                if (normal_branch) {
                    loss_sum += kl_unit_divergence(mu, sigma);
                    terms.d_raw(i, 0) = scale * mu;
                    terms.d_raw(i, 1) = scale * (sigma - 1.0 / sigma) * sigmoid(sigma_raw);
                } else {
                    loss_sum += cfg.lambda_a * std::max(0.0, cfg.a - mu);
                    terms.d_raw(i, 0) = mu < cfg.a ? -scale * cfg.lambda_a : 0.0;
                }
                break;
            }
            case Variant::Recon: {
                const double e = signal[i];
                if (normal_branch) {
                    loss_sum += std::abs(e - cfg.mu0);
                    terms.d_signal[i] = scale * sign0(e - cfg.mu0);
                } else {
                    loss_sum += cfg.lambda_a * std::max(0.0, cfg.a - e);
                    terms.d_signal[i] = e < cfg.a ? -scale * cfg.lambda_a : 0.0;
                }
                break;
            }
            case Variant::PlainAe:
                throw std::logic_error("score_guidance_terms: no guidance for plain_ae");
        }
    }
    terms.loss = loss_sum / static_cast<double>(n);
    return terms;
}

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> rows) {
    Matrix out(rows.size(), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto src = m.row(rows[i]);
        auto dst = out.row(i);
        std::copy(src.begin(), src.end(), dst.begin());
    }
    return out;
}

// dL/d(reconstruction): per row coeff_i * (x_tilde - x) / ||x - x_tilde||,
// where coeff_i combines the base reconstruction term 1/N with any guidance
// gradient on the signal. Zero rows stay zero (subgradient at the norm kink).
Matrix reconstruction_grad(const Matrix& batch, const Matrix& recon,
                           const std::vector<double>& errors,
                           const std::vector<double>& signal_grad) {
    const double base = 1.0 / static_cast<double>(batch.rows());
    Matrix d(recon.rows(), recon.cols());
    for (std::size_t i = 0; i < batch.rows(); ++i) {
        if (errors[i] == 0.0) continue;
        const double coeff =
            (base + (signal_grad.empty() ? 0.0 : signal_grad[i])) / errors[i];
        auto x = batch.row(i);
        auto xt = recon.row(i);
        auto out = d.row(i);
        for (std::size_t j = 0; j < x.size(); ++j) out[j] = coeff * (xt[j] - x[j]);
    }
    return d;
}

}  // namespace

LayerPreset tabular_preset(std::size_t input_dim) {
    if (input_dim <= 30) return {{20}, {20, 10, 1}};
    if (input_dim <= 60) return {{40, 20}, {20, 10, 1}};
    return {{80, 40, 20}, {20, 10, 1}};
}

LayerPreset simulation_preset(std::size_t input_dim) {
    if (input_dim <= 1) return {{20}, {20, 1}};
    return {{64, 20}, {20, 1}};
}

void SgaeModel::validate() const {
    hyper.validate();
    encoder.validate();
    decoder.validate();
    if (encoder.layers.empty() || decoder.layers.empty())
        throw std::invalid_argument("SgaeModel: encoder and decoder must be nonempty");
    if (decoder.input_dim() != encoder.output_dim())
        throw std::invalid_argument("SgaeModel: decoder input dim must equal latent dim");
    if (decoder.output_dim() != encoder.input_dim())
        throw std::invalid_argument("SgaeModel: decoder output dim must equal input dim");
    if (variant_has_scorer(hyper.variant)) {
        scorer.validate();
        if (scorer.layers.empty())
            throw std::invalid_argument("SgaeModel: variant requires a scoring network");
        if (scorer.input_dim() != encoder.output_dim())
            throw std::invalid_argument("SgaeModel: scorer input dim must equal latent dim");
        const std::size_t head = hyper.variant == Variant::Original ? 1 : 2;
        if (scorer.output_dim() != head)
            throw std::invalid_argument("SgaeModel: scorer head width does not match variant");
    } else if (!scorer.layers.empty()) {
        throw std::invalid_argument("SgaeModel: variant does not use a scoring network");
    }
}

SgaeModel make_sgae(std::size_t input_dim, const LayerPreset& preset, const SgLossConfig& cfg,
                    std::uint64_t seed) {
    cfg.validate();
    if (preset.encoder_widths.empty())
        throw std::invalid_argument("make_sgae: empty encoder widths");
    Rng rng(seed);

    SgaeModel model;
    model.hyper = cfg;
    model.encoder = make_mlp(input_dim, preset.encoder_widths, Activation::Relu,
                             Activation::Relu, rng);

    std::vector<std::size_t> decoder_widths(preset.encoder_widths.rbegin() + 1,
                                            preset.encoder_widths.rend());
    decoder_widths.push_back(input_dim);
    model.decoder = make_mlp(model.encoder.output_dim(), decoder_widths, Activation::Relu,
                             Activation::Linear, rng);

    if (variant_has_scorer(cfg.variant)) {
        if (preset.scorer_widths.empty())
            throw std::invalid_argument("make_sgae: empty scorer widths");
        std::vector<std::size_t> scorer_widths = preset.scorer_widths;
        scorer_widths.back() = cfg.variant == Variant::Original ? 1 : 2;
        model.scorer = make_mlp(model.encoder.output_dim(), scorer_widths, Activation::Relu,
                                Activation::Linear, rng);
    }
    model.validate();
    return model;
}

std::vector<PerSampleForward> forward_batch(const SgaeModel& model, const Matrix& batch) {
    model.validate();
    if (batch.cols() != model.input_dim())
        throw std::invalid_argument("forward_batch: batch width does not match model input dim");
    const Matrix z = mlp_forward(model.encoder, batch);
    const Matrix recon = mlp_forward(model.decoder, z);
    const auto errors = row_norms(batch, recon);
    Matrix raw;
    if (model.has_scorer()) raw = mlp_forward(model.scorer, z);

    std::vector<PerSampleForward> out(batch.rows());
    for (std::size_t i = 0; i < batch.rows(); ++i) {
        auto& sample = out[i];
        sample.z.assign(z.row(i).begin(), z.row(i).end());
        sample.x_tilde.assign(recon.row(i).begin(), recon.row(i).end());
        sample.recon_error = errors[i];
        switch (model.hyper.variant) {
            case Variant::Original:
                sample.s = raw(i, 0);
                break;
            case Variant::Normal:
            case Variant::Lognormal:
                sample.s_mu = raw(i, 0);
                sample.s_sigma = std::max(softplus(raw(i, 1)), kSigmaFloor);
                sample.s = sample.s_mu;
                break;
            case Variant::Recon:
            case Variant::PlainAe:
                sample.s = errors[i];
                break;
        }
    }
    return out;
}

std::vector<double> predict_scores(const SgaeModel& model, const Matrix& batch) {
    if (batch.cols() != model.input_dim())
        throw std::invalid_argument("predict_scores: batch width does not match model input dim");
    const Matrix z = mlp_forward(model.encoder, batch);
    if (variant_has_scorer(model.hyper.variant)) {
        const Matrix raw = mlp_forward(model.scorer, z);
        std::vector<double> scores(batch.rows());
        for (std::size_t i = 0; i < batch.rows(); ++i) scores[i] = raw(i, 0);
        return scores;
    }
    const Matrix recon = mlp_forward(model.decoder, z);
    return row_norms(batch, recon);
}

LossValue total_loss(const SgaeModel& model, const Matrix& batch, double eps_override) {
    if (batch.cols() != model.input_dim())
        throw std::invalid_argument("total_loss: batch width does not match model input dim");
    if (batch.rows() == 0) throw std::invalid_argument("total_loss: empty batch");

    const Matrix z = mlp_forward(model.encoder, batch);
    const Matrix recon = mlp_forward(model.decoder, z);
    const auto errors = row_norms(batch, recon);
    Matrix raw;
    if (model.has_scorer()) raw = mlp_forward(model.scorer, z);

    LossValue loss;
    for (double e : errors) loss.recon += e;
    loss.recon /= static_cast<double>(batch.rows());
    if (model.hyper.variant != Variant::PlainAe) {
        const auto terms = score_guidance_terms(model.hyper, errors,
                                                model.has_scorer() ? &raw : nullptr, eps_override);
        loss.score_guidance = terms.loss;
        loss.epsilon = terms.epsilon;
    }
    loss.total = loss.recon + model.hyper.lambda_se * loss.score_guidance;
    return loss;
}

LossValue total_loss_with_gradients(const SgaeModel& model, const Matrix& batch,
                                    SgaeGradients& grads, double eps_override) {
    if (batch.cols() != model.input_dim())
        throw std::invalid_argument("total_loss: batch width does not match model input dim");
    if (batch.rows() == 0) throw std::invalid_argument("total_loss: empty batch");

    const ForwardCache enc_cache = mlp_forward_cached(model.encoder, batch);
    const Matrix& z = enc_cache.output();
    const ForwardCache dec_cache = mlp_forward_cached(model.decoder, z);
    const Matrix& recon = dec_cache.output();
    const auto errors = row_norms(batch, recon);

    ForwardCache sc_cache;
    if (model.has_scorer()) sc_cache = mlp_forward_cached(model.scorer, z);

    LossValue loss;
    loss.recon = 0.0;
    for (double e : errors) loss.recon += e;
    loss.recon /= static_cast<double>(batch.rows());

    GuidanceTerms terms;
    if (model.hyper.variant != Variant::PlainAe) {
        terms = score_guidance_terms(model.hyper, errors,
                                     model.has_scorer() ? &sc_cache.output() : nullptr,
                                     eps_override);
        loss.score_guidance = terms.loss;
        loss.epsilon = terms.epsilon;
    }
    loss.total = loss.recon + model.hyper.lambda_se * loss.score_guidance;

    const Matrix d_recon = reconstruction_grad(batch, recon, errors, terms.d_signal);
    grads.decoder = mlp_backward(model.decoder, dec_cache, d_recon);
    Matrix dz = grads.decoder.input;
    if (model.has_scorer()) {
        grads.scorer = mlp_backward(model.scorer, sc_cache, terms.d_raw);
        auto acc = dz.values();
        auto src = grads.scorer.input.values();
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += src[i];
    } else {
        grads.scorer = MlpGradients{};
    }
    grads.encoder = mlp_backward(model.encoder, enc_cache, dz);
    return loss;
}

// --- generic score-guided composition ---------------------------------------

AutoencoderLearner::AutoencoderLearner(MlpNetwork& encoder, MlpNetwork& decoder,
                                       double learning_rate)
    : encoder_(encoder),
      decoder_(decoder),
      encoder_adam_(make_adam_state(encoder.parameter_count(), learning_rate)),
      decoder_adam_(make_adam_state(decoder.parameter_count(), learning_rate)) {}

RepresentationLearner::Forward AutoencoderLearner::forward(const Matrix& batch) {
    batch_ = batch;
    enc_cache_ = mlp_forward_cached(encoder_, batch);
    dec_cache_ = mlp_forward_cached(decoder_, enc_cache_.output());

    errors_ = row_norms(batch, dec_cache_.output());

    Forward fwd;
    fwd.latent = enc_cache_.output();
    fwd.signal = errors_;
    for (double e : fwd.signal) fwd.base_loss += e;
    fwd.base_loss /= static_cast<double>(batch.rows());
    return fwd;
}

void AutoencoderLearner::update(const Matrix& latent_grad, std::span<const double> signal_grad) {
    if (batch_.rows() == 0) throw std::logic_error("AutoencoderLearner: update before forward");
    const std::vector<double> sig(signal_grad.begin(), signal_grad.end());
    const Matrix d_recon = reconstruction_grad(batch_, dec_cache_.output(), errors_, sig);

    MlpGradients dec_grads = mlp_backward(decoder_, dec_cache_, d_recon);
    Matrix dz = dec_grads.input;
    if (!latent_grad.empty()) {
        if (!latent_grad.same_shape(dz))
            throw std::invalid_argument("AutoencoderLearner: latent gradient shape mismatch");
        auto acc = dz.values();
        auto src = latent_grad.values();
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += src[i];
    }
    MlpGradients enc_grads = mlp_backward(encoder_, enc_cache_, dz);

    adam_update(decoder_adam_, decoder_.parameter_views(), dec_grads.parameter_views());
    adam_update(encoder_adam_, encoder_.parameter_views(), enc_grads.parameter_views());
    batch_ = Matrix{};
}

SgmStepStats sgm_train_step(RepresentationLearner& learner, MlpNetwork* scorer,
                            AdamState* scorer_adam, const SgLossConfig& cfg, const Matrix& batch,
                            double eps_override) {
    if (batch.cols() != learner.input_dim())
        throw std::invalid_argument("sgm_train_step: batch width does not match learner");
    if (variant_has_scorer(cfg.variant) && (scorer == nullptr || scorer_adam == nullptr))
        throw std::invalid_argument("sgm_train_step: variant requires a scoring head");

    const auto fwd = learner.forward(batch);

    SgmStepStats stats;
    stats.base_loss = fwd.base_loss;

    ForwardCache sc_cache;
    const Matrix* raw = nullptr;
    if (variant_has_scorer(cfg.variant)) {
        sc_cache = mlp_forward_cached(*scorer, fwd.latent);
        raw = &sc_cache.output();
    }

    GuidanceTerms terms;
    Matrix latent_grad;
    if (cfg.variant != Variant::PlainAe) {
        terms = score_guidance_terms(cfg, fwd.signal, raw, eps_override);
        stats.guidance_loss = terms.loss;
        stats.epsilon = terms.epsilon;
    }
    stats.total_loss = stats.base_loss + cfg.lambda_se * stats.guidance_loss;

    if (raw) {
        MlpGradients sc_grads = mlp_backward(*scorer, sc_cache, terms.d_raw);
        latent_grad = std::move(sc_grads.input);
        adam_update(*scorer_adam, scorer->parameter_views(), sc_grads.parameter_views());
    }
    learner.update(latent_grad, terms.d_signal);
    return stats;
}

// --- training loop -----------------------------------------------------------

namespace {

std::vector<double> reconstruction_errors_chunked(const SgaeModel& model, const Matrix& data,
                                                  std::size_t chunk) {
    std::vector<double> errors;
    errors.reserve(data.rows());
    std::vector<std::size_t> idx;
    for (std::size_t start = 0; start < data.rows(); start += chunk) {
        const std::size_t len = std::min(chunk, data.rows() - start);
        idx.resize(len);
        for (std::size_t i = 0; i < len; ++i) idx[i] = start + i;
        const Matrix part = gather_rows(data, idx);
        const Matrix z = mlp_forward(model.encoder, part);
        const Matrix recon = mlp_forward(model.decoder, z);
        const auto e = row_norms(part, recon);
        errors.insert(errors.end(), e.begin(), e.end());
    }
    return errors;
}

struct Snapshot {
    MlpNetwork encoder, decoder, scorer;
};

}  // namespace

TrainTrace train(SgaeModel& model, const Matrix& train_set, const Matrix& val_set,
                 const TrainSchedule& schedule, const LabeledDataset* trace_set) {
    model.validate();
    if (schedule.epochs < 1) throw std::invalid_argument("train: epochs must be at least 1");
    if (schedule.batch_size < 1) throw std::invalid_argument("train: batch_size must be at least 1");
    if (train_set.rows() == 0) throw std::invalid_argument("train: empty training set");
    if (train_set.cols() != model.input_dim() || val_set.cols() != model.input_dim())
        throw std::invalid_argument("train: data width does not match model input dim");
    if (val_set.rows() == 0) throw std::invalid_argument("train: empty validation set");
    if (trace_set) {
        trace_set->validate();
        if (!trace_set->has_fields())
            throw std::invalid_argument("train: trace set needs field ids");
    }

    const std::size_t n = train_set.rows();
    std::size_t batch_size = schedule.batch_size;
    if (batch_size > n) {
        std::cerr << "train: batch_size " << batch_size << " exceeds training size " << n
                  << ", using one full batch\n";
        batch_size = n;
    }

    AutoencoderLearner learner(model.encoder, model.decoder, schedule.learning_rate);
    AdamState scorer_adam;
    if (model.has_scorer())
        scorer_adam = make_adam_state(model.scorer.parameter_count(), schedule.learning_rate);

    Rng shuffle_rng(derive_seed(schedule.seed, 0));
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;

    TrainTrace trace;
    Snapshot best{model.encoder, model.decoder, model.scorer};

    for (std::size_t epoch = 0; epoch < schedule.epochs; ++epoch) {
        double eps_override = kNaN;
        if (schedule.epsilon_mode == EpsilonMode::PerEpoch &&
            model.hyper.variant != Variant::PlainAe) {
            const auto errors = reconstruction_errors_chunked(model, train_set, batch_size);
            eps_override = epsilon_from_percentile(errors, model.hyper.eps_p);
        }

        shuffle_rng.shuffle(perm);
        double loss_sum = 0.0;
        std::size_t batch_index = 0;
        for (std::size_t start = 0; start < n; start += batch_size, ++batch_index) {
            const std::size_t len = std::min(batch_size, n - start);
            const Matrix batch =
                gather_rows(train_set, {perm.data() + start, len});
            const auto stats =
                sgm_train_step(learner, model.has_scorer() ? &model.scorer : nullptr,
                               model.has_scorer() ? &scorer_adam : nullptr, model.hyper, batch,
                               eps_override);
            if (!std::isfinite(stats.total_loss))
                throw std::runtime_error("train: non-finite loss at epoch " +
                                         std::to_string(epoch + 1) + ", batch " +
                                         std::to_string(batch_index + 1));
            loss_sum += stats.total_loss * static_cast<double>(len);
        }

        EpochStats stats;
        stats.train_loss = loss_sum / static_cast<double>(n);
        stats.val_loss = total_loss(model, val_set).total;
        if (!std::isfinite(stats.val_loss))
            throw std::runtime_error("train: non-finite validation loss at epoch " +
                                     std::to_string(epoch + 1));
        if (trace_set) {
            const auto scores = predict_scores(model, trace_set->features);
            stats.score_diff = score_difference(scores, trace_set->labels, trace_set->field_id);
            stats.has_score_diff = true;
        }
        trace.epochs.push_back(stats);

        if (stats.val_loss < trace.best_val_loss) {
            trace.best_val_loss = stats.val_loss;
            trace.best_epoch = epoch;
            if (schedule.select_best) best = {model.encoder, model.decoder, model.scorer};
        }
    }

    if (schedule.select_best) {
        model.encoder = std::move(best.encoder);
        model.decoder = std::move(best.decoder);
        model.scorer = std::move(best.scorer);
    }
    return trace;
}

// --- checkpointing ----------------------------------------------------------

namespace {

constexpr char kMagic[4] = {'S', 'G', 'A', 'D'};
constexpr std::uint32_t kVersion = 1;

void write_bytes(std::ostream& out, const void* data, std::size_t size) {
    out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
}

template <typename T>
void write_value(std::ostream& out, T value) {
    write_bytes(out, &value, sizeof(value));
}

void read_bytes(std::istream& in, void* data, std::size_t size) {
    in.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
    if (!in) throw std::runtime_error("checkpoint: truncated file");
}

template <typename T>
T read_value(std::istream& in) {
    T value;
    read_bytes(in, &value, sizeof(value));
    return value;
}

void write_network(std::ostream& out, const MlpNetwork& net) {
    write_value<std::uint32_t>(out, static_cast<std::uint32_t>(net.layers.size()));
    for (const auto& layer : net.layers) {
        write_value<std::uint64_t>(out, layer.in_dim());
        write_value<std::uint64_t>(out, layer.out_dim());
        write_value<std::uint8_t>(out, layer.activation == Activation::Relu ? 1 : 0);
        write_bytes(out, layer.weights.values().data(), layer.weights.size() * sizeof(double));
        write_bytes(out, layer.bias.data(), layer.bias.size() * sizeof(double));
    }
}

MlpNetwork read_network(std::istream& in) {
    MlpNetwork net;
    const auto n_layers = read_value<std::uint32_t>(in);
    for (std::uint32_t l = 0; l < n_layers; ++l) {
        DenseLayer layer;
        const auto in_dim = read_value<std::uint64_t>(in);
        const auto out_dim = read_value<std::uint64_t>(in);
        layer.activation = read_value<std::uint8_t>(in) == 1 ? Activation::Relu
                                                             : Activation::Linear;
        layer.weights = Matrix(in_dim, out_dim);
        read_bytes(in, layer.weights.values().data(), layer.weights.size() * sizeof(double));
        layer.bias.resize(out_dim);
        read_bytes(in, layer.bias.data(), layer.bias.size() * sizeof(double));
        net.layers.push_back(std::move(layer));
    }
    return net;
}

}  // namespace

void save_checkpoint(const SgaeModel& model, const std::string& path) {
    model.validate();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("checkpoint: cannot open " + path + " for writing");
    write_bytes(out, kMagic, sizeof(kMagic));
    write_value<std::uint32_t>(out, kVersion);
    write_value<std::uint8_t>(out, static_cast<std::uint8_t>(model.hyper.variant));
    write_value<double>(out, model.hyper.lambda_se);
    write_value<double>(out, model.hyper.lambda_a);
    write_value<double>(out, model.hyper.a);
    write_value<double>(out, model.hyper.mu0);
    write_value<double>(out, model.hyper.eps_p);
    write_network(out, model.encoder);
    write_network(out, model.decoder);
    write_network(out, model.scorer);
    if (!out) throw std::runtime_error("checkpoint: write to " + path + " failed");
}

SgaeModel load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("checkpoint: cannot open " + path);
    char magic[4];
    read_bytes(in, magic, sizeof(magic));
    if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw std::runtime_error("checkpoint: bad magic in " + path);
    if (read_value<std::uint32_t>(in) != kVersion)
        throw std::runtime_error("checkpoint: unsupported version in " + path);

    SgaeModel model;
    model.hyper.variant = static_cast<Variant>(read_value<std::uint8_t>(in));
    model.hyper.lambda_se = read_value<double>(in);
    model.hyper.lambda_a = read_value<double>(in);
    model.hyper.a = read_value<double>(in);
    model.hyper.mu0 = read_value<double>(in);
    model.hyper.eps_p = read_value<double>(in);
    model.encoder = read_network(in);
    model.decoder = read_network(in);
    model.scorer = read_network(in);
    model.validate();
    return model;
}

}  // namespace sgad
