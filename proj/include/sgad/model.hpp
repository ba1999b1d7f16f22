#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sgad/adam.hpp"
#include "sgad/dataset.hpp"
#include "sgad/losses.hpp"
#include "sgad/mlp.hpp"

namespace sgad {

// Encoder / decoder layer widths plus scoring-network widths (last entry is
// the score head). The tabular preset follows input dimension; the simulation
// preset uses the narrow configurations of the synthetic experiments.
struct LayerPreset {
    std::vector<std::size_t> encoder_widths;  // last entry is the latent dim
    std::vector<std::size_t> scorer_widths;   // last entry is the head width
};

LayerPreset tabular_preset(std::size_t input_dim);
LayerPreset simulation_preset(std::size_t input_dim);

// Autoencoder with an attached scoring network. The scorer reads the latent
// representation; it is absent for the Recon and PlainAe variants.
struct SgaeModel {
    MlpNetwork encoder;
    MlpNetwork decoder;
    MlpNetwork scorer;
    SgLossConfig hyper;

    std::size_t input_dim() const { return encoder.input_dim(); }
    std::size_t latent_dim() const { return encoder.output_dim(); }
    bool has_scorer() const { return !scorer.layers.empty(); }
    void validate() const;
};

// Networks initialize in order encoder, decoder, scorer from one seeded
// stream, so variants without a scorer share encoder/decoder initialization
// with variants that have one.
SgaeModel make_sgae(std::size_t input_dim, const LayerPreset& preset, const SgLossConfig& cfg,
                    std::uint64_t seed);

// Per-row forward pass of the full model. s mirrors what predict_scores would
// return for the variant (the learned score, the score mean, or the
// reconstruction error).
std::vector<PerSampleForward> forward_batch(const SgaeModel& model, const Matrix& batch);

std::vector<double> predict_scores(const SgaeModel& model, const Matrix& batch);

struct LossValue {
    double total = 0.0;
    double recon = 0.0;           // mean Euclidean reconstruction norm
    double score_guidance = 0.0;  // unweighted guidance term (0 for PlainAe)
    double epsilon = std::numeric_limits<double>::quiet_NaN();
};

struct SgaeGradients {
    MlpGradients encoder, decoder, scorer;
};

// Loss of one batch; eps_override pins the branch threshold (used by the
// epoch-level recompute mode), otherwise it is taken from this batch's
// reconstruction-error percentile.
LossValue total_loss(const SgaeModel& model, const Matrix& batch,
                     double eps_override = std::numeric_limits<double>::quiet_NaN());
LossValue total_loss_with_gradients(const SgaeModel& model, const Matrix& batch,
                                    SgaeGradients& grads,
                                    double eps_override = std::numeric_limits<double>::quiet_NaN());

// --- generic score-guided composition -------------------------------------

// A representation learner exposes a latent mapping plus a per-sample
// self-supervision signal; attaching the scoring head to its latent output
// turns it into a score-guided model. SG-AE is the autoencoder instantiation
// (signal = reconstruction error).
class RepresentationLearner {
public:
    virtual ~RepresentationLearner() = default;
    virtual std::size_t input_dim() const = 0;
    virtual std::size_t latent_dim() const = 0;

    struct Forward {
        Matrix latent;                // batch rows x latent_dim
        std::vector<double> signal;   // per-sample discrimination value f
        double base_loss = 0.0;       // the learner's own loss over the batch
    };

    // Retains internal state for the following update() call.
    virtual Forward forward(const Matrix& batch) = 0;

    // Applies one optimizer step from the head's latent gradient plus an
    // optional per-sample gradient on the signal; the learner adds its own
    // base-loss gradient. Must follow a matching forward on the same batch.
    virtual void update(const Matrix& latent_grad, std::span<const double> signal_grad) = 0;
};

class AutoencoderLearner final : public RepresentationLearner {
public:
    // Borrows the networks; optimizer state lives here.
    AutoencoderLearner(MlpNetwork& encoder, MlpNetwork& decoder, double learning_rate);

    std::size_t input_dim() const override { return encoder_.input_dim(); }
    std::size_t latent_dim() const override { return encoder_.output_dim(); }
    Forward forward(const Matrix& batch) override;
    void update(const Matrix& latent_grad, std::span<const double> signal_grad) override;

private:
    MlpNetwork& encoder_;
    MlpNetwork& decoder_;
    AdamState encoder_adam_, decoder_adam_;
    ForwardCache enc_cache_, dec_cache_;
    Matrix batch_;
    std::vector<double> errors_;
};

struct SgmStepStats {
    double total_loss = 0.0;
    double base_loss = 0.0;
    double guidance_loss = 0.0;
    double epsilon = std::numeric_limits<double>::quiet_NaN();
};

// One training step of a score-guided model: learner forward, scoring head on
// the latents, branch threshold from the signal percentile, combined update.
// scorer/scorer_adam are null for the Recon and PlainAe variants.
SgmStepStats sgm_train_step(RepresentationLearner& learner, MlpNetwork* scorer,
                            AdamState* scorer_adam, const SgLossConfig& cfg, const Matrix& batch,
                            double eps_override = std::numeric_limits<double>::quiet_NaN());

// --- training loop ---------------------------------------------------------

enum class EpsilonMode { PerBatch, PerEpoch };

struct TrainSchedule {
    std::size_t epochs = 100;
    std::size_t batch_size = 1024;
    std::uint64_t seed = 0;
    double learning_rate = 1e-4;
    EpsilonMode epsilon_mode = EpsilonMode::PerBatch;
    bool select_best = true;  // restore the epoch with the lowest validation loss
};

struct EpochStats {
    double train_loss = 0.0;
    double val_loss = 0.0;
    std::array<std::optional<double>, 4> score_diff{};
    bool has_score_diff = false;
};

struct TrainTrace {
    std::vector<EpochStats> epochs;
    std::size_t best_epoch = 0;
    double best_val_loss = std::numeric_limits<double>::infinity();
};

// Shuffled mini-batch training with Adam. Each epoch records the training
// loss, the validation loss, and, when trace_set carries labels and fields,
// the per-field score differences on it. With select_best the model is left
// at the epoch with the lowest validation loss, otherwise at the final epoch.
// A batch size above the training-set size falls back to one full batch.
TrainTrace train(SgaeModel& model, const Matrix& train_set, const Matrix& val_set,
                 const TrainSchedule& schedule, const LabeledDataset* trace_set = nullptr);

// --- checkpointing ----------------------------------------------------------

// Versioned binary container: layer dims, activations, raw 64-bit weights,
// and the loss configuration. Round-trips bitwise.
void save_checkpoint(const SgaeModel& model, const std::string& path);
SgaeModel load_checkpoint(const std::string& path);

}  // namespace sgad
