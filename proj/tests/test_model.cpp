#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "fd_oracle.hpp"
#include "sgad/dataset.hpp"
#include "sgad/model.hpp"
#include "sgad/rng.hpp"

using namespace sgad;

namespace {

SgLossConfig config_for(Variant v) {
    SgLossConfig cfg;
    cfg.variant = v;
    return cfg;
}

// encoder and decoder are identity maps; reconstruction is exact
SgaeModel identity_autoencoder(std::size_t dim, Variant variant) {
    auto identity_layer = [dim] {
        DenseLayer layer;
        layer.weights = Matrix(dim, dim);
        for (std::size_t i = 0; i < dim; ++i) layer.weights(i, i) = 1.0;
        layer.bias.assign(dim, 0.0);
        layer.activation = Activation::Linear;
        return layer;
    };
    SgaeModel model;
    model.hyper = config_for(variant);
    model.encoder.layers = {identity_layer()};
    model.decoder.layers = {identity_layer()};
    if (variant == Variant::Original) {
        DenseLayer head;
        head.weights = Matrix(dim, 1, 0.25);
        head.bias = {0.0};
        head.activation = Activation::Linear;
        model.scorer.layers = {head};
    }
    return model;
}

Matrix random_matrix(std::size_t rows, std::size_t cols, Rng& rng, double scale = 1.0) {
    Matrix m(rows, cols);
    for (double& v : m.values()) v = rng.normal(0.0, scale);
    return m;
}

std::vector<double> flatten_params(const SgaeModel& model) {
    std::vector<double> flat;
    for (const auto* net : {&model.encoder, &model.decoder, &model.scorer})
        for (const auto& view : net->parameter_views())
            flat.insert(flat.end(), view.begin(), view.end());
    return flat;
}

}  // namespace

TEST_CASE("presets follow the input dimension") {
    CHECK(tabular_preset(30).encoder_widths == std::vector<std::size_t>{20});
    CHECK(tabular_preset(51).encoder_widths == std::vector<std::size_t>{40, 20});
    CHECK(tabular_preset(119).encoder_widths == std::vector<std::size_t>{80, 40, 20});
    CHECK(tabular_preset(119).scorer_widths == std::vector<std::size_t>{20, 10, 1});
    CHECK(simulation_preset(1).encoder_widths == std::vector<std::size_t>{20});
    CHECK(simulation_preset(2).encoder_widths == std::vector<std::size_t>{64, 20});
    CHECK(simulation_preset(2).scorer_widths == std::vector<std::size_t>{20, 1});
}

TEST_CASE("make_sgae wires dimensions and variant heads") {
    const SgaeModel model = make_sgae(51, tabular_preset(51), config_for(Variant::Original), 1);
    CHECK(model.input_dim() == 51);
    CHECK(model.latent_dim() == 20);
    CHECK(model.decoder.input_dim() == 20);
    CHECK(model.decoder.output_dim() == 51);
    CHECK(model.decoder.layers.size() == 2);  // mirrors (40, 20)
    CHECK(model.scorer.output_dim() == 1);

    const SgaeModel normal = make_sgae(51, tabular_preset(51), config_for(Variant::Normal), 1);
    CHECK(normal.scorer.output_dim() == 2);

    const SgaeModel plain = make_sgae(51, tabular_preset(51), config_for(Variant::PlainAe), 1);
    CHECK_FALSE(plain.has_scorer());

    // encoder and decoder draws precede scorer draws in the seed stream
    const SgaeModel original = make_sgae(51, tabular_preset(51), config_for(Variant::Original), 1);
    for (std::size_t l = 0; l < plain.encoder.layers.size(); ++l)
        CHECK(plain.encoder.layers[l].weights == original.encoder.layers[l].weights);
    for (std::size_t l = 0; l < plain.decoder.layers.size(); ++l)
        CHECK(plain.decoder.layers[l].weights == original.decoder.layers[l].weights);
}

TEST_CASE("forward_batch contracts") {
    const SgaeModel model = make_sgae(3, simulation_preset(3), config_for(Variant::Original), 7);
    Rng rng(5);
    const Matrix batch = random_matrix(6, 3, rng);
    const auto samples = forward_batch(model, batch);
    REQUIRE(samples.size() == 6);
    for (const auto& s : samples) {
        CHECK(s.z.size() == model.latent_dim());
        CHECK(s.x_tilde.size() == 3);
        CHECK(s.recon_error >= 0.0);
        CHECK(std::isfinite(s.s));
    }
    CHECK_THROWS_AS(forward_batch(model, Matrix(2, 5)), std::invalid_argument);
}

TEST_CASE("identity reconstruction yields zero errors, shifted bias a 3-4-5 norm") {
    SgaeModel model = identity_autoencoder(2, Variant::Original);
    Rng rng(9);
    const Matrix batch = random_matrix(5, 2, rng);
    for (const auto& s : forward_batch(model, batch)) CHECK(s.recon_error == 0.0);

    model.decoder.layers[0].bias = {3.0, 4.0};  // reconstruction = x + (3, 4)
    for (const auto& s : forward_batch(model, batch))
        CHECK(s.recon_error == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("total loss reduces to the reconstruction loss when lambda_se is zero") {
    SgLossConfig cfg = config_for(Variant::Original);
    cfg.lambda_se = 0.0;
    const SgaeModel model = make_sgae(2, simulation_preset(2), cfg, 3);
    Rng rng(11);
    const Matrix batch = random_matrix(32, 2, rng);

    const LossValue loss = total_loss(model, batch);
    const Matrix recon = mlp_forward(model.decoder, mlp_forward(model.encoder, batch));
    CHECK(loss.total == reconstruction_loss(batch, recon));
}

TEST_CASE("plain autoencoder with exact reconstruction has zero loss and zero scores") {
    const SgaeModel model = identity_autoencoder(4, Variant::PlainAe);
    Rng rng(13);
    const Matrix batch = random_matrix(8, 4, rng);
    CHECK(total_loss(model, batch).total == 0.0);
    for (double s : predict_scores(model, batch)) CHECK(s == 0.0);
}

TEST_CASE("analytic gradients of the total loss match finite differences") {
    Rng rng(41);
    std::size_t checked = 0, passed = 0;
    double worst = 0.0;
    const Variant variants[] = {Variant::Original, Variant::Recon, Variant::Normal,
                                Variant::Lognormal, Variant::PlainAe};
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t dim = 1 + rng.index(4);
        SgLossConfig cfg = config_for(variants[trial % 5]);
        cfg.lambda_se = 0.05;  // keep the guidance term visible next to the base loss
        LayerPreset preset{{1 + rng.index(6), 1 + rng.index(6)}, {1 + rng.index(6), 1}};
        const SgaeModel model = make_sgae(dim, preset, cfg, rng.next_u64());
        const Matrix batch = random_matrix(5, dim, rng);
        const auto result = sgad::testing::fd_check_model(model, batch, 1e-4, 1e-4);
        checked += result.checked;
        passed += result.passed;
        worst = std::max(worst, result.worst_rel);
    }
    CHECK(checked > 300);
    CHECK(static_cast<double>(passed) / static_cast<double>(checked) >= 0.99);
}

TEST_CASE("one generic training step equals pure gradients plus manual adam") {
    for (Variant variant : {Variant::Original, Variant::Recon, Variant::Normal,
                            Variant::PlainAe}) {
        CAPTURE(to_string(variant));
        const SgLossConfig cfg = config_for(variant);
        SgaeModel stepped = make_sgae(3, simulation_preset(3), cfg, 55);
        SgaeModel manual = stepped;
        Rng rng(56);
        const Matrix batch = random_matrix(16, 3, rng);
        const double lr = 1e-3;

        AutoencoderLearner learner(stepped.encoder, stepped.decoder, lr);
        AdamState scorer_adam;
        if (stepped.has_scorer())
            scorer_adam = make_adam_state(stepped.scorer.parameter_count(), lr);
        sgm_train_step(learner, stepped.has_scorer() ? &stepped.scorer : nullptr,
                       stepped.has_scorer() ? &scorer_adam : nullptr, cfg, batch);

        SgaeGradients grads;
        total_loss_with_gradients(manual, batch, grads);
        AdamState enc = make_adam_state(manual.encoder.parameter_count(), lr);
        AdamState dec = make_adam_state(manual.decoder.parameter_count(), lr);
        adam_update(enc, manual.encoder.parameter_views(), grads.encoder.parameter_views());
        adam_update(dec, manual.decoder.parameter_views(), grads.decoder.parameter_views());
        if (manual.has_scorer()) {
            AdamState sc = make_adam_state(manual.scorer.parameter_count(), lr);
            adam_update(sc, manual.scorer.parameter_views(), grads.scorer.parameter_views());
        }
        CHECK(flatten_params(stepped) == flatten_params(manual));
    }
}

namespace {

// latent = input, signal = Euclidean norm of the row, nothing to learn
class NormSignalLearner final : public RepresentationLearner {
public:
    explicit NormSignalLearner(std::size_t dim) : dim_(dim) {}
    std::size_t input_dim() const override { return dim_; }
    std::size_t latent_dim() const override { return dim_; }
    Forward forward(const Matrix& batch) override {
        Forward fwd;
        fwd.latent = batch;
        for (std::size_t i = 0; i < batch.rows(); ++i) {
            double sq = 0.0;
            for (double v : batch.row(i)) sq += v * v;
            fwd.signal.push_back(std::sqrt(sq));
        }
        return fwd;
    }
    void update(const Matrix&, std::span<const double>) override {}

private:
    std::size_t dim_;
};

}  // namespace

TEST_CASE("a scoring head attached to a custom learner separates by signal") {
    SgLossConfig cfg = config_for(Variant::Original);
    cfg.lambda_se = 1.0;
    cfg.eps_p = 33.0 / 64.0;  // threshold lands between the two radius groups

    Rng rng(77);
    Matrix batch(64, 2);
    for (std::size_t i = 0; i < batch.rows(); ++i) {
        const double radius = i % 2 == 0 ? 0.5 : 3.0;
        batch(i, 0) = radius + 0.05 * rng.normal();
        batch(i, 1) = 0.05 * rng.normal();
    }

    NormSignalLearner learner(2);
    Rng init(78);
    MlpNetwork scorer = make_mlp(2, {8, 1}, Activation::Relu, Activation::Linear, init);
    AdamState adam = make_adam_state(scorer.parameter_count(), 1e-2);
    for (int step = 0; step < 1200; ++step)
        sgm_train_step(learner, &scorer, &adam, cfg, batch);

    const Matrix scores = mlp_forward(scorer, batch);
    double low = 0.0, high = 0.0;
    for (std::size_t i = 0; i < batch.rows(); ++i)
        (i % 2 == 0 ? low : high) += scores(i, 0);
    low /= 32.0;
    high /= 32.0;
    CHECK(high > cfg.a - 1.0);               // hinge pushes the far group to a
    CHECK(std::abs(low - cfg.mu0) < 0.1);    // abs term pins the near group at mu0
}

TEST_CASE("one epoch of training reduces the reconstruction loss") {
    SyntheticSpec spec;
    spec.n_samples = 256;
    spec.seed = 4;
    const LabeledDataset data = generate_synthetic(spec);

    SgaeModel model = make_sgae(1, simulation_preset(1), config_for(Variant::PlainAe), 5);
    const double before = total_loss(model, data.features).total;

    TrainSchedule schedule;
    schedule.epochs = 1;
    schedule.batch_size = 32;
    schedule.learning_rate = 1e-2;
    schedule.select_best = false;
    train(model, data.features, data.features, schedule);
    CHECK(total_loss(model, data.features).total < before);
}

TEST_CASE("training is deterministic and ignores trace labels") {
    SyntheticSpec spec;
    spec.n_samples = 300;
    spec.seed = 21;
    LabeledDataset data = generate_synthetic(spec);
    data = partition_fields(std::move(data), spec.mu_normal, spec.sigma);

    TrainSchedule schedule;
    schedule.epochs = 3;
    schedule.batch_size = 64;
    schedule.seed = 9;

    auto run_once = [&](const LabeledDataset& trace_set) {
        SgaeModel model = make_sgae(1, simulation_preset(1), config_for(Variant::Original), 30);
        const TrainTrace trace =
            train(model, data.features, data.features, schedule, &trace_set);
        return std::make_pair(flatten_params(model), trace);
    };

    const auto [params_a, trace_a] = run_once(data);
    const auto [params_b, trace_b] = run_once(data);
    CHECK(params_a == params_b);
    REQUIRE(trace_a.epochs.size() == trace_b.epochs.size());
    for (std::size_t e = 0; e < trace_a.epochs.size(); ++e) {
        CHECK(trace_a.epochs[e].train_loss == trace_b.epochs[e].train_loss);
        CHECK(trace_a.epochs[e].val_loss == trace_b.epochs[e].val_loss);
    }

    LabeledDataset permuted = data;
    Rng rng(123);
    rng.shuffle(permuted.labels);
    const auto [params_c, trace_c] = run_once(permuted);
    CHECK(params_a == params_c);  // labels only feed the recorded diagnostics
}

TEST_CASE("oversized batch size falls back to one full batch") {
    SyntheticSpec spec;
    spec.n_samples = 50;
    spec.seed = 2;
    const LabeledDataset data = generate_synthetic(spec);
    SgaeModel model = make_sgae(1, simulation_preset(1), config_for(Variant::Original), 3);
    TrainSchedule schedule;
    schedule.epochs = 1;
    schedule.batch_size = 4096;
    CHECK_NOTHROW(train(model, data.features, data.features, schedule));
}

TEST_CASE("non-finite data aborts with the failing epoch and batch") {
    SgaeModel model = make_sgae(1, simulation_preset(1), config_for(Variant::Original), 3);
    Matrix bad(8, 1);
    bad(5, 0) = std::numeric_limits<double>::quiet_NaN();
    TrainSchedule schedule;
    schedule.epochs = 1;
    schedule.batch_size = 8;
    try {
        train(model, bad, bad, schedule);
        FAIL("expected a runtime_error");
    } catch (const std::runtime_error& e) {
        CHECK(std::string(e.what()).find("epoch 1") != std::string::npos);
    }
}

TEST_CASE("scores of a batch equal scores of its rows predicted one at a time") {
    for (Variant variant : {Variant::Original, Variant::Recon, Variant::Normal}) {
        const SgaeModel model = make_sgae(2, simulation_preset(2), config_for(variant), 77);
        Rng rng(78);
        const Matrix batch = random_matrix(7, 2, rng);
        const auto batched = predict_scores(model, batch);
        for (std::size_t i = 0; i < batch.rows(); ++i) {
            Matrix row(1, 2);
            row(0, 0) = batch(i, 0);
            row(0, 1) = batch(i, 1);
            CHECK(predict_scores(model, row)[0] == batched[i]);
        }
    }
}

TEST_CASE("checkpoints round-trip bitwise") {
    const SgaeModel model = make_sgae(5, tabular_preset(5), config_for(Variant::Normal), 99);
    const std::string path_a = "checkpoint_a.ckpt";
    const std::string path_b = "checkpoint_b.ckpt";
    save_checkpoint(model, path_a);
    const SgaeModel loaded = load_checkpoint(path_a);
    CHECK(flatten_params(loaded) == flatten_params(model));
    CHECK(loaded.hyper.lambda_se == model.hyper.lambda_se);
    CHECK(loaded.hyper.variant == model.hyper.variant);

    save_checkpoint(loaded, path_b);
    std::ifstream a(path_a, std::ios::binary), b(path_b, std::ios::binary);
    const std::string bytes_a((std::istreambuf_iterator<char>(a)),
                              std::istreambuf_iterator<char>());
    const std::string bytes_b((std::istreambuf_iterator<char>(b)),
                              std::istreambuf_iterator<char>());
    CHECK(bytes_a == bytes_b);

    Rng rng(1);
    const Matrix batch = random_matrix(4, 5, rng);
    CHECK(predict_scores(loaded, batch) == predict_scores(model, batch));

    std::remove(path_a.c_str());
    std::remove(path_b.c_str());
    CHECK_THROWS_AS(load_checkpoint("does_not_exist.ckpt"), std::runtime_error);
}

TEST_CASE("epoch-level threshold recomputation trains deterministically") {
    SyntheticSpec spec;
    spec.n_samples = 200;
    spec.seed = 8;
    const LabeledDataset data = generate_synthetic(spec);
    TrainSchedule schedule;
    schedule.epochs = 2;
    schedule.batch_size = 64;
    schedule.epsilon_mode = EpsilonMode::PerEpoch;

    auto run_once = [&] {
        SgaeModel model = make_sgae(1, simulation_preset(1), config_for(Variant::Original), 12);
        train(model, data.features, data.features, schedule);
        return flatten_params(model);
    };
    CHECK(run_once() == run_once());
}
