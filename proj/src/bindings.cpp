#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>

#include "sgad/dataset.hpp"
#include "sgad/experiment.hpp"
#include "sgad/metrics.hpp"
#include "sgad/model.hpp"

namespace py = pybind11;
using namespace sgad;

namespace {

using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using IntArray = py::array_t<int, py::array::c_style | py::array::forcecast>;

Matrix to_matrix(const DoubleArray& arr) {
    if (arr.ndim() != 2) throw std::invalid_argument("expected a 2-d array");
    Matrix m(static_cast<std::size_t>(arr.shape(0)), static_cast<std::size_t>(arr.shape(1)));
    std::memcpy(m.values().data(), arr.data(), m.size() * sizeof(double));
    return m;
}

py::array_t<double> to_array(const Matrix& m) {
    py::array_t<double> arr({m.rows(), m.cols()});
    std::memcpy(arr.mutable_data(), m.values().data(), m.size() * sizeof(double));
    return arr;
}

std::vector<double> to_vector(const DoubleArray& arr) {
    if (arr.ndim() != 1) throw std::invalid_argument("expected a 1-d array");
    return {arr.data(), arr.data() + arr.shape(0)};
}

std::vector<int> to_int_vector(const IntArray& arr) {
    if (arr.ndim() != 1) throw std::invalid_argument("expected a 1-d array");
    return {arr.data(), arr.data() + arr.shape(0)};
}

SgLossConfig make_loss_config(const std::string& variant, double lambda_se, double lambda_a,
                              double a, double mu0, double eps_p) {
    SgLossConfig cfg;
    cfg.variant = variant_from_string(variant);
    cfg.lambda_se = lambda_se;
    cfg.lambda_a = lambda_a;
    cfg.a = a;
    cfg.mu0 = mu0;
    cfg.eps_p = eps_p;
    cfg.validate();
    return cfg;
}

py::dict aggregates_dict(const RunArtifact& artifact) {
    py::dict out;
    for (const auto& [key, agg] : artifact.aggregates)
        out[py::str(key)] = py::make_tuple(agg.mean, agg.stddev);
    py::dict wrapper;
    wrapper["out_dir"] = artifact.out_dir;
    wrapper["aggregates"] = out;
    return wrapper;
}

}  // namespace

PYBIND11_MODULE(_sgad, m) {
    m.doc() = "score-guided autoencoder anomaly detection";

    py::class_<SgaeModel>(m, "Model")
        .def(py::init([](std::size_t input_dim, const std::string& variant, double lambda_se,
                         double lambda_a, double a, double mu0, double eps_p,
                         const std::string& preset, std::uint64_t seed) {
                 const SgLossConfig cfg =
                     make_loss_config(variant, lambda_se, lambda_a, a, mu0, eps_p);
                 const LayerPreset layers = preset == "tabular" ? tabular_preset(input_dim)
                                                                : simulation_preset(input_dim);
                 return make_sgae(input_dim, layers, cfg, seed);
             }),
             py::arg("input_dim"), py::arg("variant") = "original", py::arg("lambda_se") = 0.01,
             py::arg("lambda_a") = 18.0, py::arg("a") = 6.0, py::arg("mu0") = 0.01,
             py::arg("eps_p") = 0.8, py::arg("preset") = "simulation", py::arg("seed") = 0)
        .def_property_readonly("input_dim", &SgaeModel::input_dim)
        .def_property_readonly("latent_dim", &SgaeModel::latent_dim)
        .def_property_readonly("variant",
                               [](const SgaeModel& model) { return to_string(model.hyper.variant); })
        .def("train",
             [](SgaeModel& model, const DoubleArray& train_set, const DoubleArray& val_set,
                std::size_t epochs, std::size_t batch_size, double learning_rate,
                std::uint64_t seed, bool select_best) {
                 TrainSchedule schedule;
                 schedule.epochs = epochs;
                 schedule.batch_size = batch_size;
                 schedule.learning_rate = learning_rate;
                 schedule.seed = seed;
                 schedule.select_best = select_best;
                 const TrainTrace trace =
                     train(model, to_matrix(train_set), to_matrix(val_set), schedule);
                 py::list train_loss, val_loss;
                 for (const auto& e : trace.epochs) {
                     train_loss.append(e.train_loss);
                     val_loss.append(e.val_loss);
                 }
                 py::dict out;
                 out["train_loss"] = train_loss;
                 out["val_loss"] = val_loss;
                 out["best_epoch"] = trace.best_epoch + 1;
                 return out;
             },
             py::arg("train_set"), py::arg("val_set"), py::arg("epochs") = 100,
             py::arg("batch_size") = 1024, py::arg("learning_rate") = 1e-4, py::arg("seed") = 0,
             py::arg("select_best") = true)
        .def("predict",
             [](const SgaeModel& model, const DoubleArray& batch) {
                 const auto scores = predict_scores(model, to_matrix(batch));
                 return py::array_t<double>(scores.size(), scores.data());
             },
             py::arg("batch"))
        .def("total_loss",
             [](const SgaeModel& model, const DoubleArray& batch) {
                 const LossValue loss = total_loss(model, to_matrix(batch));
                 py::dict out;
                 out["total"] = loss.total;
                 out["recon"] = loss.recon;
                 out["score_guidance"] = loss.score_guidance;
                 out["epsilon"] = loss.epsilon;
                 return out;
             },
             py::arg("batch"))
        .def("save", &save_checkpoint, py::arg("path"))
        .def_static("load", &load_checkpoint, py::arg("path"));

    m.def("generate_synthetic",
          [](const std::string& family, double mu_normal, double mu_abnormal, double sigma,
             std::size_t n_samples, double anomaly_ratio, std::uint64_t seed, bool with_fields) {
              SyntheticSpec spec;
              spec.family = synthetic_family_from_string(family);
              spec.mu_normal = mu_normal;
              spec.mu_abnormal = mu_abnormal;
              spec.sigma = sigma;
              spec.n_samples = n_samples;
              spec.anomaly_ratio = anomaly_ratio;
              spec.seed = seed;
              LabeledDataset ds = generate_synthetic(spec);
              if (with_fields) ds = partition_fields(std::move(ds), mu_normal, sigma);
              py::dict out;
              out["features"] = to_array(ds.features);
              out["labels"] = py::array_t<int>(ds.labels.size(), ds.labels.data());
              out["radii"] = py::array_t<double>(ds.radii.size(), ds.radii.data());
              if (with_fields)
                  out["field_id"] = py::array_t<int>(ds.field_id.size(), ds.field_id.data());
              return out;
          },
          py::arg("family") = "gauss1d", py::arg("mu_normal") = 1.0, py::arg("mu_abnormal") = 2.0,
          py::arg("sigma") = 0.25, py::arg("n_samples") = 10000, py::arg("anomaly_ratio") = 0.1,
          py::arg("seed") = 0, py::arg("with_fields") = false);

    m.def("auc_roc",
          [](const DoubleArray& scores, const IntArray& labels) {
              return auc_roc(to_vector(scores), to_int_vector(labels));
          },
          py::arg("scores"), py::arg("labels"));
    m.def("auc_pr",
          [](const DoubleArray& scores, const IntArray& labels) {
              return auc_pr(to_vector(scores), to_int_vector(labels));
          },
          py::arg("scores"), py::arg("labels"));
    m.def("ks_statistic",
          [](const DoubleArray& normal, const DoubleArray& abnormal) {
              return ks_statistic(to_vector(normal), to_vector(abnormal));
          },
          py::arg("scores_normal"), py::arg("scores_abnormal"));
    m.def("score_difference",
          [](const DoubleArray& scores, const IntArray& labels, const IntArray& field_id) {
              const auto diffs =
                  score_difference(to_vector(scores), to_int_vector(labels),
                                   to_int_vector(field_id));
              py::list out;
              for (const auto& d : diffs)
                  out.append(d ? py::object(py::float_(*d)) : py::none());
              return out;
          },
          py::arg("scores"), py::arg("labels"), py::arg("field_id"));

    m.def("run_simulate",
          [](const std::string& config_json) {
              return aggregates_dict(cmd_simulate(parse_config_text(config_json)));
          },
          py::arg("config_json"));
    m.def("run_evaluate",
          [](const std::string& config_json) {
              return aggregates_dict(cmd_evaluate(parse_config_text(config_json)));
          },
          py::arg("config_json"));
    m.def("run_sweep",
          [](const std::string& config_json) {
              return aggregates_dict(cmd_sweep(parse_config_text(config_json)));
          },
          py::arg("config_json"));
    m.def("run_rate",
          [](const std::string& config_json) {
              return aggregates_dict(cmd_rate(parse_config_text(config_json)));
          },
          py::arg("config_json"));
}
