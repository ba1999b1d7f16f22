#include "sgad/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "sgad/rng.hpp"

namespace sgad {

namespace {
// outward drift of the spiral arm over its full angular support
constexpr double kSpiralGrowth = 0.5;
}  // namespace

void LabeledDataset::validate() const {
    if (labels.size() != features.rows())
        throw std::invalid_argument("LabeledDataset: label count does not match rows");
    if (!field_id.empty() && field_id.size() != features.rows())
        throw std::invalid_argument("LabeledDataset: field_id length does not match rows");
    if (!radii.empty() && radii.size() != features.rows())
        throw std::invalid_argument("LabeledDataset: radii length does not match rows");
    if (!features.all_finite())
        throw std::invalid_argument("LabeledDataset: non-finite feature values");
}

std::string to_string(SyntheticFamily f) {
    switch (f) {
        case SyntheticFamily::Gauss1d: return "gauss1d";
        case SyntheticFamily::Polar2dRing: return "polar2d_ring";
        case SyntheticFamily::Polar2dCurve: return "polar2d_curve";
    }
    throw std::logic_error("to_string: unknown synthetic family");
}

SyntheticFamily synthetic_family_from_string(const std::string& s) {
    if (s == "gauss1d") return SyntheticFamily::Gauss1d;
    if (s == "polar2d_ring") return SyntheticFamily::Polar2dRing;
    if (s == "polar2d_curve") return SyntheticFamily::Polar2dCurve;
    throw std::invalid_argument("unknown synthetic family: " + s);
}

void SyntheticSpec::validate() const {
    if (sigma <= 0.0) throw std::invalid_argument("SyntheticSpec: sigma must be positive");
    if (mu_abnormal <= mu_normal)
        throw std::invalid_argument("SyntheticSpec: mu_abnormal must exceed mu_normal");
    if (n_samples == 0) throw std::invalid_argument("SyntheticSpec: n_samples must be positive");
    if (anomaly_ratio <= 0.0 || anomaly_ratio >= 1.0)
        throw std::invalid_argument("SyntheticSpec: anomaly_ratio must lie in (0, 1)");
}

LabeledDataset generate_synthetic(const SyntheticSpec& spec) {
    spec.validate();
    const std::size_t n = spec.n_samples;
    const std::size_t n_abnormal =
        static_cast<std::size_t>(std::llround(spec.anomaly_ratio * static_cast<double>(n)));
    const std::size_t dim = spec.feature_dim();

    Rng rng(spec.seed);
    LabeledDataset out;
    out.features = Matrix(n, dim);
    out.labels.resize(n);
    out.radii.resize(n);

    // anomalies occupy the first rows before the shuffle below
    for (std::size_t i = 0; i < n; ++i) {
        const bool abnormal = i < n_abnormal;
        const double mu = abnormal ? spec.mu_abnormal : spec.mu_normal;
        const double r = rng.normal(mu, spec.sigma);
        out.labels[i] = abnormal ? 1 : 0;
        out.radii[i] = r;
        auto row = out.features.row(i);
        switch (spec.family) {
            case SyntheticFamily::Gauss1d: {
                row[0] = r;
                break;
            }
            case SyntheticFamily::Polar2dRing: {
                const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
                row[0] = r * std::cos(theta);
                row[1] = r * std::sin(theta);
                break;
            }
            case SyntheticFamily::Polar2dCurve: {
                // spiral arm short of a full turn; the arm drifts outward by
                // kSpiralGrowth along the arc, so the class offset in r is
                // preserved at every angle and the arm ends never collide
                const double theta_min = 0.5 * std::numbers::pi;
                const double theta_max = 2.25 * std::numbers::pi;
                const double theta = rng.uniform(theta_min, theta_max);
                const double arc = (theta - theta_min) / (theta_max - theta_min);
                const double radius = r + kSpiralGrowth * arc;
                row[0] = radius * std::cos(theta);
                row[1] = radius * std::sin(theta);
                break;
            }
        }
    }

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    rng.shuffle(perm);
    return select_rows(out, perm);
}

LabeledDataset partition_fields(LabeledDataset dataset, double mu, double sigma) {
    if (dataset.radii.empty())
        throw std::invalid_argument("partition_fields: dataset has no recorded radii");
    dataset.field_id.resize(dataset.size());
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        const double r = dataset.radii[i];
        if (r < mu + sigma)
            dataset.field_id[i] = 0;
        else if (r < mu + 2.0 * sigma)
            dataset.field_id[i] = 1;
        else if (r < mu + 3.0 * sigma)
            dataset.field_id[i] = 2;
        else
            dataset.field_id[i] = 3;
    }
    return dataset;
}

SplitIndices split_indices(std::size_t n, const std::array<double, 3>& fractions,
                           std::uint64_t seed) {
    double sum = 0.0;
    for (double f : fractions) {
        if (f <= 0.0) throw std::invalid_argument("split_indices: fractions must be positive");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("split_indices: fractions must sum to 1");

    const std::size_t n_val =
        static_cast<std::size_t>(std::llround(fractions[1] * static_cast<double>(n)));
    const std::size_t n_test =
        static_cast<std::size_t>(std::llround(fractions[2] * static_cast<double>(n)));
    if (n_val + n_test > n) throw std::invalid_argument("split_indices: splits exceed dataset");
    const std::size_t n_train = n - n_val - n_test;

    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    Rng rng(seed);
    rng.shuffle(perm);

    SplitIndices out;
    out.train.assign(perm.begin(), perm.begin() + n_train);
    out.val.assign(perm.begin() + n_train, perm.begin() + n_train + n_val);
    out.test.assign(perm.begin() + n_train + n_val, perm.end());
    return out;
}

LabeledDataset select_rows(const LabeledDataset& dataset, const std::vector<std::size_t>& rows) {
    LabeledDataset out;
    out.features = Matrix(rows.size(), dataset.features.cols());
    out.labels.resize(rows.size());
    if (!dataset.field_id.empty()) out.field_id.resize(rows.size());
    if (!dataset.radii.empty()) out.radii.resize(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::size_t r = rows[i];
        if (r >= dataset.size()) throw std::invalid_argument("select_rows: index out of range");
        auto src = dataset.features.row(r);
        auto dst = out.features.row(i);
        std::copy(src.begin(), src.end(), dst.begin());
        out.labels[i] = dataset.labels[r];
        if (!dataset.field_id.empty()) out.field_id[i] = dataset.field_id[r];
        if (!dataset.radii.empty()) out.radii[i] = dataset.radii[r];
    }
    return out;
}

SplitDataset split_dataset(const LabeledDataset& dataset, const std::array<double, 3>& fractions,
                           std::uint64_t seed) {
    dataset.validate();
    const auto idx = split_indices(dataset.size(), fractions, seed);
    return {select_rows(dataset, idx.train), select_rows(dataset, idx.val),
            select_rows(dataset, idx.test)};
}

LabeledDataset inject_noise(const LabeledDataset& train_split, double sample_rate,
                            double feature_rate, std::uint64_t seed) {
    train_split.validate();
    if (sample_rate < 0.0 || sample_rate > 1.0 || feature_rate < 0.0 || feature_rate > 1.0)
        throw std::invalid_argument("inject_noise: rates must lie in [0, 1]");

    LabeledDataset out = train_split;
    std::vector<std::size_t> normal_rows;
    for (std::size_t i = 0; i < out.size(); ++i)
        if (out.labels[i] == 0) normal_rows.push_back(i);

    const std::size_t n_rows = static_cast<std::size_t>(
        std::llround(sample_rate * static_cast<double>(normal_rows.size())));
    const std::size_t dim = out.features.cols();
    const std::size_t n_cells =
        static_cast<std::size_t>(std::llround(feature_rate * static_cast<double>(dim)));
    if (n_rows == 0 || n_cells == 0 || out.size() < 2) return out;

    Rng rng(seed);
    rng.shuffle(normal_rows);
    std::vector<std::size_t> features(dim);
    for (std::size_t j = 0; j < dim; ++j) features[j] = j;

    for (std::size_t k = 0; k < n_rows; ++k) {
        const std::size_t row = normal_rows[k];
        rng.shuffle(features);
        for (std::size_t c = 0; c < n_cells; ++c) {
            std::size_t donor = rng.index(out.size() - 1);
            if (donor >= row) ++donor;  // any row but this one
            out.features(row, features[c]) = train_split.features(donor, features[c]);
        }
    }
    return out;
}

double anomaly_rate(const LabeledDataset& dataset) {
    if (dataset.size() == 0) return 0.0;
    std::size_t count = 0;
    for (int label : dataset.labels) count += label != 0;
    return static_cast<double>(count) / static_cast<double>(dataset.size());
}

LabeledDataset subsample_anomaly_rate(const LabeledDataset& train_split, double target_rate,
                                      std::uint64_t seed) {
    train_split.validate();
    if (target_rate <= 0.0 || target_rate >= 1.0)
        throw std::invalid_argument("subsample_anomaly_rate: target_rate must lie in (0, 1)");

    std::vector<std::size_t> normal_rows, anomaly_rows;
    for (std::size_t i = 0; i < train_split.size(); ++i)
        (train_split.labels[i] != 0 ? anomaly_rows : normal_rows).push_back(i);

    const double current =
        static_cast<double>(anomaly_rows.size()) / static_cast<double>(train_split.size());
    if (target_rate > current + 1e-12)
        throw std::invalid_argument("subsample_anomaly_rate: target_rate above current rate");

    // keep k anomalies so that k / (n_normal + k) is closest to target_rate
    const double n_normal = static_cast<double>(normal_rows.size());
    std::size_t keep = static_cast<std::size_t>(
        std::llround(target_rate * n_normal / (1.0 - target_rate)));
    keep = std::min(keep, anomaly_rows.size());

    Rng rng(seed);
    rng.shuffle(anomaly_rows);
    anomaly_rows.resize(keep);

    std::vector<std::size_t> kept;
    kept.reserve(normal_rows.size() + keep);
    std::vector<bool> keep_row(train_split.size(), false);
    for (std::size_t i : normal_rows) keep_row[i] = true;
    for (std::size_t i : anomaly_rows) keep_row[i] = true;
    for (std::size_t i = 0; i < train_split.size(); ++i)
        if (keep_row[i]) kept.push_back(i);  // preserves original row order
    return select_rows(train_split, kept);
}

}  // namespace sgad
