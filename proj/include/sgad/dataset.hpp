#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sgad/matrix.hpp"

namespace sgad {

// Feature matrix plus per-row binary anomaly labels. Labels are used only by
// evaluation and by the data-preparation protocol, never inside training
// losses. field_id (0..3) and radii are filled by the synthetic generators.
struct LabeledDataset {
    Matrix features;
    std::vector<int> labels;     // 1 = anomaly
    std::vector<int> field_id;   // empty, or one of 0..3 per row
    std::vector<double> radii;   // empty, or the radial statistic per row

    std::size_t size() const { return labels.size(); }
    bool has_fields() const { return !field_id.empty(); }
    void validate() const;
};

enum class SyntheticFamily { Gauss1d, Polar2dRing, Polar2dCurve };

std::string to_string(SyntheticFamily f);
SyntheticFamily synthetic_family_from_string(const std::string& s);

// Normal and abnormal classes share sigma and differ in the mean of their
// radial variable. Gauss1d emits the radius directly as the one feature;
// Polar2dRing emits (r cos t, r sin t) with t uniform over the full circle;
// Polar2dCurve adds an outward spiral drift to the radius over one turn
// (t uniform in [0.5 pi, 2.5 pi]) for a harder, curved manifold.
struct SyntheticSpec {
    SyntheticFamily family = SyntheticFamily::Gauss1d;
    double mu_normal = 1.0;
    double mu_abnormal = 2.0;
    double sigma = 0.25;
    std::size_t n_samples = 10000;
    double anomaly_ratio = 0.1;
    std::uint64_t seed = 0;

    std::size_t feature_dim() const { return family == SyntheticFamily::Gauss1d ? 1 : 2; }
    void validate() const;
};

// Exactly round(anomaly_ratio * n_samples) rows carry label 1; rows are
// emitted in seeded shuffled order, with each row's radius recorded.
LabeledDataset generate_synthetic(const SyntheticSpec& spec);

// Assigns field_id per row from its radius: 0 below mu+sigma, then 1, 2 in
// the successive sigma bands, 3 at and above mu+3sigma (half-open upward).
LabeledDataset partition_fields(LabeledDataset dataset, double mu, double sigma);

// Seeded shuffled index partition; val/test take round(n * fraction) rows,
// the remainder goes to train.
struct SplitIndices {
    std::vector<std::size_t> train, val, test;
};
SplitIndices split_indices(std::size_t n, const std::array<double, 3>& fractions,
                           std::uint64_t seed);

struct SplitDataset {
    LabeledDataset train, val, test;
};
SplitDataset split_dataset(const LabeledDataset& dataset, const std::array<double, 3>& fractions,
                           std::uint64_t seed);

// Swap noise on the training split: round(sample_rate * n_normal) normal rows
// each get round(feature_rate * n_features) cells replaced by the same
// feature's value from another uniformly chosen row. Labels unchanged.
LabeledDataset inject_noise(const LabeledDataset& train_split, double sample_rate,
                            double feature_rate, std::uint64_t seed);

// Drops anomalies uniformly at random until the anomaly fraction is within
// one sample of target_rate; normal rows are untouched.
LabeledDataset subsample_anomaly_rate(const LabeledDataset& train_split, double target_rate,
                                      std::uint64_t seed);

double anomaly_rate(const LabeledDataset& dataset);

LabeledDataset select_rows(const LabeledDataset& dataset, const std::vector<std::size_t>& rows);

}  // namespace sgad
