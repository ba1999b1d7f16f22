#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "sgad/dataset.hpp"

namespace sgad {

// Columns and protocol knobs for turning a raw CSV into a model-ready
// dataset: dedup, missing-row removal, one-hot categoricals, per-feature
// standardization with training-split statistics, swap-noise injection,
// and a seeded train/val/test split.
struct PreprocessSpec {
    std::vector<std::string> numeric_columns;
    std::vector<std::string> categorical_columns;
    std::string label_column;
    bool drop_duplicates = true;
    bool drop_missing = true;
    double noise_sample_rate = 0.01;
    double noise_feature_rate = 0.05;
    std::array<double, 3> split = {0.6, 0.2, 0.2};
    std::uint64_t seed = 0;

    void validate() const;
};

// Raw CSV rows as strings plus a per-row missing flag (set when any declared
// numeric cell fails to parse or any declared cell is empty/NA).
struct RawTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;
    std::vector<bool> missing;

    std::size_t column_index(const std::string& name) const;
};

// First row is the header; comma-separated; double-quoted fields with ""
// escapes allowed. All declared columns must be present.
RawTable load_csv(const std::string& path, const PreprocessSpec& spec);
RawTable parse_csv_text(const std::string& text, const PreprocessSpec& spec);

// Full preprocessing over the filtered table. Feature order: numeric columns
// as declared, then one-hot groups per categorical column with category
// values sorted. Standardization statistics come from the rows that the
// (spec.split, spec.seed) partition assigns to train; split_dataset with the
// same fractions and seed reproduces that partition. Zero-variance numeric
// columns standardize to 0 with a warning. When drop_missing is off, missing
// numeric cells become 0 and missing categoricals their own category.
LabeledDataset preprocess(const RawTable& table, const PreprocessSpec& spec);

}  // namespace sgad
