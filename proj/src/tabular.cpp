#include "sgad/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace sgad {

void PreprocessSpec::validate() const {
    if (label_column.empty()) throw std::invalid_argument("PreprocessSpec: label_column required");
    if (numeric_columns.empty() && categorical_columns.empty())
        throw std::invalid_argument("PreprocessSpec: no feature columns declared");
    if (noise_sample_rate < 0.0 || noise_sample_rate > 1.0 || noise_feature_rate < 0.0 ||
        noise_feature_rate > 1.0)
        throw std::invalid_argument("PreprocessSpec: noise rates must lie in [0, 1]");
    double sum = 0.0;
    for (double f : split) {
        if (f <= 0.0) throw std::invalid_argument("PreprocessSpec: split fractions must be positive");
        sum += f;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("PreprocessSpec: split fractions must sum to 1");
}

std::size_t RawTable::column_index(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw std::invalid_argument("missing column: " + name);
    return static_cast<std::size_t>(it - columns.begin());
}

namespace {

// one CSV record, handling quoted fields and "" escapes
std::vector<std::string> split_record(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cells.push_back(std::move(cell));
            cell.clear();
        } else if (c != '\r') {
            cell += c;
        }
    }
    cells.push_back(std::move(cell));
    return cells;
}

bool is_missing_token(const std::string& cell) {
    return cell.empty() || cell == "NA" || cell == "na" || cell == "N/A" || cell == "NaN" ||
           cell == "nan" || cell == "?";
}

bool parse_numeric(const std::string& cell, double& out) {
    if (is_missing_token(cell)) return false;
    try {
        std::size_t consumed = 0;
        out = std::stod(cell, &consumed);
        while (consumed < cell.size() && std::isspace(static_cast<unsigned char>(cell[consumed])))
            ++consumed;
        return consumed == cell.size() && std::isfinite(out);
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace

RawTable parse_csv_text(const std::string& text, const PreprocessSpec& spec) {
    spec.validate();
    RawTable table;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("load_csv: empty input");
    table.columns = split_record(line);

    std::vector<std::size_t> numeric_idx;
    for (const auto& name : spec.numeric_columns) numeric_idx.push_back(table.column_index(name));
    std::vector<std::size_t> declared_idx = numeric_idx;
    for (const auto& name : spec.categorical_columns)
        declared_idx.push_back(table.column_index(name));
    declared_idx.push_back(table.column_index(spec.label_column));

    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        auto cells = split_record(line);
        if (cells.size() != table.columns.size())
            throw std::invalid_argument("load_csv: row " + std::to_string(table.rows.size() + 2) +
                                        " has " + std::to_string(cells.size()) + " cells, expected " +
                                        std::to_string(table.columns.size()));
        bool missing = false;
        for (std::size_t idx : declared_idx)
            if (is_missing_token(cells[idx])) missing = true;
        double value = 0.0;
        for (std::size_t idx : numeric_idx)
            if (!parse_numeric(cells[idx], value)) missing = true;
        table.rows.push_back(std::move(cells));
        table.missing.push_back(missing);
    }
    return table;
}

RawTable load_csv(const std::string& path, const PreprocessSpec& spec) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_csv: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv_text(buf.str(), spec);
}

LabeledDataset preprocess(const RawTable& table, const PreprocessSpec& spec) {
    spec.validate();
    if (table.missing.size() != table.rows.size())
        throw std::invalid_argument("preprocess: malformed table");

    const std::size_t label_idx = table.column_index(spec.label_column);
    std::vector<std::size_t> numeric_idx, categorical_idx;
    for (const auto& name : spec.numeric_columns) numeric_idx.push_back(table.column_index(name));
    for (const auto& name : spec.categorical_columns)
        categorical_idx.push_back(table.column_index(name));

    // duplicates first, then missing rows
    std::vector<std::size_t> kept;
    std::unordered_set<std::string> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        if (spec.drop_duplicates) {
            std::string key;
            for (const auto& cell : table.rows[r]) {
                key += cell;
                key += '\x1f';
            }
            if (!seen.insert(std::move(key)).second) continue;
        }
        if (spec.drop_missing && table.missing[r]) continue;
        kept.push_back(r);
    }
    if (kept.empty()) throw std::invalid_argument("preprocess: no rows survive filtering");

    // category vocabularies over the whole filtered table, sorted for a
    // deterministic column order
    std::vector<std::vector<std::string>> vocab(categorical_idx.size());
    for (std::size_t c = 0; c < categorical_idx.size(); ++c) {
        std::set<std::string> values;
        for (std::size_t r : kept) values.insert(table.rows[r][categorical_idx[c]]);
        vocab[c].assign(values.begin(), values.end());
    }

    std::size_t dim = numeric_idx.size();
    for (const auto& v : vocab) dim += v.size();

    LabeledDataset out;
    out.features = Matrix(kept.size(), dim);
    out.labels.resize(kept.size());
    for (std::size_t i = 0; i < kept.size(); ++i) {
        const auto& row = table.rows[kept[i]];
        double value = 0.0;
        for (std::size_t c = 0; c < numeric_idx.size(); ++c)
            out.features(i, c) = parse_numeric(row[numeric_idx[c]], value) ? value : 0.0;
        std::size_t offset = numeric_idx.size();
        for (std::size_t c = 0; c < categorical_idx.size(); ++c) {
            const auto& cell = row[categorical_idx[c]];
            const auto it = std::lower_bound(vocab[c].begin(), vocab[c].end(), cell);
            if (it != vocab[c].end() && *it == cell)
                out.features(i, offset + static_cast<std::size_t>(it - vocab[c].begin())) = 1.0;
            offset += vocab[c].size();
        }
        if (!parse_numeric(row[label_idx], value))
            throw std::invalid_argument("preprocess: unparseable label in kept row " +
                                        std::to_string(kept[i] + 2));
        out.labels[i] = value != 0.0 ? 1 : 0;
    }

    // standardize numeric features with training-split statistics only
    const auto idx = split_indices(kept.size(), spec.split, spec.seed);
    for (std::size_t c = 0; c < numeric_idx.size(); ++c) {
        double mean = 0.0;
        for (std::size_t r : idx.train) mean += out.features(r, c);
        mean /= static_cast<double>(idx.train.size());
        double var = 0.0;
        for (std::size_t r : idx.train) {
            const double d = out.features(r, c) - mean;
            var += d * d;
        }
        var /= static_cast<double>(idx.train.size());
        const double sd = std::sqrt(var);
        if (sd == 0.0) {
            std::cerr << "preprocess: column '" << spec.numeric_columns[c]
                      << "' has zero variance in the training split, emitting 0\n";
            for (std::size_t r = 0; r < kept.size(); ++r) out.features(r, c) = 0.0;
        } else {
            for (std::size_t r = 0; r < kept.size(); ++r)
                out.features(r, c) = (out.features(r, c) - mean) / sd;
        }
    }
    out.validate();
    return out;
}

}  // namespace sgad
