#include "molnet/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "molnet/rng.hpp"

namespace molnet {

namespace {

[[noreturn]] void row_fail(int row, const std::string& msg) {
    throw DataError("row " + std::to_string(row) + ": " + msg);
}

}  // namespace

LabeledDataset load_csv(const std::string& path, bool header) {
    std::ifstream f(path);
    if (!f) throw DataError("cannot open " + path);
    LabeledDataset ds;
    std::string line;
    int row = 0;
    int max_label = -1;
    while (std::getline(f, line)) {
        ++row;
        if (row == 1 && header) continue;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (cells.size() < 2) row_fail(row, "need at least one feature and a label");
        std::vector<double> feats;
        for (size_t i = 0; i + 1 < cells.size(); ++i) {
            double v = 0;
            auto [p, ec] = std::from_chars(cells[i].data(), cells[i].data() + cells[i].size(), v);
            if (ec != std::errc() || p != cells[i].data() + cells[i].size() || !std::isfinite(v))
                row_fail(row, "bad feature value: " + cells[i]);
            feats.push_back(v);
        }
        const std::string& lc = cells.back();
        int label = 0;
        auto [p, ec] = std::from_chars(lc.data(), lc.data() + lc.size(), label);
        if (ec != std::errc() || p != lc.data() + lc.size() || label < 0)
            row_fail(row, "bad label: " + lc);
        if (!ds.x.empty() && feats.size() != ds.x[0].size())
            row_fail(row, "expected " + std::to_string(ds.x[0].size()) + " features, got " +
                              std::to_string(feats.size()));
        ds.x.push_back(std::move(feats));
        ds.y.push_back(label);
        max_label = std::max(max_label, label);
    }
    if (ds.x.empty()) throw DataError(path + ": no data rows");
    ds.classes = max_label + 1;
    return ds;
}

LabeledDataset load_iris(const std::string& path) {
    LabeledDataset ds = load_csv(path, false);
    if (ds.features() != 4)
        throw DataError(path + ": IRIS needs 4 features, got " + std::to_string(ds.features()));
    for (size_t i = 0; i < ds.y.size(); ++i)
        if (ds.y[i] > 2) row_fail(int(i) + 1, "unknown IRIS label " + std::to_string(ds.y[i]));
    ds.classes = 3;
    return ds;
}

Scaling fit_scaling(const LabeledDataset& ds) {
    int d = ds.features();
    Scaling s;
    s.mean.assign(d, 0.0);
    s.std.assign(d, 0.0);
    for (const auto& row : ds.x)
        for (int j = 0; j < d; ++j) s.mean[j] += row[j];
    for (int j = 0; j < d; ++j) s.mean[j] /= double(ds.size());
    for (const auto& row : ds.x)
        for (int j = 0; j < d; ++j) {
            double c = row[j] - s.mean[j];
            s.std[j] += c * c;
        }
    for (int j = 0; j < d; ++j) {
        s.std[j] = std::sqrt(s.std[j] / double(ds.size()));
        if (s.std[j] == 0.0) s.std[j] = 1.0;
    }
    return s;
}

void apply_scaling(LabeledDataset& ds, const Scaling& s) {
    for (auto& row : ds.x)
        for (size_t j = 0; j < row.size(); ++j) row[j] = (row[j] - s.mean[j]) / s.std[j];
}

std::vector<double> apply_scaling(std::span<const double> x, std::span<const double> mean,
                                  std::span<const double> std) {
    std::vector<double> out(x.size());
    for (size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) / std[j];
    return out;
}

std::vector<double> synthetic_centroid(const SyntheticSpec& spec, int c) {
    std::vector<double> mu(spec.features, 0.0);
    mu[c % spec.features] = spec.margin / std::sqrt(2.0);
    return mu;
}

LabeledDataset make_synthetic(const SyntheticSpec& spec, uint64_t seed) {
    if (spec.classes < 2 || spec.features < 1 || spec.per_class < 1 || spec.margin < 0.0)
        throw DataError("degenerate synthetic spec");
    Rng rng(seed);
    LabeledDataset ds;
    ds.classes = spec.classes;
    for (int c = 0; c < spec.classes; ++c) {
        auto mu = synthetic_centroid(spec, c);
        for (int n = 0; n < spec.per_class; ++n) {
            std::vector<double> x(spec.features);
            for (int j = 0; j < spec.features; ++j) x[j] = mu[j] + normal(rng);
            ds.x.push_back(std::move(x));
            ds.y.push_back(c);
        }
    }
    return ds;
}

}  // namespace molnet
