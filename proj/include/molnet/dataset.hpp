#pragma once

// Labeled datasets: CSV ingestion, z-score scaling, synthetic blob generator.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace molnet {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LabeledDataset {
    std::vector<std::vector<double>> x;  // examples by features
    std::vector<int> y;                  // class indices in [0, classes)
    int classes = 0;

    size_t size() const { return x.size(); }
    int features() const { return x.empty() ? 0 : int(x[0].size()); }
};

// CSV rows: features..., integer label last. Errors carry the row number.
LabeledDataset load_csv(const std::string& path, bool header = false);

// load_csv plus IRIS shape checks: 4 features, labels in {0,1,2}.
LabeledDataset load_iris(const std::string& path);

struct Scaling {
    std::vector<double> mean, std;
};

// Per-feature mean and population std. Zero-variance features get std 1
// so applying the scaling is always defined.
Scaling fit_scaling(const LabeledDataset& ds);
void apply_scaling(LabeledDataset& ds, const Scaling& s);
std::vector<double> apply_scaling(std::span<const double> x, std::span<const double> mean,
                                  std::span<const double> std);

struct SyntheticSpec {
    int classes = 2;
    int features = 2;
    int per_class = 100;
    double margin = 6.0;  // pairwise centroid distance in noise-sigma units
};

// Gaussian blobs with unit noise. Class c is centered at
// (margin/sqrt(2)) * e_{c mod features}, so distinct axes sit exactly
// `margin` sigmas apart; when classes exceed features, centroids collide,
// which doubles as a negative control. Deterministic in the seed.
LabeledDataset make_synthetic(const SyntheticSpec& spec, uint64_t seed);

// Centroid of class c under the same formula; the test oracle classifier.
std::vector<double> synthetic_centroid(const SyntheticSpec& spec, int c);

}  // namespace molnet
