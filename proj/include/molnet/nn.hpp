#pragma once

// Binary-weight networks: the exact forward-pass oracle and JSON (de)serialization.
//
// File schema: {"input_dim": int,
//               "layers": [{"weights": [[-1|1,...],...],  (row-major, fan_in rows)
//                           "bias": [number,...],
//                           "activation": "relu"|"linear"}],
//               "metadata": {string: string}}

#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace molnet {

struct NnError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Activation { relu, linear };

struct BinaryLayer {
    std::vector<std::vector<int>> weights;  // fan_in rows, fan_out columns, entries +-1
    std::vector<double> bias;               // length fan_out
    Activation activation = Activation::linear;

    int fan_in() const { return int(weights.size()); }
    int fan_out() const { return weights.empty() ? 0 : int(weights[0].size()); }
};

struct BinaryNetwork {
    int input_dim = 0;
    std::vector<BinaryLayer> layers;
    std::map<std::string, std::string> metadata;

    // Layer sizes including the input: {input_dim, fan_out...}.
    std::vector<int> shape() const;

    // Throws NnError on shape or weight-value violations. Activation
    // arrangement is not checked here; the compiler enforces it.
    void validate() const;
};

std::vector<double> forward(const BinaryNetwork& net, std::span<const double> x);

// Index of the maximal entry, ties broken toward the lowest index.
int argmax_class(std::span<const double> y);

void save_network(const BinaryNetwork& net, const std::string& path);
BinaryNetwork load_network(const std::string& path);

// Feature scaling stored in network metadata (keys "scale_mean",
// "scale_std", comma-joined exact decimals). Returns false when absent.
bool scaling_from_metadata(const BinaryNetwork& net, std::vector<double>& mean,
                           std::vector<double>& std);
void scaling_to_metadata(BinaryNetwork& net, std::span<const double> mean,
                         std::span<const double> std);

}  // namespace molnet
