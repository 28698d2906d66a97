#pragma once

// BinaryConnect training: real shadow weights clipped to [-1,1], forward
// and backward passes through the binarized weights, straight-through
// gradients, squared hinge loss over +-1 one-hot targets, Adam updates.

#include <cstdint>
#include <string>
#include <vector>

#include "molnet/dataset.hpp"
#include "molnet/nn.hpp"

namespace molnet {

struct TrainError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TrainConfig {
    std::vector<int> hidden{8};
    int epochs = 500;
    int batch = 16;
    double lr = 0.01;
    double lr_decay = 0.999;      // per-epoch multiplicative factor
    double dropout_keep = 1.0;    // keep probability on hidden activations
    uint64_t seed = 1;
    double val_fraction = 0.0;    // 0: select the best epoch on training accuracy
};

struct EpochLog {
    int epoch = 0;        // 1-based
    double loss = 0.0;    // mean per-example squared hinge
    double train_acc = 0.0;
    double val_acc = 0.0;  // NaN when val_fraction is 0
};

struct TrainResult {
    BinaryNetwork net;
    std::vector<EpochLog> log;
    int best_epoch = 0;
    double best_acc = 0.0;     // selection accuracy of the returned snapshot
    double best_margin = 0.0;  // min |hidden pre-activation| of the snapshot
    std::vector<std::string> warnings;
};

// Entry >= 0 maps to +1, entry < 0 to -1.
std::vector<std::vector<int>> binarize(const std::vector<std::vector<double>>& w);

TrainResult train(const LabeledDataset& data, const TrainConfig& cfg);

double evaluate(const BinaryNetwork& net, const LabeledDataset& data);

// Squared hinge loss (dataset mean) and its analytic bias gradients at
// fixed binary weights; the seam for the finite-difference gradient check.
double hinge_loss(const BinaryNetwork& net, const LabeledDataset& data);
std::vector<std::vector<double>> hinge_bias_grads(const BinaryNetwork& net,
                                                  const LabeledDataset& data);

}  // namespace molnet
