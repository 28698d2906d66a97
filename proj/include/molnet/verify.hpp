#pragma once

// End-to-end NN vs CRN verification: run every example through both the
// exact forward pass and the simulated CRN, compare values and labels.

#include <string>
#include <vector>

#include "molnet/crn.hpp"
#include "molnet/dataset.hpp"
#include "molnet/nn.hpp"
#include "molnet/simulator.hpp"

namespace molnet {

struct VerifyConfig {
    SimConfig sim;
    // Applies scale_mean/scale_std from the network metadata when present.
    bool use_metadata_scaling = true;
};

struct ExampleResult {
    int index = 0;
    std::vector<double> nn_output;
    std::vector<double> crn_output;
    bool agree = false;
    double max_err = 0.0;
    double stop_time = 0.0;
    std::string error;  // nonempty if the simulation failed

    bool ok() const { return error.empty(); }
};

struct VerificationReport {
    std::vector<ExampleResult> examples;
    double agreement_rate = 0.0;  // over successfully simulated examples
    double max_err = 0.0;
    int failed = 0;
    double runtime_seconds = 0.0;
    SimConfig config;
    bool scaled = false;
};

// Examples run independently (in parallel when OpenMP is enabled) and are
// reported in dataset order. A failing simulation marks its example and
// verification continues.
VerificationReport verify(const BinaryNetwork& net, const Crn& crn, const LabeledDataset& data,
                          const VerifyConfig& cfg = {});

std::string report_json(const VerificationReport& report);

}  // namespace molnet
