#pragma once

// Lowering binary-weight networks to dual-rail CRNs.
//
// Layer l runs from 2 (first non-input layer) to N. Per weight-matrix row
// a single unimolecular reaction fans the row's species out to the
// column targets (positive product for weight +1, negative for -1), plus
// the sign-flipped mirror. ReLU layers route through I species and add
// the two-reaction gadget per unit; linear layers produce H directly.
// Biases become initial concentrations on the corresponding rail. All
// rate constants are 1.

#include <cstdint>
#include <vector>

#include "molnet/crn.hpp"
#include "molnet/nn.hpp"

namespace molnet {

struct CompileError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requires every hidden layer ReLU and the final layer Linear; anything
// else is a CompileError.
Crn compile(const BinaryNetwork& net);

// Closed-form size of compile()'s output: sum of 2*fan_in over non-input
// layers plus 2*fan_out per ReLU layer.
int64_t reaction_count_unoptimized(const std::vector<int>& shape);

}  // namespace molnet
