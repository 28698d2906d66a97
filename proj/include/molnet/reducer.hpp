#pragma once

// CRN optimization: eliminate non-input unimolecular reactions by
// substituting their products upstream (folding initial concentrations
// along), then cancel balanced dual-rail product pairs and initial
// concentrations. Optional cancellation reactions S+ + S- -> W.

#include <utility>
#include <vector>

#include "molnet/crn.hpp"

namespace molnet {

struct ReduceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Requires every species to be a reactant in at most one reaction
// (compile() guarantees this); violations raise ReduceError naming the
// species. The result has no unimolecular reactions except those whose
// reactant is an input species.
Crn reduce(const Crn& crn);

// All dual-rail pairs present in the CRN's species universe, sorted.
std::vector<std::pair<Species, Species>> dual_rail_pairs(const Crn& crn);

// Appends S+ + S- -> W (k = 1) per pair. Pairs must be dual-rail pairs
// of this CRN, and W must not be consumed anywhere.
Crn add_cancellation(const Crn& crn, const std::vector<std::pair<Species, Species>>& pairs);

}  // namespace molnet
