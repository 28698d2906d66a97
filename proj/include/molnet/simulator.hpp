#pragma once

// Deterministic mass-action ODE semantics for a Crn: derive the rate
// equations, integrate with an adaptive embedded Runge-Kutta pair
// (Dormand-Prince 5(4)), detect steady state, decode outputs.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "molnet/crn.hpp"

namespace molnet {

struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SimConfig {
    double t_end = 50.0;
    double atol = 1e-9;
    double rtol = 1e-6;
    int64_t max_steps = 10'000'000;
    // Early stop once max |dc/dt| over the monitored species (outputs if the
    // CRN declares any, else all) stays below ss_eps. 0 disables.
    double ss_eps = 1e-8;
    double ss_min_time = 1.0;  // never stop before this; upstream ramps start flat
    // Thin the stored trajectory to at most this many points (first and last
    // kept). 0 keeps every accepted step.
    int samples = 0;

    void validate() const;
};

enum class StopReason { reached_t_end, steady_state };

struct Trajectory {
    std::vector<double> times;                // strictly increasing, starts at 0
    std::vector<std::vector<double>> states;  // aligned to species
    std::vector<Species> species;
    std::vector<std::pair<int, int>> output_index;  // (plus, minus) per output pair
    StopReason stop_reason = StopReason::reached_t_end;
    double stop_time = 0.0;
    int64_t steps_accepted = 0;
    int64_t steps_rejected = 0;
};

// Mass-action right-hand side with species interned to dense indices.
// Two kernels compute the same derivative: a serial per-reaction scatter
// (the reference) and a two-phase gather that parallelizes cleanly and
// sums each species' contributions in a fixed order, so results are
// bitwise reproducible at any thread count.
class OdeSystem {
public:
    explicit OdeSystem(const Crn& crn);

    int size() const { return int(species_.size()); }
    const std::vector<Species>& species() const { return species_; }
    int index_of(const Species& s) const;  // -1 if absent

    std::vector<double> initial_state(const Crn& crn) const;

    void rhs(const double* y, double* dydt) const;
    void rhs_serial(const double* y, double* dydt) const;
    void rhs_parallel(const double* y, double* dydt) const;

private:
    struct RateTerm {
        int sp;
        int64_t m;  // exponent
    };
    std::vector<Species> species_;
    std::vector<double> k_;
    std::vector<int> term_off_;  // CSR offsets into terms_, one per reaction + sentinel
    std::vector<RateTerm> terms_;
    // Scatter form: per reaction, (species, net stoichiometry) pairs.
    std::vector<std::vector<std::pair<int, double>>> delta_;
    // Gather form (transpose): per species, (reaction, net stoichiometry).
    std::vector<std::vector<std::pair<int, double>>> incidence_;
    // Phase-1 output of the gather kernel. Shared scratch: a single
    // OdeSystem must not be driven from two threads at once.
    mutable std::vector<double> rate_buf_;
};

// Integrates the CRN from its initial concentrations merged with
// encode_input(input); the encoding overrides any preexisting X values.
// Throws SimError on step exhaustion.
Trajectory simulate(const Crn& crn, const std::vector<double>& input, const SimConfig& cfg = {});

// Decoded output values (y+ - y-) at the final sample, and the class index
// (argmax, lowest index on ties).
std::vector<double> readout_values(const Trajectory& traj);
int readout_class(const Trajectory& traj);

// Each rate constant replaced by an independent log-uniform draw from
// [lo, hi], in reaction order; deterministic in seed.
Crn randomize_rates(const Crn& crn, uint64_t seed, double lo = 0.1, double hi = 10.0);

// CSV: header "t,<species...>" plus decoded y<i> columns when the CRN
// declared outputs; 17 significant digits so values round-trip exactly.
void export_trajectory(const Trajectory& traj, const std::string& path);

}  // namespace molnet
