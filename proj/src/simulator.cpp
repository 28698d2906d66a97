#include "molnet/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <unordered_map>

#include "molnet/nn.hpp"
#include "molnet/rng.hpp"

namespace molnet {

void SimConfig::validate() const {
    if (!(t_end > 0.0)) throw SimError("t_end must be positive");
    if (!(atol > 0.0) || !(rtol > 0.0)) throw SimError("tolerances must be positive");
    if (max_steps <= 0) throw SimError("max_steps must be positive");
    if (ss_eps < 0.0 || ss_min_time < 0.0) throw SimError("steady-state settings must be >= 0");
    if (samples != 0 && samples < 2) throw SimError("samples must be 0 (keep all) or >= 2");
}

namespace {

double pow_mult(double v, int64_t m) {
    if (m == 1) return v;
    if (m == 2) return v * v;
    double r = 1.0;
    for (int64_t i = 0; i < m; ++i) r *= v;
    return r;
}

}  // namespace

OdeSystem::OdeSystem(const Crn& crn) {
    species_ = crn.species();
    std::unordered_map<Species, int, SpeciesHash> id;
    id.reserve(species_.size());
    for (size_t i = 0; i < species_.size(); ++i) id.emplace(species_[i], int(i));

    incidence_.resize(species_.size());
    term_off_.push_back(0);
    for (size_t j = 0; j < crn.reactions.size(); ++j) {
        const Reaction& r = crn.reactions[j];
        k_.push_back(r.k);
        std::vector<std::pair<int, double>> net;
        for (const Term& t : r.reactants) {
            int sp = id.at(t.sp);
            terms_.push_back({sp, t.mult});
            net.emplace_back(sp, -double(t.mult));
        }
        term_off_.push_back(int(terms_.size()));
        for (const Term& t : r.products) {
            int sp = id.at(t.sp);
            auto it = std::find_if(net.begin(), net.end(),
                                   [sp](const auto& p) { return p.first == sp; });
            if (it != net.end())
                it->second += double(t.mult);
            else
                net.emplace_back(sp, double(t.mult));
        }
        std::erase_if(net, [](const auto& p) { return p.second == 0.0; });
        std::sort(net.begin(), net.end());
        for (const auto& [sp, d] : net) incidence_[sp].emplace_back(int(j), d);
        delta_.push_back(std::move(net));
    }
    rate_buf_.resize(k_.size());
}

int OdeSystem::index_of(const Species& s) const {
    auto it = std::lower_bound(species_.begin(), species_.end(), s);
    if (it == species_.end() || *it != s) return -1;
    return int(it - species_.begin());
}

std::vector<double> OdeSystem::initial_state(const Crn& crn) const {
    std::vector<double> y(species_.size(), 0.0);
    for (const auto& [sp, c] : crn.init) y[index_of(sp)] = c;
    return y;
}

void OdeSystem::rhs_serial(const double* y, double* dydt) const {
    std::fill(dydt, dydt + size(), 0.0);
    for (size_t j = 0; j < k_.size(); ++j) {
        double v = k_[j];
        for (int t = term_off_[j]; t < term_off_[j + 1]; ++t)
            v *= pow_mult(y[terms_[t].sp], terms_[t].m);
        for (const auto& [sp, d] : delta_[j]) dydt[sp] += d * v;
    }
}

void OdeSystem::rhs_parallel(const double* y, double* dydt) const {
    double* rate = rate_buf_.data();
    const int nr = int(k_.size());
    const int ns = size();
#pragma omp parallel
    {
#pragma omp for nowait
        for (int j = 0; j < nr; ++j) {
            double v = k_[j];
            for (int t = term_off_[j]; t < term_off_[j + 1]; ++t)
                v *= pow_mult(y[terms_[t].sp], terms_[t].m);
            rate[j] = v;
        }
#pragma omp barrier
#pragma omp for
        for (int i = 0; i < ns; ++i) {
            double acc = 0.0;
            for (const auto& [rj, d] : incidence_[i]) acc += d * rate[rj];
            dydt[i] = acc;
        }
    }
}

void OdeSystem::rhs(const double* y, double* dydt) const {
#ifdef _OPENMP
    if (size() >= 256) {
        rhs_parallel(y, dydt);
        return;
    }
#endif
    rhs_serial(y, dydt);
}

namespace {

// Dormand-Prince 5(4), FSAL. b is the 5th-order row (= stage 7 weights),
// e = b - b4 drives the error estimate.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                 A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;

struct Stepper {
    const OdeSystem& sys;
    int n;
    std::vector<double> k1, k2, k3, k4, k5, k6, k7, tmp, yerr;

    explicit Stepper(const OdeSystem& s) : sys(s), n(s.size()) {
        for (auto* v : {&k1, &k2, &k3, &k4, &k5, &k6, &k7, &tmp, &yerr}) v->resize(n);
    }

    void axpy(const double* y, double h, std::initializer_list<std::pair<double, const double*>> terms) {
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            for (const auto& [c, k] : terms) acc += c * k[i];
            tmp[i] = y[i] + h * acc;
        }
    }

    // One attempted step from y with stored k1 = f(y). On return y_new and
    // k7 = f(y_new) are filled; the scaled error norm is returned.
    double attempt(const std::vector<double>& y, double h, std::vector<double>& y_new,
                   double atol, double rtol) {
        axpy(y.data(), h, {{A21, k1.data()}});
        sys.rhs(tmp.data(), k2.data());
        axpy(y.data(), h, {{A31, k1.data()}, {A32, k2.data()}});
        sys.rhs(tmp.data(), k3.data());
        axpy(y.data(), h, {{A41, k1.data()}, {A42, k2.data()}, {A43, k3.data()}});
        sys.rhs(tmp.data(), k4.data());
        axpy(y.data(), h,
             {{A51, k1.data()}, {A52, k2.data()}, {A53, k3.data()}, {A54, k4.data()}});
        sys.rhs(tmp.data(), k5.data());
        axpy(y.data(), h,
             {{A61, k1.data()}, {A62, k2.data()}, {A63, k3.data()}, {A64, k4.data()},
              {A65, k5.data()}});
        sys.rhs(tmp.data(), k6.data());
        for (int i = 0; i < n; ++i)
            y_new[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        sys.rhs(y_new.data(), k7.data());
        double sumsq = 0.0;
        for (int i = 0; i < n; ++i) {
            double e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] +
                            E7 * k7[i]);
            double sc = atol + rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            sumsq += (e / sc) * (e / sc);
        }
        return std::sqrt(sumsq / n);
    }
};

double rms(const std::vector<double>& v, const std::vector<double>& sc) {
    double s = 0.0;
    for (size_t i = 0; i < v.size(); ++i) s += (v[i] / sc[i]) * (v[i] / sc[i]);
    return std::sqrt(s / double(v.size()));
}

// Standard starting-step heuristic (order-5 exponent).
double initial_step(const OdeSystem& sys, const std::vector<double>& y0,
                    const std::vector<double>& f0, double t_end, double atol, double rtol) {
    int n = sys.size();
    std::vector<double> sc(n);
    for (int i = 0; i < n; ++i) sc[i] = atol + rtol * std::abs(y0[i]);
    double d0 = rms(y0, sc), d1 = rms(f0, sc);
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, t_end);
    std::vector<double> y1(n), f1(n), df(n);
    for (int i = 0; i < n; ++i) y1[i] = y0[i] + h0 * f0[i];
    sys.rhs(y1.data(), f1.data());
    for (int i = 0; i < n; ++i) df[i] = f1[i] - f0[i];
    double d2 = rms(df, sc) / h0;
    double h1;
    if (std::max(d1, d2) <= 1e-15)
        h1 = std::max(1e-6, h0 * 1e-3);
    else
        h1 = std::pow(0.01 / std::max(d1, d2), 0.2);
    return std::min({100.0 * h0, h1, t_end});
}

void thin(Trajectory& traj, int samples) {
    int n = int(traj.times.size());
    if (samples == 0 || n <= samples) return;
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    for (int i = 0; i < samples; ++i) {
        int src = int(std::llround(double(i) * (n - 1) / (samples - 1)));
        times.push_back(traj.times[src]);
        states.push_back(std::move(traj.states[src]));
    }
    traj.times = std::move(times);
    traj.states = std::move(states);
}

}  // namespace

Trajectory simulate(const Crn& crn, const std::vector<double>& input, const SimConfig& cfg) {
    cfg.validate();
    crn.validate();
    if (input.size() != crn.inputs.size())
        throw SimError("input has " + std::to_string(input.size()) + " values but CRN declares " +
                       std::to_string(crn.inputs.size()) + " input pairs");

    OdeSystem sys(crn);
    std::vector<double> y = sys.initial_state(crn);
    for (size_t i = 0; i < input.size(); ++i) {
        int p = sys.index_of(crn.inputs[i].first);
        int m = sys.index_of(crn.inputs[i].second);
        y[p] = input[i] >= 0.0 ? input[i] : 0.0;
        y[m] = input[i] >= 0.0 ? 0.0 : -input[i];
    }

    std::vector<int> monitored;
    for (const auto& [p, m] : crn.outputs) {
        monitored.push_back(sys.index_of(p));
        monitored.push_back(sys.index_of(m));
    }
    if (monitored.empty())
        for (int i = 0; i < sys.size(); ++i) monitored.push_back(i);

    Trajectory traj;
    traj.species = sys.species();
    for (const auto& [p, m] : crn.outputs)
        traj.output_index.emplace_back(sys.index_of(p), sys.index_of(m));
    traj.times.push_back(0.0);
    traj.states.push_back(y);

    Stepper st(sys);
    std::vector<double> y_new(sys.size());
    sys.rhs(y.data(), st.k1.data());
    double t = 0.0;
    double h = initial_step(sys, y, st.k1, cfg.t_end, cfg.atol, cfg.rtol);
    int ss_streak = 0;

    while (t < cfg.t_end) {
        if (traj.steps_accepted + traj.steps_rejected >= cfg.max_steps)
            throw SimError("step budget (" + std::to_string(cfg.max_steps) +
                           ") exhausted at t=" + std::to_string(t) +
                           "; system may be too stiff for an explicit method");
        if (h < 1e-14 * std::max(1.0, t))
            throw SimError("step size underflow at t=" + std::to_string(t) +
                           "; system may be too stiff for an explicit method");
        bool last = t + h >= cfg.t_end;
        if (last) h = cfg.t_end - t;

        double err = st.attempt(y, h, y_new, cfg.atol, cfg.rtol);
        if (!std::isfinite(err)) {
            ++traj.steps_rejected;
            h *= 0.2;
            continue;
        }
        double factor = 0.9 * std::pow(std::max(err, 1e-300), -0.2);
        if (err > 1.0) {
            ++traj.steps_rejected;
            h *= std::clamp(factor, 0.2, 1.0);
            continue;
        }

        t = last ? cfg.t_end : t + h;
        // k7 is f at the pre-clamp state; the clamp moves values by less
        // than atol, under the error already accepted for this step.
        for (double& v : y_new)
            if (v < 0.0 && -v < cfg.atol) v = 0.0;
        y.swap(y_new);
        st.k1.swap(st.k7);  // FSAL
        ++traj.steps_accepted;
        traj.times.push_back(t);
        traj.states.push_back(y);
        h *= std::clamp(factor, 0.2, 5.0);

        if (cfg.ss_eps > 0.0 && t >= cfg.ss_min_time) {
            double dmax = 0.0;
            for (int i : monitored) dmax = std::max(dmax, std::abs(st.k1[i]));
            ss_streak = dmax < cfg.ss_eps ? ss_streak + 1 : 0;
            if (ss_streak >= 3) {
                traj.stop_reason = StopReason::steady_state;
                break;
            }
        }
    }
    traj.stop_time = traj.times.back();
    thin(traj, cfg.samples);
    return traj;
}

std::vector<double> readout_values(const Trajectory& traj) {
    if (traj.states.empty()) throw SimError("empty trajectory");
    const std::vector<double>& y = traj.states.back();
    std::vector<double> out;
    for (const auto& [p, m] : traj.output_index) out.push_back(y[p] - y[m]);
    return out;
}

int readout_class(const Trajectory& traj) {
    std::vector<double> v = readout_values(traj);
    if (v.empty()) throw SimError("CRN declares no outputs");
    return argmax_class(v);
}

Crn randomize_rates(const Crn& crn, uint64_t seed, double lo, double hi) {
    if (!(lo > 0.0) || !(hi >= lo)) throw SimError("rate range must satisfy 0 < lo <= hi");
    Crn out = crn;
    Rng rng(seed);
    for (Reaction& r : out.reactions) r.k = log_uniform(rng, lo, hi);
    return out;
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        q += c;
        if (c == '"') q += c;
    }
    q += '"';
    return q;
}

}  // namespace

void export_trajectory(const Trajectory& traj, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw SimError("cannot open " + path + " for writing");
    f << "t";
    for (const Species& s : traj.species) f << ',' << csv_field(s.str());
    for (size_t i = 0; i < traj.output_index.size(); ++i) f << ",y" << i;
    f << '\n';
    char buf[40];
    auto emit = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        f << ',' << buf;
    };
    for (size_t r = 0; r < traj.times.size(); ++r) {
        std::snprintf(buf, sizeof buf, "%.17g", traj.times[r]);
        f << buf;
        for (double v : traj.states[r]) emit(v);
        for (const auto& [p, m] : traj.output_index) emit(traj.states[r][p] - traj.states[r][m]);
        f << '\n';
    }
    if (!f.flush()) throw SimError("write failed for " + path);
}

}  // namespace molnet
