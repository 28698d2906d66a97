#include "doctest.h"
#include "molnet/simulator.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "molnet/compiler.hpp"
#include "molnet/rng.hpp"

using namespace molnet;

namespace {

BinaryNetwork relu_net() {
    BinaryNetwork net;  // y = relu(x)
    net.input_dim = 1;
    net.layers.push_back({{{1}}, {0}, Activation::relu});
    net.layers.push_back({{{1}}, {0}, Activation::linear});
    return net;
}

BinaryNetwork fanout_net() {
    BinaryNetwork net;
    net.input_dim = 2;
    net.layers.push_back({{{1, 1, 1}, {-1, -1, -1}}, {0, 0, 0}, Activation::relu});
    net.layers.push_back({{{1}, {1}, {-1}}, {0}, Activation::linear});
    return net;
}

BinaryNetwork net_of_shape(const std::vector<int>& shape) {
    BinaryNetwork net;
    net.input_dim = shape[0];
    for (size_t l = 1; l < shape.size(); ++l) {
        BinaryLayer layer;
        layer.weights.assign(shape[l - 1], std::vector<int>(shape[l], 1));
        for (int i = 0; i < shape[l - 1]; ++i)
            for (int j = 0; j < shape[l]; ++j)
                layer.weights[i][j] = (i + j) % 2 ? -1 : 1;
        layer.bias.assign(shape[l], 0.0);
        layer.activation = l + 1 < shape.size() ? Activation::relu : Activation::linear;
        net.layers.push_back(std::move(layer));
    }
    return net;
}

double state_of(const Trajectory& traj, const std::string& name) {
    for (size_t i = 0; i < traj.species.size(); ++i)
        if (traj.species[i].str() == name) return traj.states.back()[i];
    FAIL(("species not in trajectory: " + name));
    return 0.0;
}

}  // namespace

TEST_CASE("rhs matches hand-computed mass-action derivatives") {
    // A + B -> C at k=2: rate 2ab.
    {
        Crn crn = parse_crn("rxn: A + B -> C @ 2\n");
        OdeSystem sys(crn);
        REQUIRE(sys.size() == 3);
        int a = sys.index_of(Species::named("A"));
        int b = sys.index_of(Species::named("B"));
        int c = sys.index_of(Species::named("C"));
        std::vector<double> y(3, 0.0), d(3, 0.0);
        y[a] = 3.0;
        y[b] = 0.5;
        y[c] = 7.0;
        sys.rhs(y.data(), d.data());
        CHECK(d[a] == -3.0);
        CHECK(d[b] == -3.0);
        CHECK(d[c] == 3.0);
    }
    // A -> 2B + C at k=0.5.
    {
        Crn crn = parse_crn("rxn: A -> 2*B + C @ 0.5\n");
        OdeSystem sys(crn);
        std::vector<double> y(3, 0.0), d(3, 0.0);
        y[sys.index_of(Species::named("A"))] = 4.0;
        sys.rhs(y.data(), d.data());
        CHECK(d[sys.index_of(Species::named("A"))] == -2.0);
        CHECK(d[sys.index_of(Species::named("B"))] == 4.0);
        CHECK(d[sys.index_of(Species::named("C"))] == 2.0);
    }
    // 2A -> B: rate k*a^2, A consumed twice per firing.
    {
        Crn crn = parse_crn("rxn: 2*A -> B @ 1\n");
        OdeSystem sys(crn);
        std::vector<double> y(2, 0.0), d(2, 0.0);
        y[sys.index_of(Species::named("A"))] = 3.0;
        sys.rhs(y.data(), d.data());
        CHECK(d[sys.index_of(Species::named("A"))] == -18.0);
        CHECK(d[sys.index_of(Species::named("B"))] == 9.0);
    }
    // Catalyst: A + B -> A + C leaves A untouched.
    {
        Crn crn = parse_crn("rxn: A + B -> A + C @ 1\n");
        OdeSystem sys(crn);
        std::vector<double> y(3, 0.0), d(3, 0.0);
        y[sys.index_of(Species::named("A"))] = 2.0;
        y[sys.index_of(Species::named("B"))] = 5.0;
        sys.rhs(y.data(), d.data());
        CHECK(d[sys.index_of(Species::named("A"))] == 0.0);
        CHECK(d[sys.index_of(Species::named("B"))] == -10.0);
        CHECK(d[sys.index_of(Species::named("C"))] == 10.0);
    }
}

TEST_CASE("serial and gather kernels agree bitwise") {
    for (const auto& shape : std::vector<std::vector<int>>{{2, 3, 1}, {64, 64, 8}}) {
        Crn crn = compile(net_of_shape(shape));
        OdeSystem sys(crn);
        Rng rng(42);
        std::vector<double> y(sys.size());
        for (double& v : y) v = uniform(rng, 0.0, 3.0);
        std::vector<double> ds(sys.size()), dp(sys.size()), dd(sys.size());
        sys.rhs_serial(y.data(), ds.data());
        sys.rhs_parallel(y.data(), dp.data());
        sys.rhs(y.data(), dd.data());
        CHECK(ds == dp);
        CHECK(ds == dd);
    }
}

TEST_CASE("A + B -> C computes min(a0, b0)") {
    Crn crn = parse_crn(
        "rxn: A + B -> C @ 1\n"
        "init A 2\n"
        "init B 5\n");
    for (double k : {0.1, 1.0, 10.0}) {
        Crn scaled = crn;
        scaled.reactions[0].k = k;
        SimConfig cfg;
        cfg.t_end = 50.0 / std::min(k, 1.0);
        Trajectory traj = simulate(scaled, {}, cfg);
        CHECK(state_of(traj, "C") == doctest::Approx(2.0).epsilon(1e-4));
        CHECK(state_of(traj, "A") == doctest::Approx(0.0).scale(1).epsilon(1e-4));
        CHECK(state_of(traj, "B") == doctest::Approx(3.0).epsilon(1e-4));
    }
}

TEST_CASE("compiled relu network reproduces the forward pass") {
    Crn crn = compile(relu_net());
    for (double x : {3.0, -4.0, 0.75}) {
        Trajectory traj = simulate(crn, {x});
        double want = x > 0 ? x : 0.0;
        CHECK(readout_values(traj)[0] == doctest::Approx(want).scale(1).epsilon(1e-4));
    }

    Crn fan = compile(fanout_net());
    BinaryNetwork net = fanout_net();
    for (auto x : std::vector<std::vector<double>>{{2, 1}, {1, 4}, {0.5, -0.25}}) {
        Trajectory traj = simulate(fan, x);
        CHECK(readout_values(traj)[0] ==
              doctest::Approx(forward(net, x)[0]).scale(1).epsilon(1e-4));
        CHECK(readout_class(traj) == 0);
    }

    // x1 = x2 puts every unit exactly on the ReLU kink: the gadget rails
    // balance and close the gap like 1/t, so t=50 only gets within ~1e-2.
    // Integrating 2000x longer shrinks the gap proportionally.
    Trajectory kink = simulate(fan, {-1, -1});
    CHECK(readout_values(kink)[0] == doctest::Approx(0.0).scale(1).epsilon(0.05));
    SimConfig deep;
    deep.t_end = 1e5;
    deep.ss_eps = 0;
    Trajectory settled = simulate(fan, {-1, -1}, deep);
    CHECK(readout_values(settled)[0] == doctest::Approx(0.0).scale(1).epsilon(1e-4));
}

TEST_CASE("unimolecular decay tracks the exponential to 1e-8") {
    Crn crn = parse_crn(
        "rxn: A -> B @ 1\n"
        "init A 1\n");
    SimConfig cfg;
    cfg.atol = 1e-14;
    cfg.rtol = 1e-10;
    cfg.ss_eps = 0;
    for (double t : {1.0, 5.0, 10.0}) {
        cfg.t_end = t;
        Trajectory traj = simulate(crn, {}, cfg);
        CHECK(traj.stop_time == t);
        CHECK(state_of(traj, "A") == doctest::Approx(std::exp(-t)).scale(1).epsilon(1e-8));
        CHECK(state_of(traj, "B") == doctest::Approx(1.0 - std::exp(-t)).scale(1).epsilon(1e-8));
    }
}

TEST_CASE("trajectories start at the encoded initial state and stay nonnegative") {
    Crn crn = compile(fanout_net());
    crn.init[Species::intermediate(2, 1, Rail::minus)] = 0.125;
    SimConfig cfg;
    Trajectory traj = simulate(crn, {1.5, -0.25}, cfg);

    CHECK(traj.times.front() == 0.0);
    OdeSystem sys(crn);
    const std::vector<double>& y0 = traj.states.front();
    CHECK(y0[size_t(sys.index_of(Species::input(1, Rail::plus)))] == 1.5);
    CHECK(y0[size_t(sys.index_of(Species::input(1, Rail::minus)))] == 0.0);
    CHECK(y0[size_t(sys.index_of(Species::input(2, Rail::plus)))] == 0.0);
    CHECK(y0[size_t(sys.index_of(Species::input(2, Rail::minus)))] == 0.25);
    CHECK(y0[size_t(sys.index_of(Species::intermediate(2, 1, Rail::minus)))] == 0.125);

    for (size_t i = 1; i < traj.times.size(); ++i) CHECK(traj.times[i] > traj.times[i - 1]);
    for (const auto& state : traj.states)
        for (double v : state) CHECK(v >= -1e-7);

    // H3,1+ is produce-only here, so its trace never decreases (up to
    // local integration error near the plateau).
    int yp = traj.output_index[0].first;
    for (size_t i = 1; i < traj.states.size(); ++i)
        CHECK(traj.states[i][size_t(yp)] >= traj.states[i - 1][size_t(yp)] - 1e-5);
}

TEST_CASE("steady-state detection stops early") {
    Crn crn = parse_crn(
        "rxn: A + B -> C @ 1\n"
        "init A 2\n"
        "init B 5\n");
    SimConfig cfg;
    cfg.t_end = 1e6;
    cfg.ss_eps = 1e-6;
    Trajectory traj = simulate(crn, {}, cfg);
    CHECK(traj.stop_reason == StopReason::steady_state);
    CHECK(traj.stop_time >= cfg.ss_min_time);
    CHECK(traj.stop_time < 100.0);
    CHECK(state_of(traj, "C") == doctest::Approx(2.0).epsilon(1e-3));

    cfg.ss_eps = 0;
    cfg.t_end = 5.0;
    Trajectory full = simulate(crn, {}, cfg);
    CHECK(full.stop_reason == StopReason::reached_t_end);
    CHECK(full.stop_time == 5.0);
}

TEST_CASE("readout on a CRN without outputs") {
    Crn crn = parse_crn("rxn: A -> B @ 1\ninit A 1\n");
    Trajectory traj = simulate(crn, {});
    CHECK(readout_values(traj).empty());
    CHECK_THROWS_WITH_AS(readout_class(traj), "CRN declares no outputs", SimError);
}

TEST_CASE("readout ties go to the lowest class") {
    Crn crn = parse_crn(
        "rxn: X1+ -> Y1+ + Y2+ @ 1\n"
        "input 1 X1+ X1-\n"
        "output 1 Y1+ Y1-\n"
        "output 2 Y2+ Y2-\n");
    Trajectory traj = simulate(crn, {1.0});
    CHECK(readout_values(traj)[0] == doctest::Approx(readout_values(traj)[1]));
    CHECK(readout_class(traj) == 0);
}

TEST_CASE("randomize_rates is seeded and stays in range") {
    Crn crn = compile(net_of_shape({4, 8, 3}));
    Crn a = randomize_rates(crn, 7);
    Crn b = randomize_rates(crn, 7);
    Crn c = randomize_rates(crn, 8);
    CHECK(print_crn(a) == print_crn(b));
    CHECK(print_crn(a) != print_crn(c));

    REQUIRE(a.reactions.size() == crn.reactions.size());
    bool any_changed = false;
    for (size_t i = 0; i < a.reactions.size(); ++i) {
        CHECK(a.reactions[i].reactants == crn.reactions[i].reactants);
        CHECK(a.reactions[i].products == crn.reactions[i].products);
        CHECK(a.reactions[i].k >= 0.1);
        CHECK(a.reactions[i].k <= 10.0);
        any_changed |= a.reactions[i].k != 1.0;
    }
    CHECK(any_changed);

    Crn fixed = randomize_rates(crn, 3, 1.0, 1.0);
    for (const Reaction& r : fixed.reactions) CHECK(r.k == 1.0);

    CHECK_THROWS_AS(randomize_rates(crn, 1, 0.0, 1.0), SimError);
    CHECK_THROWS_AS(randomize_rates(crn, 1, 2.0, 1.0), SimError);
}

TEST_CASE("trajectory CSV export round-trips the final state") {
    Crn crn = compile(relu_net());
    SimConfig cfg;
    cfg.samples = 10;
    Trajectory traj = simulate(crn, {2.0}, cfg);
    std::string path = "traj_test.csv";
    export_trajectory(traj, path);

    std::ifstream f(path);
    REQUIRE(f.good());
    std::string header;
    std::getline(f, header);
    // Structured names contain commas and must be quoted.
    CHECK(header.find("\"H2,1+\"") != std::string::npos);
    CHECK(header.rfind("t,", 0) == 0);
    CHECK(header.substr(header.size() - 3) == ",y0");

    std::vector<std::string> rows;
    for (std::string line; std::getline(f, line);)
        if (!line.empty()) rows.push_back(line);
    REQUIRE(rows.size() == traj.times.size());

    // Last column of the last row is the decoded output, written with
    // enough digits to round-trip.
    const std::string& last = rows.back();
    double y = std::stod(last.substr(last.rfind(',') + 1));
    CHECK(y == readout_values(traj)[0]);
    std::remove(path.c_str());
}

TEST_CASE("sampling keeps first and last points") {
    Crn crn = parse_crn("rxn: A -> B @ 1\ninit A 1\n");
    SimConfig cfg;
    cfg.t_end = 10.0;
    cfg.ss_eps = 0;
    cfg.samples = 5;
    Trajectory traj = simulate(crn, {}, cfg);
    CHECK(traj.times.size() == 5);
    CHECK(traj.states.size() == 5);
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == 10.0);
}

TEST_CASE("step budget exhaustion raises") {
    Crn crn = parse_crn(
        "rxn: A + B -> C @ 1\n"
        "init A 2\n"
        "init B 5\n");
    SimConfig cfg;
    cfg.t_end = 1e6;
    cfg.ss_eps = 0;
    cfg.max_steps = 10;
    CHECK_THROWS_AS(simulate(crn, {}, cfg), SimError);
}

TEST_CASE("input arity must match the CRN") {
    Crn crn = compile(fanout_net());
    CHECK_THROWS_WITH_AS(simulate(crn, {1.0}),
                         "input has 1 values but CRN declares 2 input pairs", SimError);
}

TEST_CASE("config validation") {
    SimConfig cfg;
    cfg.t_end = 0;
    CHECK_THROWS_AS(cfg.validate(), SimError);
    cfg = {};
    cfg.rtol = -1;
    CHECK_THROWS_AS(cfg.validate(), SimError);
    cfg = {};
    cfg.max_steps = 0;
    CHECK_THROWS_AS(cfg.validate(), SimError);
    cfg = {};
    cfg.ss_eps = -1e-9;
    CHECK_THROWS_AS(cfg.validate(), SimError);
    cfg = {};
    cfg.samples = 1;
    CHECK_THROWS_AS(cfg.validate(), SimError);
    cfg = {};
    CHECK_NOTHROW(cfg.validate());
}
