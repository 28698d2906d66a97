#include "molnet/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "json.hpp"

namespace molnet {

VerificationReport verify(const BinaryNetwork& net, const Crn& crn, const LabeledDataset& data,
                          const VerifyConfig& cfg) {
    net.validate();
    crn.validate();
    cfg.sim.validate();
    if (data.x.empty()) throw DataError("verify needs at least one example");
    if (int(data.x[0].size()) != net.input_dim)
        throw DataError("dataset has " + std::to_string(data.x[0].size()) +
                        " features but network expects " + std::to_string(net.input_dim));
    if (crn.inputs.size() != size_t(net.input_dim) ||
        crn.outputs.size() != net.layers.back().bias.size())
        throw DataError("CRN input/output pairs do not match the network shape");

    std::vector<double> mean, std;
    bool scaled = cfg.use_metadata_scaling && scaling_from_metadata(net, mean, std);

    VerificationReport rep;
    rep.config = cfg.sim;
    rep.scaled = scaled;
    rep.examples.resize(data.x.size());

    auto t0 = std::chrono::steady_clock::now();
    const int n = int(data.x.size());
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) {
        ExampleResult& r = rep.examples[i];
        r.index = i;
        std::vector<double> x = data.x[i];
        if (scaled) x = apply_scaling(x, mean, std);
        r.nn_output = forward(net, x);
        try {
            Trajectory traj = simulate(crn, x, cfg.sim);
            r.crn_output = readout_values(traj);
            r.stop_time = traj.stop_time;
            r.agree = argmax_class(r.nn_output) == argmax_class(r.crn_output);
            for (size_t j = 0; j < r.nn_output.size(); ++j)
                r.max_err = std::max(r.max_err, std::abs(r.nn_output[j] - r.crn_output[j]));
        } catch (const std::exception& e) {
            r.error = e.what();
        }
    }
    rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    int agreed = 0, simulated = 0;
    for (const ExampleResult& r : rep.examples) {
        if (!r.ok()) {
            ++rep.failed;
            continue;
        }
        ++simulated;
        agreed += r.agree;
        rep.max_err = std::max(rep.max_err, r.max_err);
    }
    rep.agreement_rate = simulated ? double(agreed) / simulated : 0.0;
    return rep;
}

std::string report_json(const VerificationReport& report) {
    nlohmann::json j;
    j["examples"] = nlohmann::json::array();
    for (const ExampleResult& r : report.examples) {
        nlohmann::json e{{"index", r.index},
                         {"nn_output", r.nn_output},
                         {"crn_output", r.crn_output},
                         {"agree", r.agree},
                         {"max_err", r.max_err}};
        if (!r.ok()) {
            e["max_err"] = nullptr;
            e["error"] = r.error;
        }
        j["examples"].push_back(std::move(e));
    }
    j["agreement_rate"] = report.agreement_rate;
    j["max_err"] = report.max_err;
    j["config_echo"] = {{"t_end", report.config.t_end},
                        {"atol", report.config.atol},
                        {"rtol", report.config.rtol},
                        {"max_steps", report.config.max_steps},
                        {"ss_eps", report.config.ss_eps},
                        {"samples", report.config.samples},
                        {"metadata_scaling", report.scaled}};
    return j.dump(2);
}

}  // namespace molnet
