// molnet: train binary-weight networks, compile them to rate-independent
// CRNs, reduce, simulate, and verify NN/CRN agreement.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "molnet/compiler.hpp"
#include "molnet/crn.hpp"
#include "molnet/dataset.hpp"
#include "molnet/nn.hpp"
#include "molnet/reducer.hpp"
#include "molnet/simulator.hpp"
#include "molnet/trainer.hpp"
#include "molnet/verify.hpp"

using namespace molnet;

namespace {

struct Global {
    uint64_t seed = 1;
    bool quiet = false;
    bool json = false;
};

std::vector<double> parse_floats(const std::string& s) {
    std::vector<double> out;
    size_t pos = 0;
    while (pos <= s.size()) {
        size_t comma = s.find(',', pos);
        std::string tok = s.substr(pos, comma == std::string::npos ? comma : comma - pos);
        size_t a = tok.find_first_not_of(" \t");
        size_t b = tok.find_last_not_of(" \t");
        if (a == std::string::npos) throw std::runtime_error("empty value in list: '" + s + "'");
        tok = tok.substr(a, b - a + 1);
        double v = 0.0;
        auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || p != tok.data() + tok.size())
            throw std::runtime_error("bad number '" + tok + "'");
        out.push_back(v);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

Crn apply_cancellation(const Crn& crn, const std::string& mode) {
    if (mode == "none") return crn;
    if (mode == "outputs") {
        std::vector<std::pair<Species, Species>> pairs;
        for (const auto& [p, m] : crn.outputs) pairs.emplace_back(p, m);
        return add_cancellation(crn, pairs);
    }
    if (mode == "all") return add_cancellation(crn, dual_rail_pairs(crn));
    throw std::runtime_error("unknown cancellation mode '" + mode + "'");
}

void print_stats(const Crn& crn, const Global& g) {
    CrnStats st = crn_stats(crn);
    if (g.json) {
        nlohmann::json j{{"species", st.species},
                         {"reactions", st.reactions},
                         {"uni", st.unimolecular},
                         {"bi", st.bimolecular},
                         {"max_products", st.max_products},
                         {"inputs", crn.inputs.size()},
                         {"outputs", crn.outputs.size()}};
        std::cout << j.dump() << "\n";
        return;
    }
    std::cout << "{reactions:" << st.reactions << ", uni:" << st.unimolecular
              << ", bi:" << st.bimolecular << "}\n";
    if (!g.quiet)
        std::cout << "species " << st.species << ", inputs " << crn.inputs.size() << ", outputs "
                  << crn.outputs.size() << ", max products per reaction " << st.max_products
                  << "\n";
}

int cmd_train(const Global& g, const std::string& data_path, bool header, bool iris, bool scale,
              TrainConfig cfg, const std::string& out, const std::string& log_path) {
    LabeledDataset ds = iris ? load_iris(data_path) : load_csv(data_path, header);
    Scaling sc;
    if (scale) {
        sc = fit_scaling(ds);
        apply_scaling(ds, sc);
    }
    cfg.seed = g.seed;
    TrainResult res = train(ds, cfg);
    if (scale) scaling_to_metadata(res.net, sc.mean, sc.std);
    save_network(res.net, out);
    for (const std::string& w : res.warnings) std::cerr << "warning: " << w << "\n";
    if (!log_path.empty()) {
        std::ofstream f(log_path);
        if (!f) throw TrainError("cannot open " + log_path + " for writing");
        f << "epoch,loss,train_acc,val_acc\n";
        for (const EpochLog& e : res.log)
            f << e.epoch << ',' << e.loss << ',' << e.train_acc << ',' << e.val_acc << '\n';
    }
    if (g.json) {
        nlohmann::json j{{"out", out},
                         {"best_epoch", res.best_epoch},
                         {"accuracy", res.best_acc},
                         {"margin", res.best_margin}};
        std::cout << j.dump() << "\n";
    } else if (!g.quiet) {
        std::printf("trained %zu examples, best epoch %d, accuracy %.4f, margin %.4f -> %s\n",
                    ds.x.size(), res.best_epoch, res.best_acc, res.best_margin, out.c_str());
    }
    return 0;
}

int cmd_simulate(const Global& g, const std::string& crn_path, const std::string& input_str,
                 SimConfig sim, const std::string& out, bool has_rates, uint64_t rates_seed,
                 const std::string& rates_range, bool scale_t_end) {
    Crn crn = load_crn(crn_path);
    if (has_rates) {
        std::vector<double> r = parse_floats(rates_range);
        if (r.size() != 2) throw SimError("--rates-range needs two values: a,b");
        crn = randomize_rates(crn, rates_seed, r[0], r[1]);
        if (scale_t_end) {
            double kmin = r[1];
            for (const Reaction& rx : crn.reactions) kmin = std::min(kmin, rx.k);
            sim.t_end /= kmin;
        }
    }
    std::vector<double> input =
        input_str.empty() ? std::vector<double>{} : parse_floats(input_str);
    Trajectory traj = simulate(crn, input, sim);
    if (!out.empty()) export_trajectory(traj, out);
    std::vector<double> y = readout_values(traj);
    if (g.json) {
        nlohmann::json j{{"outputs", y},
                         {"stop_time", traj.stop_time},
                         {"steady_state", traj.stop_reason == StopReason::steady_state},
                         {"steps", traj.steps_accepted}};
        if (!y.empty()) j["class"] = readout_class(traj);
        std::cout << j.dump() << "\n";
        return 0;
    }
    std::cout << "outputs:";
    for (double v : y) std::cout << ' ' << format_double(v);
    std::cout << "\n";
    if (!y.empty()) std::cout << "class: " << readout_class(traj) << "\n";
    if (!g.quiet)
        std::cout << "stopped at t=" << format_double(traj.stop_time)
                  << (traj.stop_reason == StopReason::steady_state ? " (steady state)"
                                                                   : " (t_end)")
                  << " after " << traj.steps_accepted << " steps\n";
    return 0;
}

int cmd_verify(const Global& g, const std::string& net_path, const std::string& crn_path,
               const std::string& data_path, bool header, bool iris, VerifyConfig cfg,
               const std::string& out) {
    BinaryNetwork net = load_network(net_path);
    Crn crn = load_crn(crn_path);
    LabeledDataset ds = iris ? load_iris(data_path) : load_csv(data_path, header);
    VerificationReport rep = verify(net, crn, ds, cfg);
    std::string js = report_json(rep);
    if (!out.empty()) {
        std::ofstream f(out);
        if (!f) throw SimError("cannot open " + out + " for writing");
        f << js << "\n";
    }
    if (g.json) {
        std::cout << js << "\n";
    } else {
        int agreed = 0;
        for (const ExampleResult& r : rep.examples) agreed += r.ok() && r.agree;
        std::printf("agreement %d/%zu, max value error %.6g, %d failed, %.2fs\n", agreed,
                    rep.examples.size(), rep.max_err, rep.failed, rep.runtime_seconds);
        if (!g.quiet)
            for (const ExampleResult& r : rep.examples)
                if (!r.ok() || !r.agree)
                    std::printf("  example %d: %s\n", r.index,
                                r.ok() ? "label mismatch" : r.error.c_str());
    }
    return 0;
}

int cmd_gen_data(const Global& g, SyntheticSpec spec, const std::string& out) {
    LabeledDataset ds = make_synthetic(spec, g.seed);
    std::ofstream f(out);
    if (!f) throw DataError("cannot open " + out + " for writing");
    for (size_t i = 0; i < ds.x.size(); ++i) {
        for (double v : ds.x[i]) f << format_double(v) << ',';
        f << ds.y[i] << '\n';
    }
    if (!f.flush()) throw DataError("write failed for " + out);
    if (!g.quiet)
        std::printf("wrote %zu examples (%d classes x %d features) -> %s\n", ds.x.size(),
                    spec.classes, spec.features, out.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"binary-weight neural networks compiled to rate-independent CRNs"};
    app.require_subcommand(1);
    Global g;
    app.add_option("--seed", g.seed, "global RNG seed")->capture_default_str();
    app.add_flag("--quiet", g.quiet, "suppress informational output");
    app.add_flag("--json", g.json, "structured output on stdout");

    // train
    auto* tr = app.add_subcommand("train", "train a BinaryConnect network");
    std::string tr_data, tr_out = "net.json", tr_log;
    bool tr_header = false, tr_iris = false, tr_noscale = false;
    TrainConfig tcfg;
    std::string tr_hidden = "8";
    tr->add_option("--data", tr_data, "training CSV (features..., label)")->required();
    tr->add_flag("--header", tr_header, "CSV has a header row");
    tr->add_flag("--iris", tr_iris, "validate IRIS shape (4 features, 3 classes)");
    tr->add_option("--out", tr_out, "output network JSON")->capture_default_str();
    tr->add_option("--hidden", tr_hidden, "hidden layer sizes, comma separated")
        ->capture_default_str();
    tr->add_option("--epochs", tcfg.epochs)->capture_default_str();
    tr->add_option("--batch", tcfg.batch)->capture_default_str();
    tr->add_option("--lr", tcfg.lr)->capture_default_str();
    tr->add_option("--lr-decay", tcfg.lr_decay)->capture_default_str();
    tr->add_option("--dropout-keep", tcfg.dropout_keep)->capture_default_str();
    tr->add_option("--val-fraction", tcfg.val_fraction)->capture_default_str();
    tr->add_flag("--no-scale", tr_noscale, "skip z-score feature scaling");
    tr->add_option("--log", tr_log, "write per-epoch CSV log");

    // compile
    auto* co = app.add_subcommand("compile", "compile a network to a CRN");
    std::string co_net, co_out = "net.crn", co_cancel = "none";
    bool co_reduce = false;
    co->add_option("--net", co_net, "network JSON")->required();
    co->add_option("--out", co_out, "output CRN file")->capture_default_str();
    co->add_flag("--reduce", co_reduce, "apply the reduction pass");
    co->add_option("--cancellation", co_cancel, "add S+ + S- -> W reactions: none|outputs|all")
        ->capture_default_str();

    // reduce
    auto* re = app.add_subcommand("reduce", "reduce a compiled CRN");
    std::string re_crn, re_out = "reduced.crn", re_cancel = "none";
    re->add_option("--crn", re_crn, "input CRN file")->required();
    re->add_option("--out", re_out, "output CRN file")->capture_default_str();
    re->add_option("--cancellation", re_cancel, "add S+ + S- -> W reactions: none|outputs|all")
        ->capture_default_str();

    // simulate
    auto* si = app.add_subcommand("simulate", "integrate mass-action kinetics");
    std::string si_crn, si_input, si_out, si_rates_range = "0.1,10";
    SimConfig scfg;
    uint64_t si_rates_seed = 0;
    bool si_has_seed = false, si_scale_t = false;
    si->add_option("--crn", si_crn, "CRN file")->required();
    si->add_option("--input", si_input, "comma-separated input values");
    si->add_option("--t-end", scfg.t_end)->capture_default_str();
    si->add_option("--atol", scfg.atol)->capture_default_str();
    si->add_option("--rtol", scfg.rtol)->capture_default_str();
    si->add_option("--ss-eps", scfg.ss_eps, "steady-state derivative threshold, 0 disables")
        ->capture_default_str();
    si->add_option("--max-steps", scfg.max_steps)->capture_default_str();
    si->add_option("--samples", scfg.samples, "thin trajectory to this many rows (0: keep all)")
        ->capture_default_str();
    si->add_option("--out", si_out, "write trajectory CSV");
    si->add_option("--rates-seed", si_rates_seed, "randomize rate constants with this seed");
    si->add_option("--rates-range", si_rates_range, "log-uniform range a,b for --rates-seed")
        ->capture_default_str();
    si->add_flag("--scale-t-end", si_scale_t, "divide t_end by min rate after randomization");

    // verify
    auto* ve = app.add_subcommand("verify", "compare network forward pass against CRN readout");
    std::string ve_net, ve_crn, ve_data, ve_out;
    bool ve_header = false, ve_iris = false, ve_noscale = false;
    VerifyConfig vcfg;
    ve->add_option("--net", ve_net, "network JSON")->required();
    ve->add_option("--crn", ve_crn, "CRN file")->required();
    ve->add_option("--data", ve_data, "dataset CSV")->required();
    ve->add_flag("--header", ve_header, "CSV has a header row");
    ve->add_flag("--iris", ve_iris, "validate IRIS shape");
    ve->add_option("--t-end", vcfg.sim.t_end)->capture_default_str();
    ve->add_option("--atol", vcfg.sim.atol)->capture_default_str();
    ve->add_option("--rtol", vcfg.sim.rtol)->capture_default_str();
    ve->add_option("--ss-eps", vcfg.sim.ss_eps)->capture_default_str();
    ve->add_option("--max-steps", vcfg.sim.max_steps)->capture_default_str();
    ve->add_flag("--no-metadata-scaling", ve_noscale, "feed raw features to both sides");
    ve->add_option("--out", ve_out, "write JSON report");

    // info
    auto* in = app.add_subcommand("info", "print CRN or network statistics");
    std::string in_crn, in_net;
    in->add_option("--crn", in_crn, "CRN file");
    in->add_option("--net", in_net, "network JSON");

    // gen-data
    auto* gd = app.add_subcommand("gen-data", "generate Gaussian-blob synthetic data");
    SyntheticSpec gspec;
    std::string gd_out = "synthetic.csv";
    gd->add_option("--classes", gspec.classes)->capture_default_str();
    gd->add_option("--features", gspec.features)->capture_default_str();
    gd->add_option("--per-class", gspec.per_class)->capture_default_str();
    gd->add_option("--margin", gspec.margin, "pairwise centroid distance in sigma units")
        ->capture_default_str();
    gd->add_option("--out", gd_out)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*tr) {
            std::vector<double> h = parse_floats(tr_hidden);
            tcfg.hidden.clear();
            for (double v : h) tcfg.hidden.push_back(int(v));
            return cmd_train(g, tr_data, tr_header, tr_iris, !tr_noscale, tcfg, tr_out, tr_log);
        }
        if (*co) {
            BinaryNetwork net = load_network(co_net);
            Crn crn = compile(net);
            if (co_reduce) crn = reduce(crn);
            crn = apply_cancellation(crn, co_cancel);
            save_crn(crn, co_out);
            print_stats(crn, g);
            return 0;
        }
        if (*re) {
            Crn crn = reduce(load_crn(re_crn));
            crn = apply_cancellation(crn, re_cancel);
            save_crn(crn, re_out);
            print_stats(crn, g);
            return 0;
        }
        if (*si) {
            si_has_seed = si->count("--rates-seed") > 0;
            return cmd_simulate(g, si_crn, si_input, scfg, si_out, si_has_seed, si_rates_seed,
                                si_rates_range, si_scale_t);
        }
        if (*ve) {
            vcfg.use_metadata_scaling = !ve_noscale;
            return cmd_verify(g, ve_net, ve_crn, ve_data, ve_header, ve_iris, vcfg, ve_out);
        }
        if (*in) {
            if (in_crn.empty() == in_net.empty())
                throw std::runtime_error("info needs exactly one of --crn or --net");
            if (!in_crn.empty()) {
                print_stats(load_crn(in_crn), g);
            } else {
                BinaryNetwork net = load_network(in_net);
                if (g.json) {
                    nlohmann::json j{{"shape", net.shape()}, {"layers", net.layers.size()}};
                    j["metadata"] = net.metadata;
                    std::cout << j.dump() << "\n";
                } else {
                    std::cout << "shape:";
                    for (int s : net.shape()) std::cout << ' ' << s;
                    std::cout << "\n";
                    if (!g.quiet)
                        for (const auto& [k, v] : net.metadata)
                            std::cout << "  " << k << ": " << v << "\n";
                }
            }
            return 0;
        }
        if (*gd) return cmd_gen_data(g, gspec, gd_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
