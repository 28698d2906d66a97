#include "molnet/nn.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "molnet/crn.hpp"  // format_double

namespace molnet {

using nlohmann::json;

std::vector<int> BinaryNetwork::shape() const {
    std::vector<int> s{input_dim};
    for (const auto& l : layers) s.push_back(l.fan_out());
    return s;
}

void BinaryNetwork::validate() const {
    if (input_dim < 1) throw NnError("input_dim must be positive");
    if (layers.empty()) throw NnError("network needs at least one layer");
    int prev = input_dim;
    for (size_t li = 0; li < layers.size(); ++li) {
        const BinaryLayer& l = layers[li];
        std::string where = "layer " + std::to_string(li + 1);
        if (l.fan_in() != prev)
            throw NnError(where + ": fan_in " + std::to_string(l.fan_in()) +
                          " does not match previous width " + std::to_string(prev));
        if (l.fan_out() < 1) throw NnError(where + ": empty weight rows");
        for (const auto& row : l.weights) {
            if (int(row.size()) != l.fan_out()) throw NnError(where + ": ragged weight matrix");
            for (int w : row)
                if (w != 1 && w != -1)
                    throw NnError(where + ": weight entry " + std::to_string(w) +
                                  " is not -1 or +1");
        }
        if (int(l.bias.size()) != l.fan_out())
            throw NnError(where + ": bias length " + std::to_string(l.bias.size()) +
                          " does not match fan_out " + std::to_string(l.fan_out()));
        prev = l.fan_out();
    }
}

std::vector<double> forward(const BinaryNetwork& net, std::span<const double> x) {
    if (int(x.size()) != net.input_dim)
        throw NnError("input length " + std::to_string(x.size()) + " does not match input_dim " +
                      std::to_string(net.input_dim));
    std::vector<double> h(x.begin(), x.end());
    for (const BinaryLayer& l : net.layers) {
        std::vector<double> z(l.bias);
        for (int i = 0; i < l.fan_in(); ++i) {
            double hi = h[i];
            if (hi == 0.0) continue;
            const auto& row = l.weights[i];
            for (int j = 0; j < l.fan_out(); ++j) z[j] += row[j] > 0 ? hi : -hi;
        }
        if (l.activation == Activation::relu)
            for (double& v : z) v = v > 0.0 ? v : 0.0;
        h = std::move(z);
    }
    return h;
}

int argmax_class(std::span<const double> y) {
    if (y.empty()) throw NnError("argmax of empty vector");
    int best = 0;
    for (int i = 1; i < int(y.size()); ++i)
        if (y[i] > y[best]) best = i;
    return best;
}

namespace {

Activation parse_activation(const std::string& s, const std::string& where) {
    if (s == "relu") return Activation::relu;
    if (s == "linear") return Activation::linear;
    throw NnError(where + ": unknown activation \"" + s + "\"");
}

}  // namespace

void save_network(const BinaryNetwork& net, const std::string& path) {
    net.validate();
    json j;
    j["input_dim"] = net.input_dim;
    j["layers"] = json::array();
    for (const BinaryLayer& l : net.layers) {
        json jl;
        jl["weights"] = l.weights;
        jl["bias"] = l.bias;
        jl["activation"] = l.activation == Activation::relu ? "relu" : "linear";
        j["layers"].push_back(std::move(jl));
    }
    j["metadata"] = net.metadata;
    std::ofstream f(path);
    if (!f) throw NnError("cannot write " + path);
    f << j.dump(2) << "\n";
}

BinaryNetwork load_network(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw NnError("cannot open " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw NnError(path + ": " + e.what());
    }
    BinaryNetwork net;
    try {
        net.input_dim = j.at("input_dim").get<int>();
        const json& layers = j.at("layers");
        if (!layers.is_array()) throw NnError("\"layers\" must be an array");
        for (size_t li = 0; li < layers.size(); ++li) {
            std::string where = "layer " + std::to_string(li + 1);
            const json& jl = layers[li];
            BinaryLayer l;
            const json& w = jl.at("weights");
            for (const json& row : w) {
                std::vector<int> r;
                for (const json& e : row) {
                    if (!e.is_number_integer())
                        throw NnError(where + ": weight entries must be integers");
                    int v = e.get<int>();
                    if (v != 1 && v != -1)
                        throw NnError(where + ": weight entry " + std::to_string(v) +
                                      " is not -1 or +1");
                    r.push_back(v);
                }
                l.weights.push_back(std::move(r));
            }
            l.bias = jl.at("bias").get<std::vector<double>>();
            l.activation = parse_activation(jl.at("activation").get<std::string>(), where);
            net.layers.push_back(std::move(l));
        }
        if (j.contains("metadata"))
            net.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
    } catch (const json::exception& e) {
        throw NnError(path + ": " + e.what());
    }
    net.validate();
    return net;
}

namespace {

std::string join_doubles(std::span<const double> v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += format_double(v[i]);
    }
    return s;
}

bool split_doubles(const std::string& s, std::vector<double>& out) {
    out.clear();
    size_t pos = 0;
    while (pos <= s.size()) {
        size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        double v = 0;
        auto [p, ec] = std::from_chars(s.data() + pos, s.data() + comma, v);
        if (ec != std::errc() || p != s.data() + comma) return false;
        out.push_back(v);
        pos = comma + 1;
    }
    return true;
}

}  // namespace

bool scaling_from_metadata(const BinaryNetwork& net, std::vector<double>& mean,
                           std::vector<double>& std) {
    auto mi = net.metadata.find("scale_mean");
    auto si = net.metadata.find("scale_std");
    if (mi == net.metadata.end() || si == net.metadata.end()) return false;
    if (!split_doubles(mi->second, mean) || !split_doubles(si->second, std))
        throw NnError("malformed scaling metadata");
    if (mean.size() != std.size() || int(mean.size()) != net.input_dim)
        throw NnError("scaling metadata length does not match input_dim");
    return true;
}

void scaling_to_metadata(BinaryNetwork& net, std::span<const double> mean,
                         std::span<const double> std) {
    net.metadata["scale_mean"] = join_doubles(mean);
    net.metadata["scale_std"] = join_doubles(std);
}

}  // namespace molnet
