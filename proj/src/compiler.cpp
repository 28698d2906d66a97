#include "molnet/compiler.hpp"

namespace molnet {

namespace {

Rail flip(Rail r) { return r == Rail::plus ? Rail::minus : Rail::plus; }

}  // namespace

Crn compile(const BinaryNetwork& net) {
    net.validate();
    int nlayers = int(net.layers.size());
    for (int t = 0; t < nlayers; ++t) {
        bool last = t + 1 == nlayers;
        Activation a = net.layers[t].activation;
        if (!last && a != Activation::relu)
            throw CompileError("layer " + std::to_string(t + 1) +
                               ": hidden layers must be ReLU");
        if (last && a != Activation::linear)
            throw CompileError("final layer must be Linear");
    }

    Crn crn;
    for (int t = 0; t < nlayers; ++t) {
        const BinaryLayer& layer = net.layers[t];
        int l = t + 2;  // input layer is 1
        bool relu = layer.activation == Activation::relu;

        // Species the row reactions produce: intermediates for ReLU
        // layers (the gadget turns I into H), layer outputs for linear.
        auto product = [&](int j, Rail r) {
            return relu ? Species::intermediate(l, j, r) : Species::hidden(l, j, r);
        };
        auto reactant = [&](int i, Rail r) {
            return t == 0 ? Species::input(i, r) : Species::hidden(l - 1, i, r);
        };

        for (int i = 1; i <= layer.fan_in(); ++i) {
            Reaction pos;
            pos.reactants.push_back({reactant(i, Rail::plus), 1});
            for (int j = 1; j <= layer.fan_out(); ++j) {
                Rail r = layer.weights[i - 1][j - 1] > 0 ? Rail::plus : Rail::minus;
                pos.products.push_back({product(j, r), 1});
            }
            Reaction neg;
            neg.reactants.push_back({reactant(i, Rail::minus), 1});
            for (const Term& term : pos.products) {
                Species s = term.sp;
                s.rail = flip(s.rail);
                neg.products.push_back({s, term.mult});
            }
            pos.canonicalize();
            neg.canonicalize();
            crn.reactions.push_back(std::move(pos));
            crn.reactions.push_back(std::move(neg));
        }

        for (int j = 1; j <= layer.fan_out(); ++j) {
            double b = layer.bias[j - 1];
            if (b > 0.0) crn.init[product(j, Rail::plus)] = b;
            else if (b < 0.0) crn.init[product(j, Rail::minus)] = -b;
            // exact zero: no entry
        }

        if (relu) {
            for (int j = 1; j <= layer.fan_out(); ++j) {
                Reaction split;  // I+ -> M + H+
                split.reactants.push_back({Species::intermediate(l, j, Rail::plus), 1});
                split.products.push_back({Species::mem(l, j), 1});
                split.products.push_back({Species::hidden(l, j, Rail::plus), 1});
                split.canonicalize();
                Reaction annihilate;  // M + I- -> H-
                annihilate.reactants.push_back({Species::mem(l, j), 1});
                annihilate.reactants.push_back({Species::intermediate(l, j, Rail::minus), 1});
                annihilate.products.push_back({Species::hidden(l, j, Rail::minus), 1});
                annihilate.canonicalize();
                crn.reactions.push_back(std::move(split));
                crn.reactions.push_back(std::move(annihilate));
            }
        }
    }

    for (int i = 1; i <= net.input_dim; ++i)
        crn.inputs.emplace_back(Species::input(i, Rail::plus), Species::input(i, Rail::minus));
    int out_layer = nlayers + 1;
    for (int j = 1; j <= net.layers.back().fan_out(); ++j)
        crn.outputs.emplace_back(Species::hidden(out_layer, j, Rail::plus),
                                 Species::hidden(out_layer, j, Rail::minus));

    crn.validate();
    return crn;
}

int64_t reaction_count_unoptimized(const std::vector<int>& shape) {
    if (shape.size() < 2) throw CompileError("shape needs an input and an output layer");
    int64_t n = 0;
    for (size_t l = 1; l < shape.size(); ++l) {
        n += 2 * int64_t(shape[l - 1]);                     // row reactions and mirrors
        if (l + 1 < shape.size()) n += 2 * int64_t(shape[l]);  // ReLU gadgets
    }
    return n;
}

}  // namespace molnet
