#include "molnet/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "molnet/rng.hpp"

namespace molnet {

namespace {

using Mat = std::vector<std::vector<double>>;

struct Shadow {
    std::vector<Mat> w;  // real weights in [-1,1]
    std::vector<std::vector<double>> b;
};

struct AdamState {
    std::vector<Mat> mw, vw;
    std::vector<std::vector<double>> mb, vb;
    int64_t t = 0;
};

Mat zeros(int r, int c) { return Mat(r, std::vector<double>(c, 0.0)); }

double sign1(double v) { return v >= 0.0 ? 1.0 : -1.0; }

struct Pass {
    std::vector<Mat> z;      // pre-activations per layer, batch x fan_out
    std::vector<Mat> act;    // act[l] feeds layer l; act[0] is the input batch
    std::vector<Mat> masks;  // dropout masks per hidden layer (empty when keep = 1)
};

// Forward through binarized weights. When rng is given, dropout masks are
// drawn and applied to hidden activations (inverted scaling).
Pass forward_bin(const Shadow& sh, const std::vector<std::vector<double>>& xs,
                 const std::vector<int>& idx, double keep = 1.0, Rng* rng = nullptr) {
    Pass p;
    int nb = int(idx.size());
    int nlayers = int(sh.w.size());
    Mat a(nb);
    for (int n = 0; n < nb; ++n) a[n] = xs[idx[n]];
    p.act.push_back(std::move(a));
    for (int l = 0; l < nlayers; ++l) {
        const Mat& w = sh.w[l];
        int fi = int(w.size());
        int fo = int(sh.b[l].size());
        bool hidden = l + 1 < nlayers;
        Mat z(nb, sh.b[l]);
        const Mat& in = p.act.back();
        for (int n = 0; n < nb; ++n)
            for (int i = 0; i < fi; ++i) {
                double hi = in[n][i];
                if (hi == 0.0) continue;
                for (int j = 0; j < fo; ++j) z[n][j] += sign1(w[i][j]) * hi;
            }
        Mat h = z;
        if (hidden) {
            for (auto& row : h)
                for (double& v : row) v = v > 0.0 ? v : 0.0;
            if (rng && keep < 1.0) {
                Mat mask(nb, std::vector<double>(fo));
                for (int n = 0; n < nb; ++n)
                    for (int j = 0; j < fo; ++j) {
                        double m = uniform01(*rng) < keep ? 1.0 / keep : 0.0;
                        mask[n][j] = m;
                        h[n][j] *= m;
                    }
                p.masks.push_back(std::move(mask));
            }
        }
        p.z.push_back(std::move(z));
        p.act.push_back(std::move(h));
    }
    return p;
}

// Mean squared hinge over the batch; fills dz with d(loss)/d(output).
double hinge_and_grad(const Mat& out, const std::vector<int>& labels, const std::vector<int>& idx,
                      int classes, Mat& dz) {
    int nb = int(out.size());
    double loss = 0.0;
    dz = zeros(nb, classes);
    for (int n = 0; n < nb; ++n) {
        for (int k = 0; k < classes; ++k) {
            double t = labels[idx[n]] == k ? 1.0 : -1.0;
            double m = 1.0 - t * out[n][k];
            if (m > 0.0) {
                loss += m * m;
                dz[n][k] = -2.0 * t * m / nb;
            }
        }
    }
    return loss / nb;
}

BinaryNetwork snapshot(const Shadow& sh, int input_dim) {
    BinaryNetwork net;
    net.input_dim = input_dim;
    for (size_t l = 0; l < sh.w.size(); ++l) {
        BinaryLayer bl;
        bl.weights = binarize(sh.w[l]);
        bl.bias = sh.b[l];
        bl.activation = l + 1 < sh.w.size() ? Activation::relu : Activation::linear;
        net.layers.push_back(std::move(bl));
    }
    return net;
}

// Accuracy and min |hidden pre-activation| of the binarized snapshot over
// a subset, dropout off.
std::pair<double, double> eval_subset(const Shadow& sh, const LabeledDataset& data,
                                      const std::vector<int>& idx) {
    if (idx.empty()) return {0.0, 0.0};
    Pass p = forward_bin(sh, data.x, idx);
    int correct = 0;
    for (size_t n = 0; n < idx.size(); ++n)
        if (argmax_class(p.act.back()[n]) == data.y[idx[n]]) ++correct;
    double margin = std::numeric_limits<double>::infinity();
    for (size_t l = 0; l + 1 < sh.w.size(); ++l)
        for (const auto& row : p.z[l])
            for (double v : row) margin = std::min(margin, std::abs(v));
    if (!std::isfinite(margin)) margin = 0.0;  // no hidden layer
    return {double(correct) / double(idx.size()), margin};
}

void adam_update(double g, double& m, double& v, double& p, double lr, double bc1, double bc2) {
    const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    m = beta1 * m + (1.0 - beta1) * g;
    v = beta2 * v + (1.0 - beta2) * g * g;
    p -= lr * (m / bc1) / (std::sqrt(v / bc2) + eps);
}

}  // namespace

std::vector<std::vector<int>> binarize(const std::vector<std::vector<double>>& w) {
    std::vector<std::vector<int>> out(w.size());
    for (size_t i = 0; i < w.size(); ++i) {
        out[i].resize(w[i].size());
        for (size_t j = 0; j < w[i].size(); ++j) out[i][j] = w[i][j] >= 0.0 ? 1 : -1;
    }
    return out;
}

TrainResult train(const LabeledDataset& data, const TrainConfig& cfg) {
    if (data.size() == 0) throw TrainError("empty dataset");
    if (cfg.epochs < 1 || cfg.batch < 1 || cfg.lr <= 0.0)
        throw TrainError("epochs, batch and lr must be positive");
    if (cfg.lr_decay <= 0.0 || cfg.lr_decay > 1.0) throw TrainError("lr_decay must be in (0,1]");
    if (cfg.dropout_keep <= 0.0 || cfg.dropout_keep > 1.0)
        throw TrainError("dropout_keep must be in (0,1]");
    if (cfg.val_fraction < 0.0 || cfg.val_fraction >= 1.0)
        throw TrainError("val_fraction must be in [0,1)");

    TrainResult res;
    if (std::set<int>(data.y.begin(), data.y.end()).size() < 2)
        res.warnings.push_back("dataset has a single class; training anyway");

    int input_dim = data.features();
    std::vector<int> widths{input_dim};
    for (int h : cfg.hidden) {
        if (h < 1) throw TrainError("hidden widths must be positive");
        widths.push_back(h);
    }
    widths.push_back(data.classes);

    Rng rng(cfg.seed);

    Shadow sh;
    AdamState ad;
    for (size_t l = 0; l + 1 < widths.size(); ++l) {
        int fi = widths[l], fo = widths[l + 1];
        double lim = std::sqrt(6.0 / (fi + fo));
        Mat w = zeros(fi, fo);
        for (int i = 0; i < fi; ++i)
            for (int j = 0; j < fo; ++j) w[i][j] = uniform(rng, -lim, lim);
        sh.w.push_back(std::move(w));
        sh.b.emplace_back(fo, 0.0);
        ad.mw.push_back(zeros(fi, fo));
        ad.vw.push_back(zeros(fi, fo));
        ad.mb.emplace_back(fo, 0.0);
        ad.vb.emplace_back(fo, 0.0);
    }

    // Deterministic holdout: one seeded shuffle, tail becomes validation.
    std::vector<int> order(data.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
    shuffle_indices(order, rng);
    long n_val = long(cfg.val_fraction * double(data.size()));
    std::vector<int> val_idx(order.end() - n_val, order.end());
    std::vector<int> train_idx(order.begin(), order.end() - n_val);
    if (train_idx.empty()) throw TrainError("validation fraction leaves no training data");

    double cur_lr = cfg.lr;
    double best_acc = -1.0, best_margin = -1.0;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        shuffle_indices(train_idx, rng);
        double epoch_loss = 0.0;
        int batches = 0;
        for (size_t start = 0; start < train_idx.size(); start += size_t(cfg.batch)) {
            size_t stop = std::min(start + size_t(cfg.batch), train_idx.size());
            std::vector<int> idx(train_idx.begin() + long(start), train_idx.begin() + long(stop));
            Pass p = forward_bin(sh, data.x, idx, cfg.dropout_keep, &rng);

            Mat delta;
            double loss = hinge_and_grad(p.act.back(), data.y, idx, data.classes, delta);
            if (!std::isfinite(loss))
                throw TrainError("loss diverged (NaN/inf) at epoch " + std::to_string(epoch) +
                                 "; lower the learning rate");
            epoch_loss += loss;
            ++batches;

            // Backward through the binary weights; updates land on the
            // shadow parameters (straight-through), then clip.
            ad.t += 1;
            double bc1 = 1.0 - std::pow(0.9, double(ad.t));
            double bc2 = 1.0 - std::pow(0.999, double(ad.t));
            int nb = int(idx.size());
            for (int l = int(sh.w.size()) - 1; l >= 0; --l) {
                const Mat& in = p.act[l];
                int fi = int(sh.w[l].size()), fo = int(sh.b[l].size());
                Mat gw = zeros(fi, fo);
                std::vector<double> gb(fo, 0.0);
                for (int n = 0; n < nb; ++n)
                    for (int j = 0; j < fo; ++j) {
                        double d = delta[n][j];
                        if (d == 0.0) continue;
                        gb[j] += d;
                        for (int i = 0; i < fi; ++i) gw[i][j] += in[n][i] * d;
                    }
                Mat prev;
                if (l > 0) {
                    prev = zeros(nb, fi);
                    for (int n = 0; n < nb; ++n)
                        for (int i = 0; i < fi; ++i) {
                            double s = 0.0;
                            for (int j = 0; j < fo; ++j) s += sign1(sh.w[l][i][j]) * delta[n][j];
                            if (!p.masks.empty()) s *= p.masks[l - 1][n][i];
                            prev[n][i] = p.z[l - 1][n][i] > 0.0 ? s : 0.0;
                        }
                }
                for (int i = 0; i < fi; ++i)
                    for (int j = 0; j < fo; ++j) {
                        double& wv = sh.w[l][i][j];
                        adam_update(gw[i][j], ad.mw[l][i][j], ad.vw[l][i][j], wv, cur_lr, bc1, bc2);
                        wv = std::clamp(wv, -1.0, 1.0);
                    }
                for (int j = 0; j < fo; ++j)
                    adam_update(gb[j], ad.mb[l][j], ad.vb[l][j], sh.b[l][j], cur_lr, bc1, bc2);
                delta = std::move(prev);
            }
        }
        cur_lr *= cfg.lr_decay;

        auto [train_acc, train_margin] = eval_subset(sh, data, train_idx);
        double val_acc = std::numeric_limits<double>::quiet_NaN();
        double sel_acc = train_acc, sel_margin = train_margin;
        if (!val_idx.empty()) {
            auto [va, vm] = eval_subset(sh, data, val_idx);
            val_acc = va;
            sel_acc = va;
            sel_margin = vm;
        }
        res.log.push_back({epoch, epoch_loss / batches, train_acc, val_acc});

        // Best snapshot by selection accuracy. Equal accuracies break
        // toward the larger minimum |hidden pre-activation|: of two
        // equally accurate epochs, the one whose units sit farther from
        // their ReLU kinks compiles to a CRN that settles faster at
        // finite horizons.
        if (sel_acc > best_acc || (sel_acc == best_acc && sel_margin > best_margin)) {
            best_acc = sel_acc;
            best_margin = sel_margin;
            res.net = snapshot(sh, input_dim);
            res.best_epoch = epoch;
        }
    }

    res.best_acc = best_acc;
    res.best_margin = best_margin;
    res.net.metadata["training_seed"] = std::to_string(cfg.seed);
    res.net.metadata["best_epoch"] = std::to_string(res.best_epoch);
    res.net.validate();
    return res;
}

double evaluate(const BinaryNetwork& net, const LabeledDataset& data) {
    if (net.input_dim != data.features())
        throw NnError("dataset feature count does not match network input_dim");
    int correct = 0;
    for (size_t n = 0; n < data.size(); ++n)
        if (argmax_class(forward(net, data.x[n])) == data.y[n]) ++correct;
    return double(correct) / double(data.size());
}

double hinge_loss(const BinaryNetwork& net, const LabeledDataset& data) {
    double loss = 0.0;
    for (size_t n = 0; n < data.size(); ++n) {
        auto y = forward(net, data.x[n]);
        for (int k = 0; k < data.classes; ++k) {
            double t = data.y[n] == k ? 1.0 : -1.0;
            double m = std::max(0.0, 1.0 - t * y[k]);
            loss += m * m;
        }
    }
    return loss / double(data.size());
}

std::vector<std::vector<double>> hinge_bias_grads(const BinaryNetwork& net,
                                                  const LabeledDataset& data) {
    // Mirrors the training backward pass at fixed binary weights,
    // restricted to the bias gradients.
    std::vector<std::vector<double>> grads;
    for (const auto& l : net.layers) grads.emplace_back(l.bias.size(), 0.0);
    for (size_t n = 0; n < data.size(); ++n) {
        std::vector<std::vector<double>> zs, acts;
        acts.push_back(data.x[n]);
        for (const auto& layer : net.layers) {
            std::vector<double> z = layer.bias;
            for (int i = 0; i < layer.fan_in(); ++i) {
                double hi = acts.back()[i];
                if (hi == 0.0) continue;
                for (int j = 0; j < layer.fan_out(); ++j)
                    z[j] += layer.weights[i][j] > 0 ? hi : -hi;
            }
            zs.push_back(z);
            if (layer.activation == Activation::relu)
                for (double& v : z) v = v > 0.0 ? v : 0.0;
            acts.push_back(std::move(z));
        }
        int classes = net.layers.back().fan_out();
        std::vector<double> delta(classes);
        for (int k = 0; k < classes; ++k) {
            double t = data.y[n] == k ? 1.0 : -1.0;
            double m = 1.0 - t * acts.back()[k];
            delta[k] = m > 0.0 ? -2.0 * t * m / double(data.size()) : 0.0;
        }
        for (int l = int(net.layers.size()) - 1; l >= 0; --l) {
            const auto& layer = net.layers[l];
            for (int j = 0; j < layer.fan_out(); ++j) grads[l][j] += delta[j];
            if (l == 0) break;
            bool gate = net.layers[l - 1].activation == Activation::relu;
            std::vector<double> prev(layer.fan_in(), 0.0);
            for (int i = 0; i < layer.fan_in(); ++i) {
                double s = 0.0;
                for (int j = 0; j < layer.fan_out(); ++j)
                    s += (layer.weights[i][j] > 0 ? 1.0 : -1.0) * delta[j];
                prev[i] = !gate || zs[l - 1][i] > 0.0 ? s : 0.0;
            }
            delta = std::move(prev);
        }
    }
    return grads;
}

}  // namespace molnet
