#pragma once

// Seeded randomness helpers. Distribution code is written out (instead of
// <random> distributions) so that streams are identical across standard
// library implementations; reproducibility claims depend on it.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace molnet {

using Rng = std::mt19937_64;

// Uniform in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return double(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

inline double log_uniform(Rng& rng, double lo, double hi) {
    return std::exp(uniform(rng, std::log(lo), std::log(hi)));
}

// Standard normal by Box-Muller (one value per call, spare discarded;
// simple beats stateful here).
inline double normal(Rng& rng) {
    double u1 = 1.0 - uniform01(rng);  // (0, 1]
    double u2 = uniform01(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

// Unbiased integer in [0, n) by rejection.
inline uint64_t uniform_index(Rng& rng, uint64_t n) {
    uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    uint64_t v;
    do {
        v = rng();
    } while (v >= limit);
    return v % n;
}

inline void shuffle_indices(std::vector<int>& idx, Rng& rng) {
    for (size_t i = idx.size(); i > 1; --i)
        std::swap(idx[i - 1], idx[uniform_index(rng, i)]);
}

}  // namespace molnet
