#pragma once

// Deterministic randomness utilities.
//
// All sampling in the library goes through these helpers instead of the
// <random> distribution templates: distribution output is implementation
// defined, while mt19937_64's raw stream is pinned by the standard.  Using
// rejection sampling and an explicit Fisher-Yates keeps every artifact
// byte-identical across compilers and platforms for a given seed.

#include <cstdint>
#include <random>
#include <vector>

namespace teamflow {

// one step of the splitmix64 sequence; also a good 64-bit mixer
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Fold an ordered list of 64-bit words into one seed.  Used to derive the
// per-realization seeds from (master seed, model, window, side, index).
// Each round rehashes the previous digest xor the next word, so every
// coordinate goes through the full mixer and shifted lists don't collide.
inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> words) {
    std::uint64_t out = 0x243f6a8885a308d3ULL;  // arbitrary nonzero start
    for (std::uint64_t w : words) {
        std::uint64_t state = out ^ w;
        out = splitmix64(state);
    }
    return out;
}

using rng64 = std::mt19937_64;

inline rng64 make_rng(std::uint64_t seed) { return rng64(seed); }

// unbiased integer in [0, bound) by rejection on the top of the 64-bit range
inline std::uint64_t next_below(rng64& g, std::uint64_t bound) {
    if (bound <= 1) return 0;
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    for (;;) {
        std::uint64_t x = g();
        if (x < limit) return x % bound;
    }
}

// uniform double in [0, 1) with 53 random bits
inline double next_unit(rng64& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

template <typename T>
void shuffle_vec(std::vector<T>& v, rng64& g) {
    for (std::size_t i = v.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(next_below(g, i));
        std::swap(v[i - 1], v[j]);
    }
}

// index draw proportional to the given nonnegative weights
inline std::size_t weighted_pick(rng64& g, const std::vector<double>& weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double r = next_unit(g) * total;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        r -= weights[i];
        if (r < 0.0) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
}

}  // namespace teamflow
