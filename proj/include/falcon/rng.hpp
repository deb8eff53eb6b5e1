#pragma once

// Deterministic randomness utilities.
//
// Every run owns independent generator streams whose seeds are derived from
// the run seed with SplitMix64, so re-running a config with the same seed
// reproduces the byte-identical sampling path regardless of how many streams
// a component consumes.

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>

namespace falcon {

// One step of the SplitMix64 generator (public-domain constants).
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seed for sub-stream `stream` of a run seeded with `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t state = seed;
    std::uint64_t out = 0;
    for (std::uint64_t i = 0; i <= stream; ++i) out = splitmix64_next(state);
    return out;
}

// Uniform double in [0, 1) using the top 53 bits of one generator draw.
// Avoids std::uniform_real_distribution so the mapping is pinned down exactly.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Inverse-CDF sample from a probability vector: smallest index a with
// u < probs[0] + ... + probs[a]. Falls back to the last index so that
// u values within rounding slack of 1 remain valid.
inline int sample_index(std::span<const double> probs, double u) {
    if (probs.empty()) throw std::invalid_argument("sample_index: empty distribution");
    double acc = 0.0;
    for (std::size_t a = 0; a < probs.size(); ++a) {
        acc += probs[a];
        if (u < acc) return static_cast<int>(a);
    }
    return static_cast<int>(probs.size()) - 1;
}

}  // namespace falcon
