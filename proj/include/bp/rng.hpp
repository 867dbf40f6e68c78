#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace bp {

// All sampling goes through std::mt19937_64 plus the explicit transforms
// below. The engine's bit stream is pinned by the standard; the standard's
// distribution objects are not, so they are avoided everywhere results have
// to be reproducible across platforms.

// Uniform double in [0, 1), 53 random mantissa bits.
inline double uniform01(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

// Splitmix64 finalizer over (seed, salt): decorrelates engine seeds derived
// from one user seed plus a trial or repeat counter.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

inline double uniform_in(std::mt19937_64& gen, double lo, double hi) {
    return lo + uniform01(gen) * (hi - lo);
}

// Standard normal via Box-Muller. One variate per call; the sine branch is
// discarded to keep the draw count independent of call context.
inline double standard_normal(std::mt19937_64& gen) {
    double u1 = uniform01(gen);
    while (u1 <= 0.0) u1 = uniform01(gen);
    double u2 = uniform01(gen);
    constexpr double two_pi = 6.283185307179586476925286766559;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace bp
