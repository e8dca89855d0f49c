#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>

namespace latmoo::rng {

// All randomness flows through std::mt19937_64 (its output sequence is fixed
// by the standard) and the hand-rolled transforms below. Library
// distributions are avoided on purpose: their mapping from engine output to
// variates is implementation-defined, which would break cross-toolchain
// reproducibility of seeded runs.
using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Stateless hash of a seed plus up to three indices; used to derive
/// independent substreams and implicit lookup tables.
inline std::uint64_t hash_mix(std::uint64_t seed, std::uint64_t a = 0,
                              std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t s = seed;
    (void)splitmix64(s);
    s ^= a + 0x9E3779B97F4A7C15ULL;
    (void)splitmix64(s);
    s ^= b + 0xC2B2AE3D27D4EB4FULL;
    (void)splitmix64(s);
    s ^= c + 0x165667B19E3779F9ULL;
    return splitmix64(s);
}

/// Map 64 random bits to a double in [0, 1) with 53-bit resolution.
inline double unit_from_bits(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double uniform01(Engine& eng) { return unit_from_bits(eng()); }

inline double uniform_real(Engine& eng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(eng);
}

/// Unbiased integer in [0, n) via rejection sampling.
inline std::uint64_t uniform_below(Engine& eng, std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_below: n must be positive");
    const std::uint64_t rem = std::numeric_limits<std::uint64_t>::max() % n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - rem;
    for (;;) {
        const std::uint64_t v = eng();
        if (v <= limit) return v % n;
    }
}

inline std::size_t index_below(Engine& eng, std::size_t n) {
    return static_cast<std::size_t>(uniform_below(eng, n));
}

inline bool bernoulli(Engine& eng, double p) { return uniform01(eng) < p; }

/// Standard normal via Box-Muller (cosine branch only, two uniforms per draw).
inline double normal(Engine& eng) {
    const double u1 = 1.0 - uniform01(eng);  // (0, 1]
    const double u2 = uniform01(eng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
}

/// Gamma(alpha, 1) by Marsaglia-Tsang squeeze; alpha < 1 boosted via
/// Gamma(alpha+1) * U^(1/alpha).
inline double gamma_draw(Engine& eng, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("gamma_draw: alpha must be positive");
    if (alpha < 1.0) {
        const double u = 1.0 - uniform01(eng);
        return gamma_draw(eng, alpha + 1.0) * std::pow(u, 1.0 / alpha);
    }
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = normal(eng);
        double v = 1.0 + c * x;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = 1.0 - uniform01(eng);
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

inline double beta_draw(Engine& eng, double alpha, double beta) {
    const double ga = gamma_draw(eng, alpha);
    const double gb = gamma_draw(eng, beta);
    return ga / (ga + gb);
}

}  // namespace latmoo::rng
