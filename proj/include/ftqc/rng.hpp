#pragma once

// Deterministic RNG streams. Trials get independent streams derived from
// (seed, trial index) by splitmix64 hashing, so results do not depend on
// worker count or trial order.

#include <cstdint>
#include <random>

namespace ftqc {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

inline std::mt19937_64 make_rng(uint64_t seed, uint64_t stream = 0) {
    uint64_t s = splitmix64(seed ^ splitmix64(stream + 0x51ull));
    return std::mt19937_64(s);
}

// Geometric gap sampling: number of Bernoulli(p) failures before the next
// success. Lets fault sampling touch only faulty locations.
inline uint64_t geometric_skip(std::mt19937_64& rng, double p) {
    if (p >= 1.0) return 0;
    if (p <= 0.0) return ~0ull;
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    if (u <= 0.0) u = 1e-300;
    double g = std::log(u) / std::log1p(-p);
    if (g >= 9e18) return ~0ull;
    return uint64_t(g);
}

}  // namespace ftqc
