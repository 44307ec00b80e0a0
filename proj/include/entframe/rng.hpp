#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "entframe/utf8.hpp"

// Deterministic randomness. std::shuffle and std::uniform_int_distribution
// are implementation-defined, so every seeded behavior in this library draws
// through the helpers below: same seed, same sequence, on every platform.

namespace entframe {

using Rng = std::mt19937_64;

// Uniform draw from [0, n) by rejection sampling on the raw 64-bit stream.
inline std::uint64_t rng_below(Rng& rng, std::uint64_t n) {
    if (n == 0) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t draw;
    do {
        draw = rng();
    } while (draw >= limit);
    return draw % n;
}

// Fisher-Yates with rng_below, so the permutation is seed-stable.
template <typename T>
inline void deterministic_shuffle(std::vector<T>& items, Rng& rng) {
    if (items.size() < 2) return;
    for (std::size_t i = items.size() - 1; i > 0; --i) {
        std::size_t j = static_cast<std::size_t>(rng_below(rng, i + 1));
        std::swap(items[i], items[j]);
    }
}

inline double rng_unit(Rng& rng) {
    // 53 random bits -> [0, 1) with full double precision.
    return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

// Independent, reproducible stream for a named purpose under one seed.
inline Rng make_rng(std::uint64_t seed, const std::string& stream = "") {
    if (stream.empty()) return Rng(seed);
    return Rng(seed ^ fnv1a64(stream));
}

} // namespace entframe
