#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace darrl {

// Every run owns one engine. The helpers below avoid the standard
// distributions so that draws are identical across standard libraries.
using Rng = std::mt19937_64;

inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n));
}

inline bool bernoulli(Rng& rng, double p) { return uniform01(rng) < p; }

}  // namespace darrl
