#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

// Small deterministic sampling helpers. std::<distribution> sequences are
// implementation-defined, so everything that must replay bit-for-bit across
// toolchains draws through these instead.
namespace ancmm::rng {

using Engine = std::mt19937_64;

inline double uniform01(Engine& g) {
    return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline double uniform(Engine& g, double lo, double hi) {
    return lo + (hi - lo) * uniform01(g);
}

// Box-Muller; one value per call, two raw draws.
inline double normal(Engine& g) {
    const double u1 = 1.0 - uniform01(g);  // (0, 1]
    const double u2 = uniform01(g);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

inline std::size_t uniform_index(Engine& g, std::size_t n) {
    return static_cast<std::size_t>(g() % n);
}

}  // namespace ancmm::rng
