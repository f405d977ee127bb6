#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace lcn {

/// The engine is fully specified by the standard; the draws below avoid the
/// library-defined distributions so runs reproduce across toolchains.
using Rng = std::mt19937_64;

/// Uniform on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

/// Uniform on {0, ..., n - 1}; n must be positive.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
    // rejection sampling keeps the draw unbiased
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
}

}  // namespace lcn
