#pragma once

// Seeded random draws. The engine is std::mt19937_64, whose output sequence is
// fixed by the C++ standard; the draw helpers below avoid the standard
// distributions because their algorithms are implementation-defined.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace rht {

using Rng = std::mt19937_64;

inline constexpr std::string_view kRngAlgorithm = "mt19937_64";

/// Uniform index in [0, n) by Lemire's multiply-shift with rejection (unbiased).
inline std::size_t draw_index(Rng& rng, std::size_t n) {
  const std::uint64_t range = n;
  unsigned __int128 product = static_cast<unsigned __int128>(rng()) * range;
  auto low = static_cast<std::uint64_t>(product);
  if (low < range) {
    const std::uint64_t floor = (0 - range) % range;
    while (low < floor) {
      product = static_cast<unsigned __int128>(rng()) * range;
      low = static_cast<std::uint64_t>(product);
    }
  }
  return static_cast<std::size_t>(product >> 64);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double draw_unit(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double draw_uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * draw_unit(rng); }

} // namespace rht
