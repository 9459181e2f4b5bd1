#pragma once

#include <cstdint>
#include <random>

#include "core/bytes.hpp"

namespace suarp::core {

// All simulation randomness flows through one seeded engine so that a
// (scenario, seed) pair replays byte-identically.
using Rng = std::mt19937_64;

inline Bytes random_bytes(Rng& rng, std::size_t n) {
  Bytes out(n);
  std::size_t i = 0;
  while (i < n) {
    std::uint64_t v = rng();
    for (int b = 0; b < 8 && i < n; ++b, ++i)
      out[i] = static_cast<std::uint8_t>(v >> (8 * b));
  }
  return out;
}

/// Uniform draw in [0, 1); used by the loss model.
inline double random_unit(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

}  // namespace suarp::core
