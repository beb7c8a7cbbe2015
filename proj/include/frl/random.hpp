#pragma once

#include "frl/types.hpp"

#include <cstdint>
#include <random>

namespace frl {

// std::mt19937_64 output is fully specified by the standard; the helpers
// below map it to doubles/indices without the implementation-defined
// std::*_distribution classes, so seeded runs are byte-identical everywhere.
using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from the top 53 bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform index in [0, n).
inline Index uniform_index(Rng& rng, Index n) {
  return static_cast<Index>(uniform01(rng) * static_cast<double>(n));
}

/// splitmix64 finalizer, for counter-based streams.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline double hash01(std::uint64_t seed, std::uint64_t stream, std::uint64_t counter) {
  const std::uint64_t h = mix64(mix64(seed ^ mix64(stream)) ^ counter);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace frl
