#pragma once

#include <cstdint>
#include <random>

namespace fracgraph {

// The library's generator. Fixed per release; determinism is per-binary.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent stream for replica `k` of a run seeded with `root`.
inline std::uint64_t split_seed(std::uint64_t root, std::uint64_t k) {
  return splitmix64(splitmix64(root) ^ splitmix64(k + 0x632BE59BD9B4E019ULL));
}

// Uniform in [0, 1) from the top 53 bits; avoids library-specific distributions.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace fracgraph
