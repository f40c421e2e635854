#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace ctql {

/// Deterministic counter-based generator (splitmix64). The state is a plain
/// counter advanced by a fixed odd constant; every output is a finalizer hash
/// of the counter. State is passed explicitly everywhere, so call sites stay
/// pure and independent streams can be derived by hashing a tag into the seed.
struct RngState {
  std::uint64_t state = 0;
};

inline RngState make_rng(std::uint64_t seed) { return RngState{seed}; }

inline std::uint64_t next_u64(RngState& rng) {
  rng.state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = rng.state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Independent stream derived from (seed, tag). Streams with distinct tags do
/// not overlap in practice because the starting counter is a hash of both.
inline RngState rng_stream(std::uint64_t seed, std::uint64_t tag) {
  RngState t{seed + 0xD1B54A32D192ED03ull * (tag + 1)};
  return RngState{next_u64(t)};
}

/// Uniform on [0, 1), 53-bit resolution.
inline double uniform01(RngState& rng) {
  return static_cast<double>(next_u64(rng) >> 11) * 0x1.0p-53;
}

inline double uniform(RngState& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

/// Standard normal via Box-Muller; consumes exactly two draws per call.
inline double normal(RngState& rng) {
  double u1 = 1.0 - uniform01(rng);  // (0, 1], keeps the log finite
  double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

/// Uniform direction on the unit sphere in R^m (normalized Gaussian vector).
inline std::vector<double> unit_sphere(RngState& rng, int m) {
  std::vector<double> d(static_cast<std::size_t>(m));
  for (;;) {
    double norm2 = 0.0;
    for (int i = 0; i < m; ++i) {
      d[static_cast<std::size_t>(i)] = normal(rng);
      norm2 += d[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(i)];
    }
    if (norm2 > 1e-24) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (double& v : d) v *= inv;
      return d;
    }
  }
}

// Stream tags used across the library so one user seed never feeds two
// different purposes with the same counter sequence.
namespace stream_tag {
inline constexpr std::uint64_t env_matrices = 1;
inline constexpr std::uint64_t net_init = 2;
inline constexpr std::uint64_t training = 3;
inline constexpr std::uint64_t bellman_probes = 4;
inline constexpr std::uint64_t eval_start = 5;
inline constexpr std::uint64_t eval_base = 1ull << 32;     // + iteration
inline constexpr std::uint64_t bellman_base = 2ull << 32;  // + iteration
}  // namespace stream_tag

}  // namespace ctql
