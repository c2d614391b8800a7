#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace raswtg::rng {

using Engine = std::mt19937_64;

/// Uniform double in [lo, hi]. Avoids std::uniform_real_distribution so the
/// stream is identical across standard library implementations.
inline double uniform_real(Engine& eng, double lo, double hi) {
  const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
  return lo + (hi - lo) * u;
}

/// Uniform integer in [0, n). Unbiased rejection sampling.
inline std::uint64_t below(Engine& eng, std::uint64_t n) {
  if (n <= 1) return 0;
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v = eng();
  while (v >= limit) v = eng();
  return v % n;
}

inline int uniform_int(Engine& eng, int lo, int hi) {  // inclusive bounds
  return lo + static_cast<int>(below(eng, static_cast<std::uint64_t>(hi - lo + 1)));
}

/// k distinct indices from {0,..,n-1}, uniformly among all k-subsets.
inline std::vector<int> sample_indices(Engine& eng, int n, int k) {
  std::vector<int> pool(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  for (int i = 0; i < k; ++i) {
    const int r = i + static_cast<int>(below(eng, static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(r)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

}  // namespace raswtg::rng
