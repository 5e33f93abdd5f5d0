#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace mbtm {

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits of one draw.
/// Used instead of std::uniform_real_distribution so that seeded runs
/// reproduce bit-identically across standard-library versions.
inline double uniform01(Rng& g) {
  return static_cast<double>(g() >> 11) * 0x1.0p-53;
}

inline bool chance(Rng& g, double p) { return uniform01(g) < p; }

/// Stream seed for sub-run `index` of a run seeded with `base` (splitmix64).
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Fisher-Yates shuffle driven by uniform01, for the same
/// cross-standard-library reproducibility as above.
template <typename T>
inline void deterministic_shuffle(Rng& g, std::vector<T>& v) {
  for (std::size_t i = v.size(); i > 1; --i) {
    auto j = static_cast<std::size_t>(uniform01(g) * static_cast<double>(i));
    if (j >= i) j = i - 1;
    std::swap(v[i - 1], v[j]);
  }
}

/// Calls visit(i) for each i in [0, n) independently with probability p,
/// consuming one draw per hit (geometric gaps) rather than one per index.
template <typename Visit>
inline void bernoulli_subset(Rng& g, std::size_t n, double p, Visit&& visit) {
  if (n == 0 || p <= 0.0) return;
  if (p >= 1.0) {
    for (std::size_t i = 0; i < n; ++i) visit(i);
    return;
  }
  const double denom = std::log1p(-p);
  std::size_t i = 0;
  while (true) {
    const double jump = std::floor(std::log1p(-uniform01(g)) / denom);
    if (jump >= static_cast<double>(n - i)) return;
    i += static_cast<std::size_t>(jump);
    visit(i);
    if (++i >= n) return;
  }
}

}  // namespace mbtm
