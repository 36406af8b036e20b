#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace ecall {

// All randomness in the project flows through mt19937_64 plus the helpers
// below, so that a seed fully determines every run independent of the
// standard library's distribution implementations.
using Rng = std::mt19937_64;

// splitmix64 finalizer; used to derive independent per-item seeds so that
// parallel generation stays reproducible regardless of scheduling.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Uniform in [0, 1) with 53 random bits.
inline double rand_unit(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double rand_range(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * rand_unit(rng);
}

// Unbiased integer in [0, n) by rejection.
inline std::uint64_t rand_below(Rng& rng, std::uint64_t n) {
  const std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % n;
  std::uint64_t v;
  do {
    v = rng();
  } while (v >= limit);
  return v % n;
}

// Standard normal via Box-Muller.
inline double rand_normal(Rng& rng) {
  double u1;
  do {
    u1 = rand_unit(rng);
  } while (u1 <= 0.0);
  const double u2 = rand_unit(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

template <typename T>
void shuffle_in_place(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[rand_below(rng, i)]);
  }
}

// Identity permutation 0..n-1, then Fisher-Yates.
inline std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  shuffle_in_place(p, rng);
  return p;
}

}  // namespace ecall
