#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "zyg/geometry.hpp"

namespace zyg {

/// SplitMix64 finalizer; used to derive independent per-item streams from (seed, key).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b) { return mix64(mix64(a) ^ (b + 0x632be59bd9b4e019ULL)); }

constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) { return mix64(mix64(a, b), c); }

/// Small counter-based generator. Cheap to construct, so every sample/node can own one.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  explicit StreamRng(std::uint64_t key) : state_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double normal() {
    std::normal_distribution<double> dist;
    return dist(*this);
  }

 private:
  std::uint64_t state_;
};

inline Point random_unit_vector(StreamRng& rng, std::size_t d) {
  if (d == 1) return Point{rng.uniform() < 0.5 ? -1.0 : 1.0};
  Point v(d);
  double n = 0.0;
  while (n < 1e-12) {
    for (auto& x : v) x = rng.normal();
    n = norm(v);
  }
  for (auto& x : v) x /= n;
  return v;
}

/// Uniform point in the ball of the given radius around the origin.
inline Point random_in_ball(StreamRng& rng, std::size_t d, double radius) {
  Point u = random_unit_vector(rng, d);
  const double s = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(d));
  for (auto& x : u) x *= s;
  return u;
}

/// Van der Corput radical inverse of i in the given base.
inline double radical_inverse(std::uint64_t i, unsigned base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

/// i-th Halton point in [0,1)^d (d <= 4).
inline Point halton(std::uint64_t i, std::size_t d) {
  static constexpr unsigned kPrimes[] = {2, 3, 5, 7};
  Point p(d);
  for (std::size_t k = 0; k < d; ++k) p[k] = radical_inverse(i + 1, kPrimes[k]);
  return p;
}

}  // namespace zyg
