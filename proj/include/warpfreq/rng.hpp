// warpfreq/rng.hpp
//
// Copyright 2026 the warpfreq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef WARPFREQ_RNG_HPP
#define WARPFREQ_RNG_HPP

#include <cstdint>
#include <random>

#include "warpfreq/linalg.hpp"

namespace warpfreq {

/// Seeded uniform generator. Draws are derived from the raw mt19937_64
/// stream directly (not through distribution objects) so that a given seed
/// reproduces the same values everywhere.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform01() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  Vec uniform_vec(int d, double lo, double hi) {
    Vec v(static_cast<std::size_t>(d));
    for (auto& x : v) x = uniform(lo, hi);
    return v;
  }

  /// Standard normal via Box-Muller (deterministic two-draw form).
  double normal() {
    double u1 = uniform01();
    while (u1 <= 1e-300) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

 private:
  std::mt19937_64 gen_;
};

/// Halton sequence point (index i >= 0) in [0,1)^d, bases 2,3,5,7,...
inline Vec halton_point(std::size_t i, int d) {
  static constexpr int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};
  Vec v(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) {
    const int b = primes[k % 10];
    double f = 1.0, r = 0.0;
    std::size_t n = i + 1;
    while (n > 0) {
      f /= b;
      r += f * static_cast<double>(n % b);
      n /= b;
    }
    v[k] = r;
  }
  return v;
}

}  // namespace warpfreq

#endif  // WARPFREQ_RNG_HPP
