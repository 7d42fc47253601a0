// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#pragma once

#include <cmath>
#include <cstdint>

namespace pmmfp {

// Counter-based generator. Every output is a pure function of (key, counter),
// where the key is derived from up to four 64-bit words (seed, replicate id,
// cell tags...). Replicate streams are therefore independent of thread
// scheduling and of whether earlier replicates consumed more or fewer draws,
// which is what makes Monte Carlo and bootstrap runs reproducible at any
// thread count.
class Rng {
 public:
  explicit Rng(std::uint64_t k0, std::uint64_t k1 = 0, std::uint64_t k2 = 0,
               std::uint64_t k3 = 0) {
    std::uint64_t k = 0x243f6a8885a308d3ull;  // pi fraction, arbitrary non-zero
    k = mix(k, k0);
    k = mix(k, k1);
    k = mix(k, k2);
    k = mix(k, k3);
    key_ = k;
  }

  std::uint64_t next_u64() { return mix(key_, ++counter_); }

  // Uniform on the open interval (0,1); never returns 0 or 1, so log() and
  // inverse-CDF transforms are safe without extra guards.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  // Box-Muller, cosine branch only: exactly two uniforms per variate keeps the
  // draw count a pure function of the call sequence.
  double normal() {
    const double u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
  }

  double exponential() { return -std::log(uniform01()); }

  // Marsaglia-Tsang squeeze; handles any shape > 0 (unit scale).
  double gamma(double shape) {
    if (shape < 1.0) {
      const double u = uniform01();
      return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / (3.0 * std::sqrt(d));
    for (;;) {
      double x = normal();
      double v = 1.0 + c * x;
      if (v <= 0.0) continue;
      v = v * v * v;
      const double u = uniform01();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
  }

  double beta(double a, double b) {
    const double g1 = gamma(a);
    const double g2 = gamma(b);
    return g1 / (g1 + g2);
  }

  // Standard Laplace (scale 1, variance 2) via inverse CDF.
  double laplace() {
    const double u = uniform01();
    return u < 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u));
  }

 private:
  static std::uint64_t mix(std::uint64_t k, std::uint64_t c) {
    std::uint64_t z = k + 0x9e3779b97f4a7c15ull * (c + 0x632be59bd9b4e019ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  static constexpr double two_pi = 6.283185307179586476925286766559;

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace pmmfp
