// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#pragma once

#include <cmath>
#include <string>

#include "pmmfp/rng.hpp"

namespace pmmfp {

// Error distribution for simulations and analytic moment lookups. Draws are
// always centred analytically (exact mean subtracted), never rescaled, so the
// skewness/kurtosis of the law are preserved.
struct ErrorLaw {
  enum class Kind {
    Gaussian,
    Beta,
    Gamma,
    Exponential,
    LogNormal,
    Uniform,
    Laplace,
    GeneralisedGaussian,  // shape 0.5, gamma-transform sampling
  };

  Kind kind = Kind::Gaussian;
  double p1 = 0.0;  // Beta alpha | Gamma shape | LogNormal sigma | Uniform a
  double p2 = 0.0;  // Beta beta  |             |                 | Uniform b

  static ErrorLaw gaussian() { return {Kind::Gaussian, 0.0, 0.0}; }
  static ErrorLaw beta(double alpha, double b) { return {Kind::Beta, alpha, b}; }
  static ErrorLaw gamma(double shape) { return {Kind::Gamma, shape, 0.0}; }
  static ErrorLaw exponential() { return {Kind::Exponential, 0.0, 0.0}; }
  static ErrorLaw log_normal(double sigma) { return {Kind::LogNormal, sigma, 0.0}; }
  static ErrorLaw uniform(double a, double b) { return {Kind::Uniform, a, b}; }
  static ErrorLaw laplace() { return {Kind::Laplace, 0.0, 0.0}; }
  static ErrorLaw generalised_gaussian_half() {
    return {Kind::GeneralisedGaussian, 0.5, 0.0};
  }

  double mean() const {
    switch (kind) {
      case Kind::Beta:        return p1 / (p1 + p2);
      case Kind::Gamma:       return p1;
      case Kind::Exponential: return 1.0;
      case Kind::LogNormal:   return std::exp(0.5 * p1 * p1);
      case Kind::Uniform:     return 0.5 * (p1 + p2);
      default:                return 0.0;
    }
  }

  double sample_centred(Rng& rng) const {
    switch (kind) {
      case Kind::Gaussian:    return rng.normal();
      case Kind::Beta:        return rng.beta(p1, p2) - mean();
      case Kind::Gamma:       return rng.gamma(p1) - mean();
      case Kind::Exponential: return rng.exponential() - 1.0;
      case Kind::LogNormal:   return std::exp(p1 * rng.normal()) - mean();
      case Kind::Uniform:     return rng.uniform(p1, p2) - mean();
      case Kind::Laplace:     return rng.laplace();
      case Kind::GeneralisedGaussian: {
        // Power-exponential family with density ~ exp(-|x|^p) where the
        // shape kappa maps to the exponent p = 2/(1+kappa): kappa = 0 is
        // Gaussian, kappa = 1 is Laplace, so kappa = 0.5 sits between them
        // (excess kurtosis about 1.2).  Gamma-transform sampling:
        // |X| = T^(1/p) with T ~ Gamma(1/p); symmetric sign keeps the mean
        // exactly zero.
        const double p = 2.0 / (1.0 + p1);
        const double t = rng.gamma(1.0 / p);
        const double s = rng.uniform01() < 0.5 ? -1.0 : 1.0;
        return s * std::pow(t, 1.0 / p);
      }
    }
    return 0.0;
  }

  std::string label() const {
    char buf[64];
    switch (kind) {
      case Kind::Gaussian:    return "gaussian";
      case Kind::Beta:
        std::snprintf(buf, sizeof(buf), "beta(%g,%g)", p1, p2);
        return buf;
      case Kind::Gamma:
        std::snprintf(buf, sizeof(buf), "gamma(%g)", p1);
        return buf;
      case Kind::Exponential: return "exponential(1)";
      case Kind::LogNormal:
        std::snprintf(buf, sizeof(buf), "lognormal(%g)", p1);
        return buf;
      case Kind::Uniform:
        std::snprintf(buf, sizeof(buf), "uniform(%g,%g)", p1, p2);
        return buf;
      case Kind::Laplace:     return "laplace";
      case Kind::GeneralisedGaussian: return "gen_gaussian(0.5)";
    }
    return "unknown";
  }
};

}  // namespace pmmfp
