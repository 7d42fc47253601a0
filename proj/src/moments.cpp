// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#include "pmmfp/moments.hpp"

#include <cmath>

#include "pmmfp/errors.hpp"

namespace pmmfp {

namespace {

constexpr double kG2Floor = 1e-6;
constexpr double kTinyDenom = 1e-12;

// a and g2 from raw gamma3/gamma4 with the degraded-sample clamp.
void finish(ResidualCumulants* c) {
  const double denom = 2.0 + c->gamma4;
  if (denom <= kTinyDenom) {
    // Only reachable for (near-)two-point samples. Symmetric ones have
    // gamma3 = 0 and a well-defined g2 = 1; anything else is degraded.
    if (std::abs(c->gamma3) <= 1e-8) {
      c->a = 0.0;
      c->g2 = 1.0;
    } else {
      c->a = 0.0;
      c->g2 = kG2Floor;
      c->degraded = true;
    }
    return;
  }
  c->a = c->gamma3 / denom;
  const double g2 = 1.0 - c->gamma3 * c->gamma3 / denom;
  if (g2 < kG2Floor) {
    c->g2 = kG2Floor;
    c->degraded = true;
  } else {
    c->g2 = g2;
  }
}

}  // namespace

ResidualCumulants sample_cumulants(const Vector& residuals) {
  const auto n = residuals.size();
  if (n < 8)
    throw TooFewObservations("sample_cumulants: need at least 8 observations");
  if (!residuals.allFinite())
    throw InvalidConfig("sample_cumulants: non-finite residuals");

  const double mean = residuals.mean();
  const Eigen::ArrayXd d = residuals.array() - mean;
  const double inv_n = 1.0 / static_cast<double>(n);
  const double m2 = d.square().sum() * inv_n;
  if (!(m2 > 0.0))
    throw DegenerateVariance("sample_cumulants: residual variance is zero");

  const double m3 = d.cube().sum() * inv_n;
  const double m4 = d.square().square().sum() * inv_n;

  ResidualCumulants c;
  c.sigma2 = m2;
  c.gamma3 = m3 / std::pow(m2, 1.5);
  c.gamma4 = m4 / (m2 * m2) - 3.0;
  finish(&c);
  return c;
}

double g2_closed_form(double gamma3, double gamma4) {
  const double denom = 2.0 + gamma4;
  if (denom <= 0.0)
    throw InvalidKurtosis("g2_closed_form: 2 + gamma4 must be positive");
  return 1.0 - gamma3 * gamma3 / denom;
}

ResidualCumulants analytic_cumulants(const ErrorLaw& law) {
  ResidualCumulants c;
  using Kind = ErrorLaw::Kind;
  switch (law.kind) {
    case Kind::Gaussian:
      c.sigma2 = 1.0;
      c.gamma3 = 0.0;
      c.gamma4 = 0.0;
      break;
    case Kind::Beta: {
      const double a = law.p1, b = law.p2;
      if (!(a > 0.0) || !(b > 0.0))
        throw UnsupportedLaw("analytic_cumulants: beta parameters must be positive");
      const double s = a + b;
      c.sigma2 = a * b / (s * s * (s + 1.0));
      c.gamma3 = 2.0 * (b - a) * std::sqrt(s + 1.0) / ((s + 2.0) * std::sqrt(a * b));
      c.gamma4 = 6.0 * ((a - b) * (a - b) * (s + 1.0) - a * b * (s + 2.0)) /
                 (a * b * (s + 2.0) * (s + 3.0));
      break;
    }
    case Kind::Gamma: {
      const double k = law.p1;
      if (!(k > 0.0))
        throw UnsupportedLaw("analytic_cumulants: gamma shape must be positive");
      c.sigma2 = k;
      c.gamma3 = 2.0 / std::sqrt(k);
      c.gamma4 = 6.0 / k;
      break;
    }
    case Kind::Exponential:
      c.sigma2 = 1.0;
      c.gamma3 = 2.0;
      c.gamma4 = 6.0;
      break;
    case Kind::LogNormal: {
      const double s2 = law.p1 * law.p1;
      if (!(s2 > 0.0))
        throw UnsupportedLaw("analytic_cumulants: lognormal sigma must be positive");
      const double w = std::exp(s2);
      c.sigma2 = (w - 1.0) * w;  // mu = 0
      c.gamma3 = (w + 2.0) * std::sqrt(w - 1.0);
      c.gamma4 = w * w * w * w + 2.0 * w * w * w + 3.0 * w * w - 6.0;
      break;
    }
    case Kind::Uniform: {
      const double r = law.p2 - law.p1;
      if (!(r > 0.0))
        throw UnsupportedLaw("analytic_cumulants: uniform needs a < b");
      c.sigma2 = r * r / 12.0;
      c.gamma3 = 0.0;
      c.gamma4 = -1.2;
      break;
    }
    case Kind::Laplace:
      c.sigma2 = 2.0;
      c.gamma3 = 0.0;
      c.gamma4 = 3.0;
      break;
    case Kind::GeneralisedGaussian:
      throw UnsupportedLaw(
          "analytic_cumulants: generalised Gaussian moments are not tabulated; "
          "use sample cumulants");
  }
  finish(&c);
  return c;
}

}  // namespace pmmfp
