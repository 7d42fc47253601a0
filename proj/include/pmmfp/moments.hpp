// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#pragma once

#include "pmmfp/error_law.hpp"
#include "pmmfp/linalg.hpp"

namespace pmmfp {

// Central-moment summary of a residual vector, plus the second-order score
// coefficient a = gamma3/(2+gamma4) and the variance-reduction factor
// g2 = 1 - gamma3^2/(2+gamma4).
//
// Moments use the 1/n convention (no bias correction); gamma3 and gamma4 are
// the standardised skewness and excess kurtosis.
struct ResidualCumulants {
  double sigma2 = 0.0;
  double gamma3 = 0.0;
  double gamma4 = 0.0;
  double a = 0.0;
  double g2 = 1.0;
  bool degraded = false;    // g2 clamped at the floor (gamma3^2 >= 2+gamma4)
  bool degenerate = false;  // variance numerically zero (perfect fit path)
};

// Requires n >= 8 mean-centred (or near-centred: the mean is removed again
// internally) residuals with positive variance. When the empirical moments
// land in the region gamma3^2 >= 2+gamma4 — impossible for exact moments of a
// nondegenerate law but reachable in small samples — g2 is clamped to 1e-6
// and the degraded flag is set rather than erroring, so resampling loops
// survive pathological draws.
ResidualCumulants sample_cumulants(const Vector& residuals);

// The closed form 1 - gamma3^2/(2+gamma4). Throws InvalidKurtosis when
// 2 + gamma4 <= 0. No clamping here: this is the raw identity.
double g2_closed_form(double gamma3, double gamma4);

// Exact cumulants (and derived a, g2) for the supported laws. The
// generalised Gaussian has no closed-form entry here and raises
// UnsupportedLaw.
ResidualCumulants analytic_cumulants(const ErrorLaw& law);

}  // namespace pmmfp
