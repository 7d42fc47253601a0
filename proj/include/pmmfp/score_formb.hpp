// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pmmfp/fp_basis.hpp"
#include "pmmfp/linalg.hpp"

namespace pmmfp {

// Signed-parity score basis functions on standardised residuals:
//   Even:   |xi|^p          Odd:  sign(xi) |xi|^p       Log: log|xi|
// Odd with p = 0 would be sign(xi), which is not differentiable where it
// matters and is excluded at construction.
enum class Parity { Even, Odd, LogAbs };

struct ScoreBasisFn {
  Parity parity = Parity::Odd;
  double power = 1.0;  // ignored for LogAbs

  ScoreBasisFn(Parity par, double pow_);
  static ScoreBasisFn log_abs() { return ScoreBasisFn(Parity::LogAbs, 0.0); }

  double eval(double xi) const;
  double deriv(double xi) const;
  std::string label() const;

  friend bool operator==(const ScoreBasisFn& a, const ScoreBasisFn& b) {
    return a.parity == b.parity && (a.parity == Parity::LogAbs || a.power == b.power);
  }
};

// Documented default: positive track uses Odd/Even powers {0.5,1,2,3} plus
// Log (9 functions); the full track adds both parities for {-2,-1,-0.5}
// (15 functions).
std::vector<ScoreBasisFn> default_basis(Track track);

// The two-function basis {xi, xi^2} whose efficiency factor collapses to the
// closed form 1 - gamma3^2/(2+gamma4).
std::vector<ScoreBasisFn> basis_b2();

struct InverseMomentDiagnostic {
  bool evaluated = false;   // only when the basis contains negative powers
  double mean_inv_sq = 0.0; // mean |xi|^-2 on the standardised scale
  double tail_fraction = 0.0;  // fraction with |xi| < sigma/100
  bool admissible = true;
};

struct CorrelantReport {
  std::vector<ScoreBasisFn> basis;
  Matrix F;          // centred sample covariance (1/n) of basis evaluations
  Vector b;          // -mean of analytic derivatives
  double tau = 0.0;  // Tikhonov actually applied
  double g_hat = 0.0;
  double g_hat_tau_tenth = 0.0;  // same with tau/10, for the stability probe
  SpectralReport spectral;       // of F
  InverseMomentDiagnostic inverse_moment;
  bool stable = false;
};

// Efficiency diagnostic for an arbitrary score basis. Residuals are centred
// and scaled internally (xi = (e - mean)/sigma, 1/n moments); g_hat is
// 1 / (b^T (F + tau I)^{-1} b) on that standardised scale. Default tau is
// 1e-8 * trace(F)/K; pass 0 for the unregularised quadratic form.
//
// stable = condition(F) <= 1e8 and g(tau)/g(tau/10) within [0.9, 1.1].
CorrelantReport correlant_report(const Vector& residuals,
                                 const std::vector<ScoreBasisFn>& basis,
                                 std::optional<double> tau = {});

struct SchurCheckResult {
  std::vector<double> g_values;
  bool non_increasing = false;  // within 1e-6 slack
};

// g along a nested chain of bases must not increase. Bases must be nested
// (set inclusion); if any report is unstable the check raises UnstableBasis
// (the check is skipped, not failed).
SchurCheckResult schur_monotonicity_check(
    const Vector& residuals, const std::vector<std::vector<ScoreBasisFn>>& nested);

}  // namespace pmmfp
