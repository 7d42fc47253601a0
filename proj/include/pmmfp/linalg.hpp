// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#pragma once

#include <Eigen/Dense>
#include <vector>

namespace pmmfp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct SpectralReport {
  std::vector<double> singular_values;  // descending
  double condition_number = 1.0;        // sigma_max / sigma_min
  bool condition_infinite = false;      // sigma_min is numerically zero
};

// Least squares via rank-revealing orthogonal decomposition (never normal
// equations). Rank is judged from the singular values of the triangular
// factor: deficient when sigma_min <= 1e-10 * sigma_max.
//
// Throws TooFewObservations (rows < cols) and RankDeficient.
Vector least_squares_solve(const Matrix& X, const Vector& y);

struct SymmetricSolve {
  Vector x;
  double used_ridge = 0.0;
};

// Solves (A + ridge*I) x = b for symmetric A by Cholesky. If the
// factorisation fails at ridge = 0 the solve is retried once with
// ridge = 1e-8 * trace(A)/dim, and the ridge actually used is reported.
//
// Throws NotSymmetric (pre-check, 1e-10 relative) and SingularSystem when
// even the ridged factorisation fails.
SymmetricSolve symmetric_solve(const Matrix& A, const Vector& b,
                               double ridge = 0.0);

// Full singular value spectrum plus condition diagnostics.
SpectralReport spectral_analyze(const Matrix& A);

}  // namespace pmmfp
