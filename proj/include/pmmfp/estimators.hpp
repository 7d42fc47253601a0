// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pmmfp/fp_basis.hpp"
#include "pmmfp/moments.hpp"

namespace pmmfp {

enum class EstimatorKind { OlsFp, Pmm2Fp, HuberFp };

std::string estimator_name(EstimatorKind kind);
EstimatorKind estimator_from_name(const std::string& name);

struct SolverConfig {
  double tol = 1e-8;            // sup-norm of the coefficient step
  int max_iter = 50;
  double initial_damping = 1.0; // reset each outer iteration
  double min_damping = 1.0 / 64.0;
  double ridge = 0.0;           // inner-solve Tikhonov; auto-escalated on failure
  bool reestimate_cumulants = false;  // refresh a, sigma each iteration (off by
                                      // default: they stay frozen at the OLS
                                      // initialisation)
  double huber_tuning = 1.345;

  void validate() const;
};

// Design matrix plus the context needed to interpret it: which block built
// the fp columns, what domain offset was applied, and where covariate
// columns start.
struct ModelFrame {
  Matrix X;  // intercept | fp columns | covariates
  std::vector<std::string> labels;
  FpBlock block;
  double offset = 0.0;
  int fp_columns = 0;
};

// Builds intercept + fp columns from x (shifted by `offset` internally),
// appending plain covariate columns when supplied.
ModelFrame make_frame(const Vector& x, const FpBlock& block, double offset = 0.0,
                      const Matrix* covariates = nullptr,
                      const std::vector<std::string>* covariate_names = nullptr);

struct FitResult {
  EstimatorKind estimator;
  FpBlock block;
  Vector beta;
  Vector residuals;
  // Cumulants that parameterise the fit: the estimator's own residual
  // cumulants for OLS/Huber; for the second-order fit these are the frozen
  // OLS-initialisation cumulants that define the score and g2 (and hence the
  // reported standard errors).
  ResidualCumulants cumulants;
  Vector se_asymptotic;
  Matrix beta_cov;
  double rss = 0.0;
  double sum_y_sq = 0.0;
  bool converged = true;
  int iterations = 0;
  double used_ridge = 0.0;
  double applied_offset = 0.0;
  std::vector<std::string> column_labels;
  int fp_columns = 0;

  Eigen::Index n() const { return residuals.size(); }
  Eigen::Index k() const { return beta.size(); }
};

// Ordinary least squares. sigma^2 for the standard errors uses rss/(n-k).
FitResult fit_ols(const ModelFrame& frame, const Vector& y);

// Second-order polynomial-score estimator: damped Newton on the estimating
// equation sum_i psi2(u_i) x_i = 0 with u = (y - X beta)/sigma and
// psi2(u) = u - a (u^2 - 1), a and sigma frozen from the OLS initialisation.
// Standard errors are sqrt(g2) times the OLS ones by construction.
FitResult fit_pmm2(const ModelFrame& frame, const Vector& y,
                   const SolverConfig& config = {});

// Huber M-estimator via IRLS, MAD-based scale re-estimated every sweep.
FitResult fit_huber(const ModelFrame& frame, const Vector& y,
                    const SolverConfig& config = {});

FitResult fit_with(EstimatorKind kind, const ModelFrame& frame, const Vector& y,
                   const SolverConfig& config = {});

// Mean response at x_star (original domain; the fit's offset is re-applied).
// Covariates, if any, are held at zero.
double predict_mean(const FitResult& fit, double x_star);

// (mu_hat, Var(mu_hat)) at x_star from the fit's coefficient covariance.
std::pair<double, double> predict_mean_var(const FitResult& fit, double x_star);

// The second-order score, exposed for testing.
inline double psi2(double u, double a) { return u - a * (u * u - 1.0); }

}  // namespace pmmfp
