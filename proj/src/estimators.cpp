// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#include "pmmfp/estimators.hpp"

#include <algorithm>
#include <cmath>

#include "pmmfp/errors.hpp"
#include "pmmfp/stats.hpp"

namespace pmmfp {

namespace {

constexpr double kPerfectFitRel = 1e-12;

double sup_norm(const Vector& v) { return v.cwiseAbs().maxCoeff(); }

Matrix xtx_inverse(const Matrix& X) {
  const auto k = X.cols();
  Matrix xtx = X.transpose() * X;
  return xtx.ldlt().solve(Matrix::Identity(k, k));
}

ResidualCumulants degenerate_cumulants(const Vector& residuals) {
  ResidualCumulants c;
  const double n = static_cast<double>(residuals.size());
  const double mean = residuals.mean();
  c.sigma2 = (residuals.array() - mean).square().sum() / n;
  c.gamma3 = 0.0;
  c.gamma4 = 0.0;
  c.a = 0.0;
  c.g2 = 1.0;
  c.degenerate = true;
  return c;
}

// Cumulants for a fit: flags instead of throwing so bootstrap and sweep loops
// survive perfect fits and constant-response draws.
ResidualCumulants fit_cumulants(const Vector& residuals, double rss,
                                double sum_y_sq) {
  if (rss <= kPerfectFitRel * sum_y_sq) return degenerate_cumulants(residuals);
  try {
    return sample_cumulants(residuals);
  } catch (const DegenerateVariance&) {
    return degenerate_cumulants(residuals);
  }
}

struct Ingredients {
  Vector beta;
  Vector residuals;
  double rss = 0.0;
  double sum_y_sq = 0.0;
  Matrix xtx_inv;
};

Ingredients ols_ingredients(const ModelFrame& f, const Vector& y) {
  const auto n = f.X.rows();
  const auto k = f.X.cols();
  if (y.size() != n)
    throw InvalidConfig("fit: response length does not match design rows");
  if (n <= k)
    throw TooFewObservations("fit: need more observations than parameters");
  if (n < 8) throw TooFewObservations("fit: need at least 8 observations");
  if (!y.allFinite()) throw InvalidConfig("fit: non-finite response");

  Ingredients ing;
  ing.beta = least_squares_solve(f.X, y);
  ing.residuals = y - f.X * ing.beta;
  ing.rss = ing.residuals.squaredNorm();
  ing.sum_y_sq = y.squaredNorm();
  ing.xtx_inv = xtx_inverse(f.X);
  return ing;
}

FitResult assemble(EstimatorKind kind, const ModelFrame& f, Ingredients ing,
                   ResidualCumulants cumulants, double error_var,
                   bool converged, int iterations, double used_ridge) {
  FitResult r{kind,
              f.block,
              std::move(ing.beta),
              std::move(ing.residuals),
              cumulants,
              Vector(),
              Matrix(),
              ing.rss,
              ing.sum_y_sq,
              converged,
              iterations,
              used_ridge,
              f.offset,
              f.labels,
              f.fp_columns};
  r.beta_cov = error_var * ing.xtx_inv;
  r.se_asymptotic = r.beta_cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  return r;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(tol > 0.0)) throw InvalidConfig("SolverConfig: tol must be positive");
  if (max_iter < 1) throw InvalidConfig("SolverConfig: max_iter must be >= 1");
  if (!(initial_damping > 0.0) || initial_damping > 1.0)
    throw InvalidConfig("SolverConfig: initial_damping must be in (0, 1]");
  if (!(min_damping > 0.0) || min_damping > initial_damping)
    throw InvalidConfig("SolverConfig: min_damping must be in (0, initial_damping]");
  if (ridge < 0.0) throw InvalidConfig("SolverConfig: ridge must be >= 0");
  if (!(huber_tuning > 0.0))
    throw InvalidConfig("SolverConfig: huber_tuning must be positive");
}

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::OlsFp:   return "ols";
    case EstimatorKind::Pmm2Fp:  return "pmm2";
    case EstimatorKind::HuberFp: return "huber";
  }
  return "unknown";
}

EstimatorKind estimator_from_name(const std::string& name) {
  if (name == "ols") return EstimatorKind::OlsFp;
  if (name == "pmm2") return EstimatorKind::Pmm2Fp;
  if (name == "huber") return EstimatorKind::HuberFp;
  throw InvalidConfig("unknown estimator '" + name + "' (expected ols|pmm2|huber)");
}

ModelFrame make_frame(const Vector& x, const FpBlock& block, double offset,
                      const Matrix* covariates,
                      const std::vector<std::string>* covariate_names) {
  Vector xs = x.array() + offset;
  DesignMatrix d = build_design(xs, block, offset);

  ModelFrame f{Matrix(), std::move(d.column_labels), block, offset,
               static_cast<int>(d.values.cols() - 1)};
  if (covariates == nullptr || covariates->cols() == 0) {
    f.X = std::move(d.values);
    return f;
  }

  if (covariates->rows() != x.size())
    throw InvalidConfig("make_frame: covariate rows do not match x");
  f.X.resize(x.size(), d.values.cols() + covariates->cols());
  f.X.leftCols(d.values.cols()) = d.values;
  f.X.rightCols(covariates->cols()) = *covariates;
  for (Eigen::Index j = 0; j < covariates->cols(); ++j) {
    f.labels.push_back(covariate_names && j < static_cast<Eigen::Index>(
                                                  covariate_names->size())
                           ? (*covariate_names)[j]
                           : "z" + std::to_string(j + 1));
  }
  return f;
}

FitResult fit_ols(const ModelFrame& frame, const Vector& y) {
  Ingredients ing = ols_ingredients(frame, y);
  ResidualCumulants cum = fit_cumulants(ing.residuals, ing.rss, ing.sum_y_sq);
  const double dof = static_cast<double>(frame.X.rows() - frame.X.cols());
  const double s2 = ing.rss / dof;
  return assemble(EstimatorKind::OlsFp, frame, std::move(ing), cum, s2,
                  /*converged=*/true, /*iterations=*/0, /*used_ridge=*/0.0);
}

FitResult fit_pmm2(const ModelFrame& frame, const Vector& y,
                   const SolverConfig& config) {
  config.validate();
  FitResult ols = fit_ols(frame, y);
  if (ols.cumulants.degenerate) {
    FitResult out = std::move(ols);
    out.estimator = EstimatorKind::Pmm2Fp;
    return out;
  }

  const Matrix& X = frame.X;
  const auto k = X.cols();

  ResidualCumulants cum = ols.cumulants;  // frozen unless re-estimation is on
  double sigma = std::sqrt(cum.sigma2);
  double a = cum.a;

  Vector beta = ols.beta;
  double used_ridge = 0.0;
  bool converged = false;
  int iterations = 0;

  auto standardised = [&](const Vector& b) -> Vector {
    Vector u = (y - X * b) / sigma;
    if (!u.allFinite())
      throw NonFiniteScore("fit_pmm2: non-finite standardised residuals");
    return u;
  };
  auto score_of = [&](const Vector& u) -> Vector {
    Vector s = u.array() - a * (u.array().square() - 1.0);
    return X.transpose() * s / sigma;
  };

  for (int t = 0; t < config.max_iter; ++t) {
    if (config.reestimate_cumulants && t > 0) {
      Vector e = y - X * beta;
      cum = fit_cumulants(e, e.squaredNorm(), ols.sum_y_sq);
      if (cum.degenerate) break;
      sigma = std::sqrt(cum.sigma2);
      a = cum.a;
    }

    Vector u = standardised(beta);
    Vector U = score_of(u);
    const double score_norm = U.norm();

    Vector w = 1.0 - 2.0 * a * u.array();
    Matrix H = X.transpose() * w.asDiagonal() * X / (sigma * sigma);
    H = 0.5 * (H + H.transpose());  // remove rounding asymmetry

    // Inner solve with ridge escalation.
    Vector delta;
    double tau = config.ridge;
    for (int attempt = 0;; ++attempt) {
      try {
        SymmetricSolve sol = symmetric_solve(H, U, tau);
        delta = std::move(sol.x);
        used_ridge = std::max(used_ridge, sol.used_ridge);
        break;
      } catch (const SingularSystem&) {
        if (attempt >= 3) throw;
        double base = std::abs(H.trace()) / static_cast<double>(k);
        if (!(base > 0.0)) base = 1.0;
        tau = tau == 0.0 ? 1e-6 * base : tau * 100.0;
      }
    }

    // Halve the damping until the score norm stops increasing; the floored
    // step is taken regardless so the iteration cannot stall in place.
    double lambda = config.initial_damping;
    Vector cand = beta + lambda * delta;
    while (lambda > config.min_damping &&
           score_of(standardised(cand)).norm() > score_norm) {
      lambda *= 0.5;
      cand = beta + lambda * delta;
    }

    const double step = sup_norm(cand - beta);
    beta = std::move(cand);
    iterations = t + 1;
    if (step < config.tol) {
      converged = true;
      break;
    }
  }

  Vector residuals = y - X * beta;
  const double rss = residuals.squaredNorm();
  FitResult out{EstimatorKind::Pmm2Fp,
                frame.block,
                std::move(beta),
                std::move(residuals),
                cum,
                Vector(),
                Matrix(),
                rss,
                ols.sum_y_sq,
                converged,
                iterations,
                used_ridge,
                frame.offset,
                frame.labels,
                frame.fp_columns};
  // Same (X^T X)^{-1} as OLS, scaled by g2: the standard-error identity
  // se_pmm = sqrt(g2) * se_ols holds exactly.
  out.beta_cov = cum.g2 * ols.beta_cov;
  out.se_asymptotic = std::sqrt(cum.g2) * ols.se_asymptotic;
  return out;
}

FitResult fit_huber(const ModelFrame& frame, const Vector& y,
                    const SolverConfig& config) {
  config.validate();
  FitResult ols = fit_ols(frame, y);
  if (ols.cumulants.degenerate) {
    FitResult out = std::move(ols);
    out.estimator = EstimatorKind::HuberFp;
    return out;
  }

  const Matrix& X = frame.X;
  const auto n = X.rows();
  const auto k = X.cols();
  const double tune = config.huber_tuning;

  Vector beta = ols.beta;
  bool converged = false;
  int iterations = 0;
  double scale = 0.0;

  auto mad_scale = [&](const Vector& r) -> double {
    std::vector<double> v(r.data(), r.data() + r.size());
    const double med = stats::median(v);
    for (double& x : v) x = std::abs(x - med);
    double s = 1.4826 * stats::median(std::move(v));
    if (!(s > 0.0)) s = std::sqrt(r.squaredNorm() / static_cast<double>(n));
    return s;
  };

  for (int t = 0; t < config.max_iter; ++t) {
    Vector r = y - X * beta;
    scale = mad_scale(r);
    if (!(scale > 0.0)) break;  // all residuals zero: OLS already perfect

    Vector w(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double au = std::abs(r(i) / scale);
      w(i) = au <= tune ? 1.0 : tune / au;
    }
    Vector sw = w.cwiseSqrt();
    Matrix Xw = sw.asDiagonal() * X;
    Vector yw = sw.asDiagonal() * y;
    Vector beta_new = least_squares_solve(Xw, yw);

    const double step = sup_norm(beta_new - beta);
    beta = std::move(beta_new);
    iterations = t + 1;
    if (step < config.tol) {
      converged = true;
      break;
    }
  }

  Vector residuals = y - X * beta;
  const double rss = residuals.squaredNorm();
  ResidualCumulants cum = fit_cumulants(residuals, rss, ols.sum_y_sq);

  // Classical M-estimator variance under symmetric errors:
  // s^2 * E[psi^2] / E[psi']^2 * (X^T X)^{-1} with a small-sample dof factor.
  double v = 0.0;
  if (scale > 0.0) {
    double sum_psi2 = 0.0;
    double sum_dpsi = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = residuals(i) / scale;
      const double psi = std::clamp(u, -tune, tune);
      sum_psi2 += psi * psi;
      sum_dpsi += std::abs(u) <= tune ? 1.0 : 0.0;
    }
    const double mean_dpsi = sum_dpsi / static_cast<double>(n);
    if (mean_dpsi > 0.0)
      v = scale * scale * (sum_psi2 / static_cast<double>(n - k)) /
          (mean_dpsi * mean_dpsi);
  }

  FitResult out{EstimatorKind::HuberFp,
                frame.block,
                std::move(beta),
                std::move(residuals),
                cum,
                Vector(),
                Matrix(),
                rss,
                ols.sum_y_sq,
                converged,
                iterations,
                0.0,
                frame.offset,
                frame.labels,
                frame.fp_columns};
  out.beta_cov = v * xtx_inverse(X);
  out.se_asymptotic = out.beta_cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  return out;
}

FitResult fit_with(EstimatorKind kind, const ModelFrame& frame, const Vector& y,
                   const SolverConfig& config) {
  switch (kind) {
    case EstimatorKind::OlsFp:   return fit_ols(frame, y);
    case EstimatorKind::Pmm2Fp:  return fit_pmm2(frame, y, config);
    case EstimatorKind::HuberFp: return fit_huber(frame, y, config);
  }
  throw InvalidConfig("fit_with: unknown estimator");
}

double predict_mean(const FitResult& fit, double x_star) {
  return predict_mean_var(fit, x_star).first;
}

std::pair<double, double> predict_mean_var(const FitResult& fit, double x_star) {
  const double xs = x_star + fit.applied_offset;
  if (!(xs > 0.0))
    throw NonPositiveInput("predict_mean: x_star not positive after the fit's offset");

  Vector x1(1);
  x1(0) = xs;
  DesignMatrix d = build_design(x1, fit.block);
  const auto m = d.values.cols();  // 1 + fp columns; covariates held at zero

  Vector z = Vector::Zero(fit.k());
  z.head(m) = d.values.row(0).transpose();
  const double mu = z.dot(fit.beta);
  const double var = z.dot(fit.beta_cov * z);
  return {mu, std::max(var, 0.0)};
}

}  // namespace pmmfp
