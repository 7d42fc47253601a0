// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#include "pmmfp/score_formb.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "pmmfp/errors.hpp"

namespace pmmfp {

namespace {

constexpr double kConditionLimit = 1e8;

double sign(double x) { return x < 0.0 ? -1.0 : 1.0; }

}  // namespace

ScoreBasisFn::ScoreBasisFn(Parity par, double pow_) : parity(par), power(pow_) {
  if (parity == Parity::LogAbs) {
    power = 0.0;
    return;
  }
  if (power == 0.0 && parity == Parity::Odd)
    throw InvalidConfig("ScoreBasisFn: odd parity with power 0 is not admissible");
  if (power == 0.0)
    throw InvalidConfig("ScoreBasisFn: use the log function instead of power 0");
}

double ScoreBasisFn::eval(double xi) const {
  switch (parity) {
    case Parity::Even:   return std::pow(std::abs(xi), power);
    case Parity::Odd:    return sign(xi) * std::pow(std::abs(xi), power);
    case Parity::LogAbs: return std::log(std::abs(xi));
  }
  return 0.0;
}

double ScoreBasisFn::deriv(double xi) const {
  const double ax = std::abs(xi);
  switch (parity) {
    case Parity::Even:   return power * sign(xi) * std::pow(ax, power - 1.0);
    case Parity::Odd:    return power * std::pow(ax, power - 1.0);
    case Parity::LogAbs: return 1.0 / xi;
  }
  return 0.0;
}

std::string ScoreBasisFn::label() const {
  char buf[48];
  switch (parity) {
    case Parity::Even:
      std::snprintf(buf, sizeof(buf), "even:%g", power);
      return buf;
    case Parity::Odd:
      std::snprintf(buf, sizeof(buf), "odd:%g", power);
      return buf;
    case Parity::LogAbs:
      return "log";
  }
  return "?";
}

std::vector<ScoreBasisFn> default_basis(Track track) {
  std::vector<ScoreBasisFn> fns;
  const std::vector<double> positive = {0.5, 1.0, 2.0, 3.0};
  const std::vector<double> negative = {-2.0, -1.0, -0.5};

  if (track == Track::Full) {
    for (double p : negative) {
      fns.emplace_back(Parity::Odd, p);
      fns.emplace_back(Parity::Even, p);
    }
  }
  for (double p : positive) {
    fns.emplace_back(Parity::Odd, p);
    fns.emplace_back(Parity::Even, p);
  }
  fns.push_back(ScoreBasisFn::log_abs());
  return fns;
}

std::vector<ScoreBasisFn> basis_b2() {
  return {ScoreBasisFn(Parity::Odd, 1.0), ScoreBasisFn(Parity::Even, 2.0)};
}

CorrelantReport correlant_report(const Vector& residuals,
                                 const std::vector<ScoreBasisFn>& basis,
                                 std::optional<double> tau_opt) {
  const auto n = residuals.size();
  const auto K = static_cast<Eigen::Index>(basis.size());
  if (K < 1) throw InvalidConfig("correlant_report: empty basis");
  if (n < 5 * K || n < 8)
    throw TooFewObservations(
        "correlant_report: need at least 5 observations per basis function");
  if (!residuals.allFinite())
    throw InvalidConfig("correlant_report: non-finite residuals");

  // Standardise: xi = (e - mean)/sigma with 1/n moments. The quadratic form
  // below is computed on this scale, where Var(xi) = 1 exactly.
  const double mean = residuals.mean();
  Eigen::ArrayXd xi = residuals.array() - mean;
  const double sigma2 = xi.square().sum() / static_cast<double>(n);
  if (!(sigma2 > 0.0))
    throw DegenerateVariance("correlant_report: residual variance is zero");
  xi /= std::sqrt(sigma2);

  // Zero residuals break negative powers, the log, and the derivative of any
  // power below 1; detect before evaluating.
  bool has_negative_power = false;
  bool needs_nonzero = false;
  for (const auto& f : basis) {
    if (f.parity != Parity::LogAbs && f.power < 0.0) has_negative_power = true;
    if (f.parity == Parity::LogAbs || f.power < 1.0) needs_nonzero = true;
  }
  if (needs_nonzero && (xi == 0.0).any())
    throw ZeroResidual(
        "correlant_report: a residual is exactly zero where the basis (or its "
        "derivative) is singular");

  Matrix E(n, K);
  Matrix D(n, K);
  for (Eigen::Index j = 0; j < K; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      E(i, j) = basis[j].eval(xi(i));
      D(i, j) = basis[j].deriv(xi(i));
    }
  }
  if (!E.allFinite() || !D.allFinite())
    throw NonFiniteScore("correlant_report: basis evaluation overflowed");

  CorrelantReport rep;
  rep.basis = basis;

  Eigen::RowVectorXd col_means = E.colwise().mean();
  Matrix Ec = E.rowwise() - col_means;
  rep.F = (Ec.transpose() * Ec) / static_cast<double>(n);
  rep.F = 0.5 * (rep.F + rep.F.transpose());
  rep.b = -D.colwise().mean().transpose();

  rep.spectral = spectral_analyze(rep.F);

  const double default_tau = 1e-8 * rep.F.trace() / static_cast<double>(K);
  rep.tau = tau_opt.value_or(std::max(default_tau, 0.0));
  if (rep.tau < 0.0) throw InvalidConfig("correlant_report: negative tau");

  auto g_at = [&](double t) -> double {
    SymmetricSolve sol;
    try {
      sol = symmetric_solve(rep.F, rep.b, t);
    } catch (const SingularSystem&) {
      throw SingularCorrelant("correlant_report: correlant matrix is singular");
    }
    const double quad = rep.b.dot(sol.x);
    if (!(quad > 0.0)) return std::numeric_limits<double>::infinity();
    return 1.0 / quad;  // Var(xi) = 1 on the standardised scale
  };

  rep.g_hat = g_at(rep.tau);
  rep.g_hat_tau_tenth = g_at(rep.tau / 10.0);

  const double ratio = rep.g_hat / rep.g_hat_tau_tenth;
  rep.stable = !rep.spectral.condition_infinite &&
               rep.spectral.condition_number <= kConditionLimit &&
               std::isfinite(rep.g_hat) && std::isfinite(rep.g_hat_tau_tenth) &&
               ratio >= 0.9 && ratio <= 1.1;

  if (has_negative_power) {
    rep.inverse_moment.evaluated = true;
    const Eigen::ArrayXd inv_sq = xi.abs().square().inverse();
    rep.inverse_moment.mean_inv_sq = inv_sq.sum() / static_cast<double>(n);
    rep.inverse_moment.tail_fraction =
        static_cast<double>((xi.abs() < 0.01).count()) / static_cast<double>(n);
    rep.inverse_moment.admissible =
        !(rep.inverse_moment.mean_inv_sq > 100.0 ||
          rep.inverse_moment.tail_fraction > 0.005);
  }
  return rep;
}

SchurCheckResult schur_monotonicity_check(
    const Vector& residuals,
    const std::vector<std::vector<ScoreBasisFn>>& nested) {
  if (nested.size() < 2)
    throw InvalidConfig("schur_monotonicity_check: need at least two bases");

  for (std::size_t i = 0; i + 1 < nested.size(); ++i) {
    for (const auto& f : nested[i]) {
      if (std::find(nested[i + 1].begin(), nested[i + 1].end(), f) ==
          nested[i + 1].end())
        throw InvalidConfig(
            "schur_monotonicity_check: bases are not nested (missing " +
            f.label() + ")");
    }
  }

  SchurCheckResult out;
  for (const auto& basis : nested) {
    CorrelantReport rep = correlant_report(residuals, basis);
    if (!rep.stable)
      throw UnstableBasis(
          "schur_monotonicity_check: unstable basis, check skipped");
    out.g_values.push_back(rep.g_hat);
  }
  out.non_increasing = true;
  for (std::size_t i = 0; i + 1 < out.g_values.size(); ++i) {
    if (out.g_values[i + 1] > out.g_values[i] + 1e-6) out.non_increasing = false;
  }
  return out;
}

}  // namespace pmmfp
