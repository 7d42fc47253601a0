// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pmmfp/estimators.hpp"

namespace pmmfp {

// n log(RSS/n) + k log(n). Raises PerfectFit when RSS <= 1e-12 * sum(y^2):
// the log is undefined and the candidate should be flagged, not scored.
double bic(const FitResult& fit, Eigen::Index n);

struct CandidateFit {
  FitResult fit;
  double bic = 0.0;         // meaningless when perfect_fit is set
  bool perfect_fit = false;
};

struct FailedCandidate {
  std::string block_label;
  std::string reason;
};

struct SelectionResult {
  std::vector<CandidateFit> candidates;  // enumeration order
  std::vector<int> ranking;              // indices into candidates, best first
  std::vector<FailedCandidate> failures;
  double offset = 0.0;  // domain shift applied before fitting

  const CandidateFit& best() const { return candidates[ranking.front()]; }
  // BIC gap between the runner-up and the winner; +inf when the winner is a
  // perfect fit or there is no runner-up.
  double delta_bic_runner_up() const;
};

struct SweepConfig {
  Track track = Track::PositiveOnly;
  EnumerationMode mode = EnumerationMode::SubsetsUpTo4;
  int max_terms = 4;
  EstimatorKind estimator = EstimatorKind::Pmm2Fp;
  SolverConfig solver;
  std::optional<double> offset;  // forced domain shift; default = automatic
};

// Fits every enumerated block (plus optional covariate columns) and ranks by
// BIC. The candidate set depends only on (track, mode, max_terms), never on
// the estimator. Perfect fits rank first, flagged. Failed candidates are
// recorded with reasons; AllCandidatesFailed if nothing survives.
SelectionResult sweep(const Vector& x, const Vector& y,
                      const Matrix* covariates, const SweepConfig& config,
                      const std::vector<std::string>* covariate_names = nullptr);

enum class SelectionAdvice { SingleBestOk, RecommendFma };

// Single-best reporting is defensible only when the runner-up BIC gap
// strictly exceeds 6.
SelectionAdvice report_single_best_rule(const SelectionResult& selection);

struct FmaResult {
  std::vector<int> candidate_indices;  // into selection.candidates, best first
  std::vector<double> weights;
  double theta = 0.0;
  double variance = 0.0;
  std::pair<double, double> ci95{0.0, 0.0};
};

// Estimand: (point estimate, its variance) extracted from one fitted model.
using Estimand = std::function<std::pair<double, double>(const FitResult&)>;

// Returns the estimand closure for the mean response at x_star; this is the
// supported cross-model target (coefficients are not comparable across
// blocks with different columns).
Estimand prediction_estimand(double x_star);

// Weights exp(-dBIC/2) over the top_j candidates, renormalised; the variance
// adds the between-model spread to the within-model variances.
FmaResult fma(const SelectionResult& selection, const Estimand& estimand,
              int top_j);

}  // namespace pmmfp
