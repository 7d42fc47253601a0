// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pmmfp/error_law.hpp"
#include "pmmfp/estimators.hpp"
#include "pmmfp/fp_basis.hpp"
#include "pmmfp/linalg.hpp"

namespace pmmfp {

// Shared layout of a Monte Carlo study: a single true model
//   y = beta0 + beta1 * x^0.5 + error
// with the covariate drawn once per replicate and errors drawn from an
// interchangeable list of laws.  Every (law, n, replicate) cell owns an
// independent counter stream, so results do not depend on scheduling.
struct McDesign {
  std::vector<ErrorLaw> laws;
  std::vector<int> n_grid{500};
  int replications = 300;  // at least 50; the symmetric study wants >= 500

  FpBlock true_block{FpBlock::from_powers({0.5}, Track::PositiveOnly)};
  Vector true_beta;  // intercept first; defaults to (1, 2)
  double x_min = 0.5;
  double x_max = 5.0;
  double x_star = 2.0;
  std::uint64_t seed = 1;
  int threads = 1;

  McDesign();
  void validate() const;
};

struct Dataset {
  Vector x;
  Vector y;
};

// Draws one replicate for a design cell.  The error is centred so the
// intercept stays interpretable across laws.
Dataset sample_dgp(const McDesign& design, const ErrorLaw& law, int n,
                   int replicate);

// --- Matched-basis study -------------------------------------------------
//
// Both estimators are handed the true basis, so any spread difference is
// attributable to the estimating equations rather than selection.

struct MatchedCell {
  std::string law;
  int n = 0;
  int replications = 0;
  int usable = 0;

  // Slope summaries (coefficient on the true fractional term).
  double slope_bias_ols = 0.0;
  double slope_bias_pmm = 0.0;
  double slope_var_ols = 0.0;
  double slope_var_pmm = 0.0;
  double slope_mse_ols = 0.0;
  double slope_mse_pmm = 0.0;

  // Robust variance-reduction estimate and its plain-variance cousin.
  double g2_robust = 0.0;      // [IQR(pmm)/IQR(ols)]^2
  double g2_variance = 0.0;    // var(pmm)/var(ols)
  double g2_analytic = 0.0;    // from the law's cumulants, NaN if unavailable
  double reduction_pct = 0.0;  // 100 * (1 - g2_robust)

  // Coverage of nominal 95% intervals for the slope.
  double coverage_ols = 0.0;
  double coverage_pmm = 0.0;

  // Prediction at x_star: robust spread ratio plus plain MSEs.
  double pred_mse_ols = 0.0;
  double pred_mse_pmm = 0.0;
  double pred_efficiency = 0.0;  // [IQR(pred_pmm)/IQR(pred_ols)]^2

  double median_fit_ms_ols = 0.0;
  double median_fit_ms_pmm = 0.0;
};

std::vector<MatchedCell> run_matched_basis_experiment(const McDesign& design);

// --- Selection / averaging study -----------------------------------------
//
// Candidates come from the positive-only track with at most two terms per
// block (15 candidates).  Reported variants differ in how the prediction at
// x_star is formed.

struct FmaVariantSummary {
  std::string variant;  // "ols_single", "pmm_single", "pmm_fma_top3", ...
  double coverage = 0.0;
  double mean_ci_width = 0.0;
  double bias = 0.0;
  double variance = 0.0;
  double mse = 0.0;
};

struct FmaCell {
  std::string law;
  int n = 0;
  int replications = 0;
  int usable = 0;
  double true_mean = 0.0;
  std::vector<FmaVariantSummary> variants;
};

std::vector<FmaCell> run_fma_experiment(const McDesign& design,
                                        const std::vector<int>& top_j_list);

// --- Symmetric degradation study -----------------------------------------
//
// Under symmetric laws the skewness correction cannot help; this measures
// how much it costs.  Ratios are Monte Carlo variance ratios against the
// matched OLS slope, with a delta-method standard error.

struct AreCell {
  std::string law;
  std::string estimator;
  int n = 0;
  int replications = 0;
  int usable = 0;
  double are = 0.0;  // var(estimator slope) / var(ols slope)
  double are_se = 0.0;
  double are_ci_low = 0.0;
  double are_ci_high = 0.0;
};

std::vector<AreCell> run_symmetric_degradation_experiment(
    const McDesign& design);

// --- Timing capture --------------------------------------------------------

struct TimingSummary {
  std::string estimator;
  int n = 0;
  int repeats = 0;
  double median_ms = 0.0;
  double sd_ms = 0.0;
};

// Times repeated fits of the true single-term model on fresh Gaussian data.
// The first `warmup` fits are excluded from the summaries.
std::vector<TimingSummary> capture_timings(const std::vector<int>& n_grid,
                                           int repeats, int warmup,
                                           std::uint64_t seed);

// Stable 64-bit tag for a law label, used to key the per-cell RNG streams.
std::uint64_t law_stream_tag(const std::string& label);

}  // namespace pmmfp
