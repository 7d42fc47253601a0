// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pmmfp/selection.hpp"

namespace pmmfp {

// Row indices for replicate b: a pure function of (seed, b, n), shared by
// every estimator in that replicate (matched resamples).
std::vector<int> bootstrap_indices(std::uint64_t seed, int replicate, int n);

struct EstimatorBootstrap {
  EstimatorKind estimator;
  Vector beta_full;                         // fit on the original data
  Vector se_asymptotic;                     // from the full-data fit
  Matrix replicates;                        // successes x k coefficient draws
  Vector se_boot;                           // per coefficient, n-1 denominator
  std::vector<std::pair<double, double>> ci95_percentile;
};

struct BootstrapResult {
  int B = 0;
  int n_failed = 0;
  std::uint64_t seed = 0;
  double offset = 0.0;
  std::vector<std::string> column_labels;
  std::vector<EstimatorBootstrap> estimators;
  // Var_boot(pmm2_j) / Var_boot(ols_j), present when both estimators ran.
  std::optional<Vector> variance_ratio;
};

struct BootstrapConfig {
  int B = 500;
  std::uint64_t seed = 1;
  int threads = 1;
  SolverConfig solver;
  std::optional<double> offset;  // forced shift; default automatic
};

// Pairs (case) resampling of a fixed block. A replicate either succeeds for
// every estimator or is dropped for all of them, keeping the draws matched.
// Raises TooManyFailures when more than B/10 replicates fail; B >= 100.
BootstrapResult bootstrap_fixed_model(const Vector& x, const Vector& y,
                                      const Matrix* covariates,
                                      const FpBlock& block,
                                      const std::vector<EstimatorKind>& kinds,
                                      const BootstrapConfig& config);

struct SelectionStability {
  struct Row {
    std::string block_label;
    int count = 0;
    double frequency = 0.0;  // of successful replicates
  };
  std::vector<Row> rows;  // descending count
  int B = 0;
  int n_failed = 0;
};

// Re-runs the full BIC sweep inside every bootstrap replicate and tabulates
// which block wins.
SelectionStability bootstrap_selection_stability(const Vector& x,
                                                 const Vector& y,
                                                 const Matrix* covariates,
                                                 const SweepConfig& sweep_config,
                                                 int B, std::uint64_t seed,
                                                 int threads = 1);

}  // namespace pmmfp
