// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#include "pmmfp/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pmmfp/errors.hpp"

namespace pmmfp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double bic(const FitResult& fit, Eigen::Index n) {
  if (n != fit.n()) throw InvalidConfig("bic: n does not match the fit");
  if (fit.rss <= 1e-12 * fit.sum_y_sq)
    throw PerfectFit("bic: residual sum of squares is numerically zero");
  const double nn = static_cast<double>(n);
  return nn * std::log(fit.rss / nn) +
         static_cast<double>(fit.k()) * std::log(nn);
}

double SelectionResult::delta_bic_runner_up() const {
  if (ranking.size() < 2) return kInf;
  const CandidateFit& first = candidates[ranking[0]];
  const CandidateFit& second = candidates[ranking[1]];
  if (first.perfect_fit) return kInf;
  return second.bic - first.bic;
}

SelectionResult sweep(const Vector& x, const Vector& y,
                      const Matrix* covariates, const SweepConfig& config,
                      const std::vector<std::string>* covariate_names) {
  if (x.size() != y.size())
    throw InvalidConfig("sweep: x and y lengths differ");

  ShiftResult shifted = shift_domain(x, config.offset);
  const std::vector<FpBlock> blocks =
      enumerate_blocks(config.track, config.mode, config.max_terms);

  SelectionResult out;
  out.offset = shifted.offset;
  out.candidates.reserve(blocks.size());

  const Eigen::Index n = x.size();
  const Eigen::Index cov_cols = covariates ? covariates->cols() : 0;

  for (const auto& block : blocks) {
    const Eigen::Index k_total = 1 + block.column_count() + cov_cols;
    if (n < k_total + 2) {
      out.failures.push_back(
          {block.label(), "skipped: fewer than k+2 observations"});
      continue;
    }
    try {
      // The frame is rebuilt per block; x is already shifted, so offset only
      // decorates labels and is recorded on the fit.
      ModelFrame frame = make_frame(shifted.x, block, 0.0, covariates,
                                    covariate_names);
      frame.offset = shifted.offset;
      FitResult fit = fit_with(config.estimator, frame, y, config.solver);
      CandidateFit cand{std::move(fit), 0.0, false};
      try {
        cand.bic = bic(cand.fit, n);
      } catch (const PerfectFit&) {
        cand.perfect_fit = true;
        cand.bic = std::numeric_limits<double>::quiet_NaN();
      }
      out.candidates.push_back(std::move(cand));
    } catch (const Error& e) {
      out.failures.push_back({block.label(), e.what()});
    }
  }
  if (out.candidates.empty())
    throw AllCandidatesFailed("sweep: no candidate block could be fitted");

  out.ranking.resize(out.candidates.size());
  for (std::size_t i = 0; i < out.ranking.size(); ++i)
    out.ranking[i] = static_cast<int>(i);
  std::sort(out.ranking.begin(), out.ranking.end(), [&](int ia, int ib) {
    const auto& a = out.candidates[ia];
    const auto& b = out.candidates[ib];
    if (a.perfect_fit != b.perfect_fit) return a.perfect_fit;  // flagged first
    if (a.perfect_fit) return ia < ib;
    if (a.bic != b.bic) return a.bic < b.bic;
    return ia < ib;
  });
  return out;
}

SelectionAdvice report_single_best_rule(const SelectionResult& selection) {
  if (selection.candidates.size() < 2)
    throw InsufficientCandidates(
        "report_single_best_rule: need at least two candidates");
  return selection.delta_bic_runner_up() > 6.0 ? SelectionAdvice::SingleBestOk
                                               : SelectionAdvice::RecommendFma;
}

Estimand prediction_estimand(double x_star) {
  return [x_star](const FitResult& fit) { return predict_mean_var(fit, x_star); };
}

FmaResult fma(const SelectionResult& selection, const Estimand& estimand,
              int top_j) {
  const int available = static_cast<int>(selection.ranking.size());
  if (top_j < 1 || top_j > available)
    throw InsufficientCandidates("fma: top_j exceeds the candidate count");

  FmaResult out;
  out.candidate_indices.assign(selection.ranking.begin(),
                               selection.ranking.begin() + top_j);

  // Perfect fits carry BIC = -inf in spirit. If any are present they absorb
  // all weight (uniformly among themselves); this cannot happen on noisy
  // data and exists only so degenerate inputs stay well-defined.
  int n_perfect = 0;
  for (int idx : out.candidate_indices)
    if (selection.candidates[idx].perfect_fit) ++n_perfect;

  out.weights.resize(out.candidate_indices.size());
  if (n_perfect > 0) {
    for (std::size_t j = 0; j < out.weights.size(); ++j)
      out.weights[j] =
          selection.candidates[out.candidate_indices[j]].perfect_fit
              ? 1.0 / n_perfect
              : 0.0;
  } else {
    const double best_bic = selection.candidates[out.candidate_indices[0]].bic;
    double total = 0.0;
    for (std::size_t j = 0; j < out.weights.size(); ++j) {
      const double d = selection.candidates[out.candidate_indices[j]].bic - best_bic;
      out.weights[j] = std::exp(-0.5 * d);
      total += out.weights[j];
    }
    for (double& w : out.weights) w /= total;
  }

  std::vector<double> theta(out.weights.size());
  std::vector<double> var(out.weights.size());
  for (std::size_t j = 0; j < out.weights.size(); ++j) {
    const auto [t, v] = estimand(selection.candidates[out.candidate_indices[j]].fit);
    theta[j] = t;
    var[j] = v;
  }

  out.theta = 0.0;
  for (std::size_t j = 0; j < out.weights.size(); ++j)
    out.theta += out.weights[j] * theta[j];
  out.variance = 0.0;
  for (std::size_t j = 0; j < out.weights.size(); ++j) {
    const double dev = theta[j] - out.theta;
    out.variance += out.weights[j] * (var[j] + dev * dev);
  }
  const double half = 1.96 * std::sqrt(out.variance);
  out.ci95 = {out.theta - half, out.theta + half};
  return out;
}

}  // namespace pmmfp
