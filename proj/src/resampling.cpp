// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#include "pmmfp/resampling.hpp"

#include <algorithm>
#include <limits>
#include <map>

#include "pmmfp/errors.hpp"
#include "pmmfp/parallel.hpp"
#include "pmmfp/rng.hpp"
#include "pmmfp/stats.hpp"

namespace pmmfp {

namespace {

constexpr std::uint64_t kBootstrapTag = 0x626f6f74ull;  // "boot"

void take_rows(const Vector& src, const std::vector<int>& idx, Vector* dst) {
  dst->resize(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) (*dst)(i) = src(idx[i]);
}

void take_rows(const Matrix& src, const std::vector<int>& idx, Matrix* dst) {
  dst->resize(static_cast<Eigen::Index>(idx.size()), src.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) dst->row(i) = src.row(idx[i]);
}

}  // namespace

std::vector<int> bootstrap_indices(std::uint64_t seed, int replicate, int n) {
  Rng rng(seed, kBootstrapTag, static_cast<std::uint64_t>(replicate));
  std::vector<int> idx(n);
  for (int i = 0; i < n; ++i)
    idx[i] = static_cast<int>(rng.uniform01() * n);
  return idx;
}

BootstrapResult bootstrap_fixed_model(const Vector& x, const Vector& y,
                                      const Matrix* covariates,
                                      const FpBlock& block,
                                      const std::vector<EstimatorKind>& kinds,
                                      const BootstrapConfig& config) {
  if (config.B < 100)
    throw InvalidConfig("bootstrap: B must be at least 100");
  if (kinds.empty()) throw InvalidConfig("bootstrap: no estimators requested");
  if (x.size() != y.size())
    throw InvalidConfig("bootstrap: x and y lengths differ");

  const int n = static_cast<int>(x.size());
  const int E = static_cast<int>(kinds.size());

  // The domain shift is computed once on the original data and frozen for
  // every replicate, so coefficients stay comparable across draws.
  ShiftResult shifted = shift_domain(x, config.offset);

  BootstrapResult out;
  out.B = config.B;
  out.seed = config.seed;
  out.offset = shifted.offset;

  std::vector<FitResult> full_fits;
  full_fits.reserve(E);
  for (auto kind : kinds) {
    ModelFrame frame = make_frame(x, block, shifted.offset, covariates);
    full_fits.push_back(fit_with(kind, frame, y, config.solver));
  }
  const auto k = full_fits.front().k();
  out.column_labels = full_fits.front().column_labels;

  // One row per replicate per estimator; a replicate is kept only if every
  // estimator fitted it.
  Matrix draws(config.B, static_cast<Eigen::Index>(E) * k);
  std::vector<char> ok(config.B, 0);

  parallel_for(config.B, config.threads, [&](int b) {
    const std::vector<int> idx = bootstrap_indices(config.seed, b, n);
    Vector xb, yb;
    take_rows(x, idx, &xb);
    take_rows(y, idx, &yb);
    Matrix covb;
    if (covariates) take_rows(*covariates, idx, &covb);
    try {
      for (int e = 0; e < E; ++e) {
        ModelFrame frame = make_frame(
            xb, block, shifted.offset, covariates ? &covb : nullptr);
        FitResult fit = fit_with(kinds[e], frame, yb, config.solver);
        draws.row(b).segment(static_cast<Eigen::Index>(e) * k, k) =
            fit.beta.transpose();
      }
      ok[b] = 1;
    } catch (const Error&) {
      ok[b] = 0;
    }
  });

  int successes = 0;
  for (char c : ok) successes += c;
  out.n_failed = config.B - successes;
  if (out.n_failed > config.B / 10)
    throw TooManyFailures("bootstrap: " + std::to_string(out.n_failed) + " of " +
                          std::to_string(config.B) + " replicates failed");

  std::optional<Eigen::Index> ols_at, pmm_at;
  for (int e = 0; e < E; ++e) {
    EstimatorBootstrap eb;
    eb.estimator = kinds[e];
    eb.beta_full = full_fits[e].beta;
    eb.se_asymptotic = full_fits[e].se_asymptotic;
    eb.replicates.resize(successes, k);
    Eigen::Index r = 0;
    for (int b = 0; b < config.B; ++b)
      if (ok[b]) eb.replicates.row(r++) =
          draws.row(b).segment(static_cast<Eigen::Index>(e) * k, k);

    eb.se_boot.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) {
      std::vector<double> col(eb.replicates.col(j).data(),
                              eb.replicates.col(j).data() + successes);
      eb.se_boot(j) = std::sqrt(stats::variance(col));
      std::sort(col.begin(), col.end());
      eb.ci95_percentile.emplace_back(stats::quantile_sorted(col, 0.025),
                                      stats::quantile_sorted(col, 0.975));
    }
    if (kinds[e] == EstimatorKind::OlsFp) ols_at = e;
    if (kinds[e] == EstimatorKind::Pmm2Fp) pmm_at = e;
    out.estimators.push_back(std::move(eb));
  }

  if (ols_at && pmm_at) {
    Vector ratio(k);
    for (Eigen::Index j = 0; j < k; ++j) {
      const double vo = out.estimators[*ols_at].se_boot(j);
      const double vp = out.estimators[*pmm_at].se_boot(j);
      ratio(j) = vo > 0.0 ? (vp * vp) / (vo * vo)
                          : std::numeric_limits<double>::quiet_NaN();
    }
    out.variance_ratio = std::move(ratio);
  }
  return out;
}

SelectionStability bootstrap_selection_stability(const Vector& x,
                                                 const Vector& y,
                                                 const Matrix* covariates,
                                                 const SweepConfig& sweep_config,
                                                 int B, std::uint64_t seed,
                                                 int threads) {
  if (B < 100) throw InvalidConfig("bootstrap: B must be at least 100");
  const int n = static_cast<int>(x.size());

  // Freeze the shift on the original data (see bootstrap_fixed_model).
  ShiftResult shifted = shift_domain(x, sweep_config.offset);
  SweepConfig cfg = sweep_config;
  cfg.offset = shifted.offset;

  std::vector<std::string> winner(B);
  std::vector<char> ok(B, 0);

  parallel_for(B, threads, [&](int b) {
    const std::vector<int> idx = bootstrap_indices(seed, b, n);
    Vector xb, yb;
    take_rows(x, idx, &xb);
    take_rows(y, idx, &yb);
    Matrix covb;
    if (covariates) take_rows(*covariates, idx, &covb);
    try {
      SelectionResult sel =
          sweep(xb, yb, covariates ? &covb : nullptr, cfg);
      winner[b] = sel.best().fit.block.label();
      ok[b] = 1;
    } catch (const Error&) {
      ok[b] = 0;
    }
  });

  SelectionStability out;
  out.B = B;
  int successes = 0;
  std::map<std::string, int> counts;
  for (int b = 0; b < B; ++b) {
    if (!ok[b]) continue;
    ++successes;
    ++counts[winner[b]];
  }
  out.n_failed = B - successes;
  if (out.n_failed > B / 10)
    throw TooManyFailures("bootstrap: " + std::to_string(out.n_failed) + " of " +
                          std::to_string(B) + " selection replicates failed");

  for (const auto& [label, count] : counts)
    out.rows.push_back({label, count, count / static_cast<double>(successes)});
  std::sort(out.rows.begin(), out.rows.end(), [](const auto& a, const auto& b) {
    if (a.count != b.count) return a.count > b.count;
    return a.block_label < b.block_label;
  });
  return out;
}

}  // namespace pmmfp
