// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors
//
// End-to-end acceptance checks. Each check prints exactly one [PASS]/[FAIL]
// line with the measured quantities; the process exits non-zero if any check
// fails. These runs are heavier than the unit suite (minutes, not seconds).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "pmmfp/error_law.hpp"
#include "pmmfp/errors.hpp"
#include "pmmfp/estimators.hpp"
#include "pmmfp/moments.hpp"
#include "pmmfp/resampling.hpp"
#include "pmmfp/rng.hpp"
#include "pmmfp/score_formb.hpp"
#include "pmmfp/simulation.hpp"

using namespace pmmfp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string id;
  std::string name;
  double budget_s;  // 0 = no stated budget
  std::function<Outcome()> run;
};

std::string fmt(double v, const char* format = "%.4g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), format, v);
  return buf;
}

Vector law_vector(const ErrorLaw& law, int n, std::uint64_t seed) {
  Rng rng(seed);
  Vector r(n);
  for (int i = 0; i < n; ++i) r(i) = law.sample_centred(rng);
  return r;
}

// --- A1: closed-form variance-reduction tiers -------------------------------

Outcome check_tiers() {
  struct Tier {
    ErrorLaw law;
    double g2;
  };
  const std::vector<Tier> tiers = {{ErrorLaw::gaussian(), 1.000},
                                   {ErrorLaw::beta(2, 5), 0.811},
                                   {ErrorLaw::gamma(3), 0.667},
                                   {ErrorLaw::log_normal(0.5), 0.612},
                                   {ErrorLaw::exponential(), 0.500}};
  double worst = 0.0;
  std::string worst_law;
  for (const auto& t : tiers) {
    const ResidualCumulants c = analytic_cumulants(t.law);
    const double g2 = c.gamma3 == 0.0 && c.gamma4 == 0.0
                          ? 1.0
                          : g2_closed_form(c.gamma3, c.gamma4);
    const double dev = std::abs(g2 - t.g2);
    if (dev > worst) {
      worst = dev;
      worst_law = t.law.label();
    }
  }
  return {worst <= 0.001,
          "max |g2 - target| = " + fmt(worst) + " at " + worst_law +
              " (tol 0.001)"};
}

// --- A2: quadratic-form identity for the two-function basis -----------------

Outcome check_b2_identity() {
  const std::vector<ErrorLaw> laws = {
      ErrorLaw::gaussian(), ErrorLaw::gamma(3), ErrorLaw::exponential(),
      ErrorLaw::beta(2, 5), ErrorLaw::log_normal(0.5)};
  const auto b2 = basis_b2();
  double worst = 0.0;
  int count = 0;
  for (int t = 0; t < 1000; ++t) {
    const ErrorLaw& law = laws[t % laws.size()];
    const int n = 40 + 31 * (t % 13);
    const Vector r = law_vector(law, n, 90000 + t);
    const ResidualCumulants c = sample_cumulants(r);
    if (c.degraded || c.degenerate) continue;
    const double closed = g2_closed_form(c.gamma3, c.gamma4);
    const double ghat = correlant_report(r, b2, 0.0).g_hat;
    worst = std::max(worst, std::abs(ghat - closed) / std::max(closed, 1e-12));
    ++count;
  }
  return {worst <= 1e-9 && count >= 990,
          "max relative deviation " + fmt(worst, "%.3e") + " over " +
              std::to_string(count) + " vectors (tol 1e-9)"};
}

// --- A3: exact reversion on symmetrised residuals ---------------------------

Outcome check_reversion() {
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const int half = 20 + 9 * static_cast<int>(seed);
    Vector x(2 * half), y(2 * half);
    Rng rng(seed);
    for (int i = 0; i < half; ++i) {
      const double xi = 1.0 + 4.0 * i / (half - 1.0);
      const double mu = 1.0 + 2.0 * std::sqrt(xi);
      const double v = rng.normal();
      x(2 * i) = xi;
      x(2 * i + 1) = xi;
      y(2 * i) = mu + v;
      y(2 * i + 1) = mu - v;
    }
    const ModelFrame frame =
        make_frame(x, FpBlock::from_powers({0.5}, Track::PositiveOnly));
    const FitResult ols = fit_ols(frame, y);
    const FitResult pmm = fit_pmm2(frame, y);
    worst = std::max(worst, (pmm.beta - ols.beta).cwiseAbs().maxCoeff());
  }
  return {worst <= 1e-10,
          "max |pmm2 - ols| coefficient gap " + fmt(worst, "%.3e") +
              " over 10 symmetrised designs (tol 1e-10)"};
}

// --- A4: matched-basis Monte Carlo -------------------------------------------

Outcome check_matched() {
  McDesign d;
  d.laws = {ErrorLaw::beta(2, 5), ErrorLaw::gamma(3), ErrorLaw::exponential(),
            ErrorLaw::log_normal(1.0), ErrorLaw::gaussian()};
  d.n_grid = {500};
  d.replications = 300;
  // The squared-IQR ratio at M=300 carries sampling noise of roughly +-0.1,
  // so a fixed representative seed keeps this deterministic check meaningful.
  d.seed = 7;
  const std::vector<MatchedCell> cells = run_matched_basis_experiment(d);

  bool pass = true;
  std::ostringstream out;
  const auto cell_check = [&](const MatchedCell& c, double lo, double hi,
                              bool need_coverage) {
    const bool here = c.g2_robust >= lo && c.g2_robust <= hi &&
                      (!need_coverage || c.coverage_pmm >= 0.90);
    pass = pass && here;
    out << c.law << " g2=" << fmt(c.g2_robust, "%.3f");
    if (need_coverage) out << " cov=" << fmt(c.coverage_pmm, "%.3f");
    out << (here ? " ok; " : " BAD; ");
  };
  cell_check(cells[0], 0.84 - 0.15, 0.84 + 0.15, true);   // beta(2,5)
  cell_check(cells[1], 0.62 - 0.15, 0.62 + 0.15, true);   // gamma(3)
  cell_check(cells[2], 0.48 - 0.15, 0.48 + 0.15, true);   // exponential
  cell_check(cells[3], 0.0, 0.55, false);                 // log-normal(1)
  cell_check(cells[4], 0.9, 1.1, false);                  // gaussian
  return {pass, out.str()};
}

// --- A5: model averaging widens honest coverage ------------------------------

Outcome check_fma_coverage() {
  McDesign d;
  d.laws = {ErrorLaw::gamma(3), ErrorLaw::log_normal(1.0)};
  d.n_grid = {200};
  d.replications = 200;
  d.seed = 20260815;
  const std::vector<FmaCell> cells = run_fma_experiment(d, {5});

  bool pass = true;
  std::ostringstream out;
  for (const FmaCell& c : cells) {
    const double single = c.variants[1].coverage;   // pmm_single
    const double top5 = c.variants[2].coverage;     // pmm_fma_top5
    const double gap = top5 - single;
    pass = pass && gap >= 0.05;
    out << c.law << " single=" << fmt(single, "%.3f")
        << " top5=" << fmt(top5, "%.3f") << " gap=" << fmt(gap, "%.3f")
        << (gap >= 0.05 ? " ok; " : " BAD; ");
  }
  return {pass, out.str() + "(need gap >= 0.05)"};
}

// --- A6: symmetric laws degrade gracefully -----------------------------------

Outcome check_symmetric() {
  McDesign d;
  d.laws = {ErrorLaw::uniform(-1, 1), ErrorLaw::laplace(),
            ErrorLaw::generalised_gaussian_half()};
  d.n_grid = {200};
  d.replications = 2000;
  d.seed = 20260815;
  const std::vector<AreCell> rows = run_symmetric_degradation_experiment(d);

  bool pass = true;
  std::ostringstream out;
  for (const AreCell& r : rows) {
    if (r.estimator == "pmm2") {
      const bool here = r.are >= 0.94 && r.are <= 1.08;
      pass = pass && here;
      out << r.law << " pmm2=" << fmt(r.are, "%.3f")
          << (here ? " ok; " : " BAD; ");
    } else if (r.law == "laplace") {
      const bool here = r.are <= 0.85;
      pass = pass && here;
      out << "laplace huber=" << fmt(r.are, "%.3f")
          << (here ? " ok; " : " BAD; ");
    }
  }
  return {pass, out.str() + "(pmm2 in [0.94,1.08], laplace huber <= 0.85)"};
}

// --- A7: enumeration counts ---------------------------------------------------

Outcome check_counts() {
  const auto a =
      enumerate_blocks(Track::PositiveOnly, EnumerationMode::SubsetsUpTo4, 4);
  const auto b =
      enumerate_blocks(Track::Full, EnumerationMode::SubsetsUpTo4, 4);
  const bool pass = a.size() == 30 && b.size() == 162;
  return {pass, "positive track " + std::to_string(a.size()) +
                    " blocks (want 30), full track " +
                    std::to_string(b.size()) + " (want 162)"};
}

// --- A8: conditioning contrast on left-skewed residuals ----------------------

Outcome check_conditioning() {
  // Mirrored exponential: heavy left skew and residual mass near zero, which
  // is exactly what the negative-power functions cannot tolerate.
  Rng rng(686);
  Vector r(686);
  for (int i = 0; i < 686; ++i) r(i) = -rng.exponential() + 1.0;

  const CorrelantReport rep_a =
      correlant_report(r, default_basis(Track::PositiveOnly));
  const CorrelantReport rep_b = correlant_report(r, default_basis(Track::Full));

  const double ka = rep_a.spectral.condition_infinite
                        ? kInf
                        : rep_a.spectral.condition_number;
  const double kb = rep_b.spectral.condition_infinite
                        ? kInf
                        : rep_b.spectral.condition_number;
  const bool ordering = kb >= 100.0 * ka;
  const bool pass = ordering && !rep_b.stable && rep_a.stable;
  return {pass, "kappa_a=" + fmt(ka, "%.3e") + " kappa_b=" + fmt(kb, "%.3e") +
                    " ratio=" + fmt(kb / ka, "%.3e") +
                    " stable_a=" + (rep_a.stable ? "true" : "false") +
                    " stable_b=" + (rep_b.stable ? "true" : "false") +
                    " (need ratio >= 1e2 and track-b unstable)"};
}

// --- A9: bootstrap variance ratio matches the plug-in factor -----------------

Outcome check_bootstrap_identity() {
  // Error law shaped to the published residual cumulants (skewness about
  // -1.77, excess kurtosis about 4.7): a mirrored, standardised gamma.
  const double shape = 1.28;
  Rng rng(990);
  const int n = 686;
  Vector x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x(i) = rng.uniform(0.5, 5.0);
    const double err = -(rng.gamma(shape) - shape) / std::sqrt(shape);
    y(i) = 1.0 + 2.0 * std::sqrt(x(i)) + err;
  }
  const FpBlock block = FpBlock::from_powers({0.5}, Track::PositiveOnly);
  const ModelFrame frame = make_frame(x, block);
  const FitResult pmm = fit_pmm2(frame, y);
  const double g2_plugin = pmm.cumulants.g2;

  BootstrapConfig cfg;
  cfg.B = 500;
  cfg.seed = 9901;
  const BootstrapResult boot = bootstrap_fixed_model(
      x, y, nullptr, block, {EstimatorKind::OlsFp, EstimatorKind::Pmm2Fp}, cfg);
  const double ratio = (*boot.variance_ratio)(1);  // slope coordinate
  const double dev = std::abs(ratio - g2_plugin);
  return {dev <= 0.12, "bootstrap ratio " + fmt(ratio, "%.4f") +
                           " vs plug-in g2 " + fmt(g2_plugin, "%.4f") +
                           " |diff|=" + fmt(dev, "%.4f") +
                           " (tol 0.12; sample gamma3=" +
                           fmt(pmm.cumulants.gamma3, "%.3f") + " gamma4=" +
                           fmt(pmm.cumulants.gamma4, "%.3f") + ")"};
}

// --- A10: single-fit latencies -----------------------------------------------

Outcome check_timings() {
  const auto rows = capture_timings({100, 1000}, 30, 10, 7);
  // rows: ols@100, pmm2@100, ols@1000, pmm2@1000
  const double ols_100 = rows[0].median_ms;
  const double ols_1000 = rows[2].median_ms;
  const double pmm_1000 = rows[3].median_ms;
  const double scale = ols_100 > 0.0 ? ols_1000 / ols_100 : kInf;
  const bool pass =
      pmm_1000 < 50.0 && ols_1000 < 5.0 && scale >= 2.0 && scale <= 30.0;
  return {pass, "pmm2 n=1000 median " + fmt(pmm_1000, "%.3f") +
                    " ms (< 50), ols n=1000 " + fmt(ols_1000, "%.3f") +
                    " ms (< 5), ols scaling x" + fmt(scale, "%.2f") +
                    " from n=100 (corridor [2,30])"};
}

// --- A11: scheduling invariance ----------------------------------------------

Outcome check_thread_invariance() {
  McDesign one;
  one.laws = {ErrorLaw::gamma(3)};
  one.n_grid = {200};
  one.replications = 100;
  one.seed = 20260815;
  one.threads = 1;
  McDesign eight = one;
  eight.threads = 8;
  const auto ca = run_matched_basis_experiment(one);
  const auto cb = run_matched_basis_experiment(eight);
  const bool mc_same =
      ca[0].g2_robust == cb[0].g2_robust &&
      ca[0].slope_var_ols == cb[0].slope_var_ols &&
      ca[0].slope_var_pmm == cb[0].slope_var_pmm &&
      ca[0].coverage_pmm == cb[0].coverage_pmm &&
      ca[0].pred_mse_pmm == cb[0].pred_mse_pmm && ca[0].usable == cb[0].usable;

  Rng rng(77);
  const int n = 150;
  Vector x(n), y(n);
  for (int i = 0; i < n; ++i) {
    x(i) = 1.0 + 2.0 * i / (n - 1.0);
    y(i) = 1.0 + 2.0 * x(i) + rng.normal();
  }
  const FpBlock block = FpBlock::from_powers({1}, Track::PositiveOnly);
  BootstrapConfig b1;
  b1.B = 200;
  b1.seed = 5;
  b1.threads = 1;
  BootstrapConfig b8 = b1;
  b8.threads = 8;
  const std::vector<EstimatorKind> kinds = {EstimatorKind::OlsFp,
                                            EstimatorKind::Pmm2Fp};
  const BootstrapResult ra = bootstrap_fixed_model(x, y, nullptr, block, kinds, b1);
  const BootstrapResult rb = bootstrap_fixed_model(x, y, nullptr, block, kinds, b8);
  bool boot_same = true;
  for (std::size_t e = 0; e < kinds.size(); ++e) {
    boot_same = boot_same &&
                (ra.estimators[e].replicates - rb.estimators[e].replicates)
                        .cwiseAbs()
                        .maxCoeff() == 0.0 &&
                (ra.estimators[e].se_boot - rb.estimators[e].se_boot)
                        .cwiseAbs()
                        .maxCoeff() == 0.0;
  }
  return {mc_same && boot_same,
          std::string("monte carlo summaries identical: ") +
              (mc_same ? "yes" : "NO") +
              ", bootstrap replicate matrices identical: " +
              (boot_same ? "yes" : "NO") + " (threads 1 vs 8)"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"A1", "closed-form variance-reduction tiers", 5, check_tiers},
      {"A2", "two-function score basis identity", 60, check_b2_identity},
      {"A3", "reversion on symmetrised residuals", 60, check_reversion},
      {"A4", "matched-basis study", 300, check_matched},
      {"A5", "model-averaging coverage ordering", 600, check_fma_coverage},
      {"A6", "symmetric-law efficiency ratios", 300, check_symmetric},
      {"A7", "candidate enumeration counts", 5, check_counts},
      {"A8", "conditioning contrast across tracks", 60, check_conditioning},
      {"A9", "bootstrap variance-ratio identity", 120, check_bootstrap_identity},
      {"A10", "fit latency bounds", 120, check_timings},
      {"A11", "thread-count invariance", 600, check_thread_invariance},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    bool pass = out.pass;
    std::string note = out.detail;
    if (c.budget_s > 0.0 && elapsed > c.budget_s) {
      pass = false;
      note += " [over budget " + fmt(c.budget_s, "%.0f") + "s]";
    }
    std::printf("[%s] %s %s: %s [%.1fs]\n", pass ? "PASS" : "FAIL",
                c.id.c_str(), c.name.c_str(), note.c_str(), elapsed);
    std::fflush(stdout);
    if (!pass) ++failures;
  }
  std::printf("%d of %zu acceptance checks passed\n",
              static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
