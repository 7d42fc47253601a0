// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#include "pmmfp/simulation.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <limits>
#include <utility>

#include "pmmfp/errors.hpp"
#include "pmmfp/moments.hpp"
#include "pmmfp/parallel.hpp"
#include "pmmfp/rng.hpp"
#include "pmmfp/selection.hpp"
#include "pmmfp/stats.hpp"

namespace pmmfp {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

// Mean response of the true model at a single point.
double true_mean_at(const McDesign& design, double x) {
  Vector xs(1);
  xs[0] = x;
  const DesignMatrix dm = build_design(xs, design.true_block, 0.0);
  double m = 0.0;
  for (Eigen::Index j = 0; j < dm.values.cols(); ++j) {
    m += dm.values(0, j) * design.true_beta[j];
  }
  return m;
}

std::vector<double> keep(const std::vector<double>& v,
                         const std::vector<char>& ok) {
  std::vector<double> out;
  out.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (ok[i]) out.push_back(v[i]);
  }
  return out;
}

void require_usable(int usable, int total, const char* what) {
  if (usable * 10 < total * 9) {
    throw TooManyFailures(std::string(what) + ": only " +
                          std::to_string(usable) + " of " +
                          std::to_string(total) + " replicates usable");
  }
}

// The slope-based studies are defined against a single, non-repeated true
// term, so that "the slope" is an unambiguous coordinate.
void require_single_term(const McDesign& design) {
  if (design.true_block.terms().size() != 1 ||
      design.true_block.terms().front().repeated) {
    throw InvalidConfig(
        "this experiment requires a single non-repeated true term");
  }
}

double mean_sq_dev(const std::vector<double>& v, double target) {
  if (v.empty()) return kNan;
  double s = 0.0;
  for (double t : v) s += (t - target) * (t - target);
  return s / static_cast<double>(v.size());
}

struct AreStats {
  double ratio;
  double se;
};

// Monte Carlo variance ratio var(a)/var(b) for paired draws, with a
// delta-method standard error: with da, db the centred values and
// z_i = da_i^2 - R db_i^2, SE(R) = sd(z) / (sqrt(m) * mean(db^2)).
AreStats variance_ratio_with_se(const std::vector<double>& a,
                                const std::vector<double>& b) {
  const std::size_t m = a.size();
  if (m < 3 || b.size() != m) {
    throw InvalidConfig("variance ratio needs at least 3 paired values");
  }
  const double ma = stats::mean(a);
  const double mb = stats::mean(b);
  double sa = 0.0, sb = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sa += (a[i] - ma) * (a[i] - ma);
    sb += (b[i] - mb) * (b[i] - mb);
  }
  if (sb <= 0.0) throw DegenerateVariance("reference slopes are constant");
  const double ratio = sa / sb;
  std::vector<double> z(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    z[i] = da * da - ratio * db * db;
  }
  const double mean_db2 = sb / static_cast<double>(m);
  const double se = std::sqrt(stats::variance(z)) /
                    (std::sqrt(static_cast<double>(m)) * mean_db2);
  return {ratio, se};
}

}  // namespace

McDesign::McDesign() {
  true_beta.resize(2);
  true_beta[0] = 1.0;
  true_beta[1] = 2.0;
}

void McDesign::validate() const {
  if (laws.empty()) throw InvalidConfig("design has no error laws");
  if (n_grid.empty()) throw InvalidConfig("design has an empty n grid");
  for (int n : n_grid) {
    if (n < 30) throw InvalidConfig("design n must be at least 30");
  }
  if (replications < 50) {
    throw InvalidConfig("design needs at least 50 replications");
  }
  if (!(x_min > 0.0) || !(x_min < x_max)) {
    throw InvalidConfig("design requires 0 < x_min < x_max");
  }
  if (!(x_star > 0.0)) throw InvalidConfig("design requires x_star > 0");
  Vector probe(1);
  probe[0] = x_min;
  const DesignMatrix dm = build_design(probe, true_block, 0.0);
  if (dm.values.cols() != true_beta.size()) {
    throw InvalidConfig("true_beta length does not match the true block");
  }
  if (threads < 1) throw InvalidConfig("threads must be positive");
}

std::uint64_t law_stream_tag(const std::string& label) {
  // FNV-1a, 64-bit.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

Dataset sample_dgp(const McDesign& design, const ErrorLaw& law, int n,
                   int replicate) {
  Rng rng(design.seed, law_stream_tag(law.label()),
          static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(replicate));
  Dataset d;
  d.x.resize(n);
  d.y.resize(n);
  for (int i = 0; i < n; ++i) d.x[i] = rng.uniform(design.x_min, design.x_max);
  const DesignMatrix dm = build_design(d.x, design.true_block, 0.0);
  const Vector mu = dm.values * design.true_beta;
  for (int i = 0; i < n; ++i) d.y[i] = mu[i] + law.sample_centred(rng);
  return d;
}

std::vector<MatchedCell> run_matched_basis_experiment(const McDesign& design) {
  design.validate();
  require_single_term(design);
  const double beta1 = design.true_beta[1];
  const double mu_star = true_mean_at(design, design.x_star);
  const int M = design.replications;
  const SolverConfig solver;

  std::vector<MatchedCell> cells;
  for (const ErrorLaw& law : design.laws) {
    for (int n : design.n_grid) {
      std::vector<double> s_ols(M), s_pmm(M), se_ols(M), se_pmm(M);
      std::vector<double> p_ols(M), p_pmm(M), t_ols(M), t_pmm(M);
      std::vector<char> ok(M, 0);

      parallel_for(M, design.threads, [&](int r) {
        try {
          const Dataset d = sample_dgp(design, law, n, r);
          const ModelFrame frame = make_frame(d.x, design.true_block, 0.0);
          auto t0 = Clock::now();
          const FitResult ols = fit_ols(frame, d.y);
          t_ols[r] = elapsed_ms(t0);
          t0 = Clock::now();
          const FitResult pmm = fit_pmm2(frame, d.y, solver);
          t_pmm[r] = elapsed_ms(t0);
          s_ols[r] = ols.beta[1];
          s_pmm[r] = pmm.beta[1];
          se_ols[r] = ols.se_asymptotic[1];
          se_pmm[r] = pmm.se_asymptotic[1];
          p_ols[r] = predict_mean(ols, design.x_star);
          p_pmm[r] = predict_mean(pmm, design.x_star);
          ok[r] = 1;
        } catch (const Error&) {
          ok[r] = 0;
        }
      });

      MatchedCell cell;
      cell.law = law.label();
      cell.n = n;
      cell.replications = M;
      const std::vector<double> so = keep(s_ols, ok);
      const std::vector<double> sp = keep(s_pmm, ok);
      cell.usable = static_cast<int>(so.size());
      require_usable(cell.usable, M, "matched-basis cell");

      cell.slope_bias_ols = stats::mean(so) - beta1;
      cell.slope_bias_pmm = stats::mean(sp) - beta1;
      cell.slope_var_ols = stats::variance(so);
      cell.slope_var_pmm = stats::variance(sp);
      cell.slope_mse_ols = mean_sq_dev(so, beta1);
      cell.slope_mse_pmm = mean_sq_dev(sp, beta1);

      const double iqr_ols = stats::iqr(so);
      const double iqr_pmm = stats::iqr(sp);
      cell.g2_robust =
          iqr_ols > 0.0 ? (iqr_pmm / iqr_ols) * (iqr_pmm / iqr_ols) : kNan;
      cell.g2_variance = cell.slope_var_ols > 0.0
                             ? cell.slope_var_pmm / cell.slope_var_ols
                             : kNan;
      cell.reduction_pct = 100.0 * (1.0 - cell.g2_robust);
      try {
        cell.g2_analytic = analytic_cumulants(law).g2;
      } catch (const Error&) {
        cell.g2_analytic = kNan;
      }

      int hit_ols = 0, hit_pmm = 0;
      for (int r = 0; r < M; ++r) {
        if (!ok[r]) continue;
        if (std::abs(s_ols[r] - beta1) <= 1.96 * se_ols[r]) ++hit_ols;
        if (std::abs(s_pmm[r] - beta1) <= 1.96 * se_pmm[r]) ++hit_pmm;
      }
      cell.coverage_ols = static_cast<double>(hit_ols) / cell.usable;
      cell.coverage_pmm = static_cast<double>(hit_pmm) / cell.usable;

      const std::vector<double> po = keep(p_ols, ok);
      const std::vector<double> pp = keep(p_pmm, ok);
      cell.pred_mse_ols = mean_sq_dev(po, mu_star);
      cell.pred_mse_pmm = mean_sq_dev(pp, mu_star);
      const double iqr_po = stats::iqr(po);
      cell.pred_efficiency =
          iqr_po > 0.0 ? (stats::iqr(pp) / iqr_po) * (stats::iqr(pp) / iqr_po)
                       : kNan;

      cell.median_fit_ms_ols = stats::median(keep(t_ols, ok));
      cell.median_fit_ms_pmm = stats::median(keep(t_pmm, ok));
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

std::vector<FmaCell> run_fma_experiment(const McDesign& design,
                                        const std::vector<int>& top_j_list) {
  design.validate();
  if (top_j_list.empty()) throw InvalidConfig("top_j_list must not be empty");
  for (int j : top_j_list) {
    if (j < 1) throw InvalidConfig("top_j entries must be positive");
  }

  const double mu_star = true_mean_at(design, design.x_star);
  const int M = design.replications;
  const int V = 2 + static_cast<int>(top_j_list.size());

  std::vector<std::string> names{"ols_single", "pmm_single"};
  for (int j : top_j_list) names.push_back("pmm_fma_top" + std::to_string(j));

  SweepConfig base;
  base.track = Track::PositiveOnly;
  base.mode = EnumerationMode::SubsetsUpTo4;
  base.max_terms = 2;
  base.offset = 0.0;  // the design keeps x strictly positive already
  const Estimand estimand = prediction_estimand(design.x_star);

  std::vector<FmaCell> cells;
  for (const ErrorLaw& law : design.laws) {
    for (int n : design.n_grid) {
      // Per replicate and variant: point estimate and CI endpoints.
      std::vector<double> est(static_cast<std::size_t>(M) * V);
      std::vector<double> lo(est.size()), hi(est.size());
      std::vector<char> ok(M, 0);

      parallel_for(M, design.threads, [&](int r) {
        try {
          const Dataset d = sample_dgp(design, law, n, r);
          SweepConfig co = base;
          co.estimator = EstimatorKind::OlsFp;
          const SelectionResult sel_ols = sweep(d.x, d.y, nullptr, co);
          SweepConfig cp = base;
          cp.estimator = EstimatorKind::Pmm2Fp;
          const SelectionResult sel_pmm = sweep(d.x, d.y, nullptr, cp);

          const auto single = [&](const SelectionResult& sel, int v) {
            const auto [m, var] = predict_mean_var(sel.best().fit,
                                                   design.x_star);
            const double h = 1.96 * std::sqrt(std::max(var, 0.0));
            est[r * V + v] = m;
            lo[r * V + v] = m - h;
            hi[r * V + v] = m + h;
          };
          single(sel_ols, 0);
          single(sel_pmm, 1);
          for (std::size_t t = 0; t < top_j_list.size(); ++t) {
            const FmaResult fr = fma(sel_pmm, estimand, top_j_list[t]);
            const int v = 2 + static_cast<int>(t);
            est[r * V + v] = fr.theta;
            lo[r * V + v] = fr.ci95.first;
            hi[r * V + v] = fr.ci95.second;
          }
          ok[r] = 1;
        } catch (const Error&) {
          ok[r] = 0;
        }
      });

      FmaCell cell;
      cell.law = law.label();
      cell.n = n;
      cell.replications = M;
      cell.true_mean = mu_star;
      int usable = 0;
      for (int r = 0; r < M; ++r) usable += ok[r];
      cell.usable = usable;
      require_usable(usable, M, "fma cell");

      for (int v = 0; v < V; ++v) {
        FmaVariantSummary s;
        s.variant = names[v];
        int hits = 0;
        double width = 0.0;
        std::vector<double> points;
        points.reserve(static_cast<std::size_t>(usable));
        for (int r = 0; r < M; ++r) {
          if (!ok[r]) continue;
          const std::size_t at = static_cast<std::size_t>(r) * V + v;
          if (lo[at] <= mu_star && mu_star <= hi[at]) ++hits;
          width += hi[at] - lo[at];
          points.push_back(est[at]);
        }
        s.coverage = static_cast<double>(hits) / usable;
        s.mean_ci_width = width / usable;
        s.bias = stats::mean(points) - mu_star;
        s.variance = stats::variance(points);
        s.mse = mean_sq_dev(points, mu_star);
        cell.variants.push_back(std::move(s));
      }
      cells.push_back(std::move(cell));
    }
  }
  return cells;
}

std::vector<AreCell> run_symmetric_degradation_experiment(
    const McDesign& design) {
  design.validate();
  require_single_term(design);
  if (design.replications < 500) {
    throw InvalidConfig(
        "the symmetric degradation study needs at least 500 replications");
  }
  const int M = design.replications;
  const SolverConfig solver;

  std::vector<AreCell> rows;
  for (const ErrorLaw& law : design.laws) {
    for (int n : design.n_grid) {
      std::vector<double> s_ols(M), s_pmm(M), s_hub(M);
      std::vector<char> ok(M, 0);

      parallel_for(M, design.threads, [&](int r) {
        try {
          const Dataset d = sample_dgp(design, law, n, r);
          const ModelFrame frame = make_frame(d.x, design.true_block, 0.0);
          s_ols[r] = fit_ols(frame, d.y).beta[1];
          s_pmm[r] = fit_pmm2(frame, d.y, solver).beta[1];
          s_hub[r] = fit_huber(frame, d.y, solver).beta[1];
          ok[r] = 1;
        } catch (const Error&) {
          ok[r] = 0;
        }
      });

      const std::vector<double> so = keep(s_ols, ok);
      const int usable = static_cast<int>(so.size());
      require_usable(usable, M, "symmetric-degradation cell");

      const auto emit = [&](const char* name, const std::vector<double>& s) {
        const AreStats st = variance_ratio_with_se(keep(s, ok), so);
        AreCell cell;
        cell.law = law.label();
        cell.estimator = name;
        cell.n = n;
        cell.replications = M;
        cell.usable = usable;
        cell.are = st.ratio;
        cell.are_se = st.se;
        cell.are_ci_low = st.ratio - 1.96 * st.se;
        cell.are_ci_high = st.ratio + 1.96 * st.se;
        rows.push_back(std::move(cell));
      };
      emit("pmm2", s_pmm);
      emit("huber", s_hub);
    }
  }
  return rows;
}

std::vector<TimingSummary> capture_timings(const std::vector<int>& n_grid,
                                           int repeats, int warmup,
                                           std::uint64_t seed) {
  if (n_grid.empty()) throw InvalidConfig("timing n grid is empty");
  if (warmup < 0 || repeats <= warmup) {
    throw InvalidConfig("timing repeats must exceed the warm-up count");
  }

  McDesign design;
  design.laws.push_back(ErrorLaw::gaussian());
  design.seed = seed;
  const ErrorLaw law = ErrorLaw::gaussian();
  const SolverConfig solver;

  std::vector<TimingSummary> out;
  for (int n : n_grid) {
    std::vector<double> t_ols, t_pmm;
    t_ols.reserve(repeats - warmup);
    t_pmm.reserve(repeats - warmup);
    for (int r = 0; r < repeats; ++r) {
      const Dataset d = sample_dgp(design, law, n, r);
      const ModelFrame frame = make_frame(d.x, design.true_block, 0.0);
      auto t0 = Clock::now();
      fit_ols(frame, d.y);
      const double ms_ols = elapsed_ms(t0);
      t0 = Clock::now();
      fit_pmm2(frame, d.y, solver);
      const double ms_pmm = elapsed_ms(t0);
      if (r >= warmup) {
        t_ols.push_back(ms_ols);
        t_pmm.push_back(ms_pmm);
      }
    }
    const double sd_ols = std::sqrt(stats::variance(t_ols));
    const double sd_pmm = std::sqrt(stats::variance(t_pmm));
    std::sort(t_ols.begin(), t_ols.end());
    std::sort(t_pmm.begin(), t_pmm.end());
    out.push_back({"ols", n, static_cast<int>(t_ols.size()),
                   stats::quantile_sorted(t_ols, 0.5), sd_ols});
    out.push_back({"pmm2", n, static_cast<int>(t_pmm.size()),
                   stats::quantile_sorted(t_pmm, 0.5), sd_pmm});
  }
  return out;
}

}  // namespace pmmfp
