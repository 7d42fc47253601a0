// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#include "pmmfp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "pmmfp/errors.hpp"
#include "pmmfp/io.hpp"
#include "pmmfp/parallel.hpp"
#include "pmmfp/report.hpp"

namespace pmmfp {
namespace {

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur, ',')) {
    const auto a = cur.find_first_not_of(" \t");
    if (a == std::string::npos) {
      throw InvalidConfig("empty entry in list '" + text + "'");
    }
    const auto b = cur.find_last_not_of(" \t");
    out.push_back(cur.substr(a, b - a + 1));
  }
  if (out.empty()) throw InvalidConfig("expected a non-empty list");
  return out;
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InvalidConfig(std::string("cannot parse ") + what + " '" + s + "'");
  }
}

Track parse_track(const std::string& s) {
  if (s == "positive") return Track::PositiveOnly;
  if (s == "full") return Track::Full;
  throw InvalidConfig("unknown track '" + s + "' (expected positive|full)");
}

EnumerationMode parse_mode(const std::string& s) {
  if (s == "subsets") return EnumerationMode::SubsetsUpTo4;
  if (s == "ra2") return EnumerationMode::RoystonAltmanDeg2;
  throw InvalidConfig("unknown mode '" + s + "' (expected subsets|ra2)");
}

// A power appearing twice denotes the repeated term x^p, x^p*log(x).
FpBlock parse_powers(const std::string& text, Track track) {
  std::map<double, int> counts;
  for (const std::string& tok : split_csv(text)) {
    counts[parse_double(tok, "power")] += 1;
  }
  std::vector<FpTerm> terms;
  for (const auto& [p, c] : counts) {
    if (c > 2) {
      throw InvalidBlock("power " + std::to_string(p) +
                         " listed more than twice");
    }
    terms.push_back(FpTerm{FpPower(p), c == 2});
  }
  return FpBlock(std::move(terms), track);
}

std::vector<EstimatorKind> parse_estimators(const std::string& csv) {
  std::vector<EstimatorKind> kinds;
  for (const std::string& tok : split_csv(csv)) {
    const EstimatorKind k = estimator_from_name(tok);
    for (EstimatorKind seen : kinds) {
      if (seen == k) throw InvalidConfig("estimator '" + tok + "' repeated");
    }
    kinds.push_back(k);
  }
  return kinds;
}

ErrorLaw parse_law(const std::string& token) {
  std::string name = token;
  std::vector<double> args;
  const auto open = token.find('(');
  if (open != std::string::npos) {
    if (token.back() != ')') {
      throw InvalidConfig("malformed law '" + token + "'");
    }
    name = token.substr(0, open);
    const std::string inner = token.substr(open + 1,
                                           token.size() - open - 2);
    for (const std::string& a : split_csv(inner)) {
      args.push_back(parse_double(a, "law parameter"));
    }
  }

  const auto want = [&](std::size_t k) {
    if (args.size() != k) {
      throw InvalidConfig("law '" + name + "' takes " + std::to_string(k) +
                          " parameter(s)");
    }
  };
  if (name == "gaussian" || name == "normal") {
    want(0);
    return ErrorLaw::gaussian();
  }
  if (name == "laplace") {
    want(0);
    return ErrorLaw::laplace();
  }
  if (name == "exponential") {
    if (!args.empty() && !(args.size() == 1 && args[0] == 1.0)) {
      throw UnsupportedLaw("only the unit-rate exponential is supported");
    }
    return ErrorLaw::exponential();
  }
  if (name == "beta") {
    want(2);
    return ErrorLaw::beta(args[0], args[1]);
  }
  if (name == "gamma") {
    want(1);
    return ErrorLaw::gamma(args[0]);
  }
  if (name == "lognormal" || name == "log_normal") {
    want(1);
    return ErrorLaw::log_normal(args[0]);
  }
  if (name == "uniform") {
    want(2);
    return ErrorLaw::uniform(args[0], args[1]);
  }
  if (name == "gen_gaussian") {
    want(1);
    if (args[0] != 0.5) {
      throw UnsupportedLaw("generalised gaussian is supported for shape 0.5");
    }
    return ErrorLaw::generalised_gaussian_half();
  }
  throw UnsupportedLaw("unknown error law '" + name + "'");
}

std::vector<ErrorLaw> parse_laws(const std::string& csv) {
  // Laws may carry parenthesised parameters with commas, so split on commas
  // that are outside parentheses.
  std::vector<ErrorLaw> laws;
  std::string cur;
  int depth = 0;
  const auto flush = [&] {
    const auto a = cur.find_first_not_of(" \t");
    if (a == std::string::npos) throw InvalidConfig("empty law entry");
    const auto b = cur.find_last_not_of(" \t");
    laws.push_back(parse_law(cur.substr(a, b - a + 1)));
    cur.clear();
  };
  for (char c : csv) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      flush();
    } else {
      cur.push_back(c);
    }
  }
  flush();
  return laws;
}

std::vector<int> parse_int_list(const std::string& csv, const char* what) {
  std::vector<int> out;
  for (const std::string& tok : split_csv(csv)) {
    const double v = parse_double(tok, what);
    if (v != static_cast<int>(v) || v < 1) {
      throw InvalidConfig(std::string("invalid ") + what + " '" + tok + "'");
    }
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// --- shared option bundles --------------------------------------------------

struct DataOpts {
  std::string path;
  std::string x_col = "x";
  std::string y_col = "y";
  std::string covariates;  // comma separated column names, may be empty
};

struct LoadedData {
  Vector x;
  Vector y;
  Matrix cov;
  std::vector<std::string> cov_names;
  int dropped = 0;

  const Matrix* cov_ptr() const { return cov.cols() > 0 ? &cov : nullptr; }
};

LoadedData load_data(const DataOpts& opts, std::vector<std::string>* warnings) {
  const CsvTable table = read_csv(opts.path);
  std::vector<std::string> cov_cols;
  if (!opts.covariates.empty()) cov_cols = split_csv(opts.covariates);
  CompleteCases cc = complete_cases(table, opts.x_col, opts.y_col, cov_cols);
  if (cc.x.size() < 8) {
    throw TooFewObservations("need at least 8 complete rows, have " +
                             std::to_string(cc.x.size()));
  }
  if (cc.dropped > 0) {
    warnings->push_back("dropped " + std::to_string(cc.dropped) +
                        " incomplete rows");
  }
  return {std::move(cc.x), std::move(cc.y), std::move(cc.covariates),
          std::move(cc.covariate_names), cc.dropped};
}

// Offset request: explicit value wins, then automatic, otherwise none (and
// non-positive x is the caller's mistake).
std::optional<double> resolve_shift(bool auto_shift, std::optional<double> by,
                                    const Vector& x) {
  if (by) return by;
  if (auto_shift) return std::nullopt;  // shift_domain picks the offset
  if (x.size() > 0 && x.minCoeff() <= 0.0) {
    throw NonPositiveCovariate(
        "x contains non-positive values; rerun with --shift or --shift-by");
  }
  return 0.0;
}

// --- config file support ------------------------------------------------------
//
// A JSON object whose keys mirror long option names (underscores for
// dashes).  Values set this way lose to options given on the command line;
// unknown keys are rejected.
class ConfigBinder {
 public:
  explicit ConfigBinder(CLI::App* cmd) : cmd_(cmd) {}

  void add(const std::string& key, const std::string& option,
           std::function<void(const Json&)> assign) {
    handlers_[key] = {option, std::move(assign)};
  }

  void apply(const std::string& path) const {
    const Json cfg = load_json_file(path);
    if (!cfg.is_object()) {
      throw InvalidConfig("config file must hold a JSON object");
    }
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
      const auto h = handlers_.find(it.key());
      if (h == handlers_.end()) {
        throw InvalidConfig("unknown config key '" + it.key() + "'");
      }
      const CLI::Option* opt = cmd_->get_option_no_throw(h->second.first);
      if (opt != nullptr && opt->count() > 0) continue;
      try {
        h->second.second(it.value());
      } catch (const Json::exception&) {
        throw InvalidConfig("config key '" + it.key() + "' has the wrong type");
      }
    }
  }

 private:
  CLI::App* cmd_;
  std::map<std::string, std::pair<std::string, std::function<void(const Json&)>>>
      handlers_;
};

// --- report emission ---------------------------------------------------------

int emit_report(const std::string& command, std::uint64_t seed,
                const Json& config_echo, const Json& payload,
                const std::vector<std::string>& warnings,
                const std::string& out_path) {
  ReportEnvelope env = make_envelope(command, seed);
  env.config = config_echo;
  env.payload = payload;
  env.warnings = warnings;
  const std::string text = envelope_to_json(env).dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(out_path);
    if (!out) throw FileNotFound("cannot write '" + out_path + "'");
    out << text;
  }
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
  return warnings.empty() ? 0 : 2;
}

void add_fit_warnings(const FitResult& fit, std::vector<std::string>* w) {
  const std::string who = estimator_name(fit.estimator);
  if (fit.cumulants.degenerate) {
    w->push_back(who + ": residual variance is numerically zero (exact fit); "
                       "moment diagnostics unavailable");
  } else if (fit.cumulants.degraded) {
    w->push_back(who + ": residual skewness/kurtosis outside the usable "
                       "region; variance-reduction factor clamped");
  }
  if (!fit.converged) {
    w->push_back(who + ": solver stopped at the iteration budget before "
                       "meeting the step tolerance");
  }
  if (fit.used_ridge > 0.0) {
    w->push_back(who + ": curvature matrix needed ridge regularisation");
  }
}

Json prediction_json(const FitResult& fit, double x_star) {
  const auto [m, v] = predict_mean_var(fit, x_star);
  const double half = 1.96 * std::sqrt(std::max(v, 0.0));
  return Json{{"x_star", x_star},
              {"mean", m},
              {"variance", v},
              {"ci95", Json::array({m - half, m + half})}};
}

// Skewness-based normality summary. The standard error of the sample
// skewness under normality is sqrt(6/n); two of those is the flag threshold.
Json normality_json(const FitResult& fit) {
  const double n = static_cast<double>(fit.n());
  const double se3 = std::sqrt(6.0 / n);
  const bool skewed = std::abs(fit.cumulants.gamma3) > 2.0 * se3;
  return Json{
      {"gamma3", fit.cumulants.gamma3},
      {"gamma4", fit.cumulants.gamma4},
      {"se_gamma3_normal", se3},
      {"skewed", skewed},
      {"note", skewed
                   ? "residual skewness is material; the second-order score "
                     "differs from least squares"
                   : "residual skewness is negligible (g2 near 1); the "
                     "second-order fit coincides with least squares"}};
}

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void write_table(const std::string& path,
                 const std::vector<std::string>& header,
                 const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw FileNotFound("cannot write '" + path + "'");
  for (std::size_t j = 0; j < header.size(); ++j) {
    out << (j ? "," : "") << header[j];
  }
  out << "\n";
  for (const auto& row : rows) {
    for (std::size_t j = 0; j < row.size(); ++j) {
      out << (j ? "," : "") << row[j];
    }
    out << "\n";
  }
}

Json formb_json(const FitResult& fit, Track track,
                std::vector<std::string>* warnings) {
  try {
    const CorrelantReport rep =
        correlant_report(fit.residuals, default_basis(track));
    if (!rep.stable) {
      warnings->push_back(
          "score diagnostic unstable: ill-conditioned correlant or "
          "regularisation-sensitive estimate");
    }
    if (rep.inverse_moment.evaluated && !rep.inverse_moment.admissible) {
      warnings->push_back(
          "negative-power score functions inadmissible for these residuals");
    }
    return correlant_to_json(rep);
  } catch (const Error& e) {
    warnings->push_back(std::string("score diagnostic skipped: ") + e.what());
    return Json();
  }
}

// --- fit -----------------------------------------------------------------------

struct FitOpts {
  DataOpts data;
  std::string powers;
  bool auto_sweep = false;
  std::string estimator = "pmm2";
  std::string track = "positive";
  std::string mode = "subsets";
  int max_terms = 4;
  std::optional<double> x_star;
  int fma_top = 0;
  bool diagnose_formb = false;
  bool shift = false;
  std::optional<double> shift_by;
  std::uint64_t seed = 1;
  int threads = default_thread_count();
  std::string out;
  std::string config;
};

Json fit_config_echo(const FitOpts& o) {
  Json j{{"data", o.data.path},
         {"x", o.data.x_col},
         {"y", o.data.y_col},
         {"estimator", o.estimator},
         {"track", o.track},
         {"seed", o.seed},
         {"threads", o.threads}};
  if (!o.data.covariates.empty()) j["covariates"] = o.data.covariates;
  if (o.auto_sweep) {
    j["auto"] = true;
    j["mode"] = o.mode;
    j["max_terms"] = o.max_terms;
  } else {
    j["powers"] = o.powers;
  }
  if (o.x_star) j["x_star"] = *o.x_star;
  if (o.fma_top > 0) j["fma_top"] = o.fma_top;
  if (o.shift) j["shift"] = true;
  if (o.shift_by) j["shift_by"] = *o.shift_by;
  return j;
}

int cmd_fit(const FitOpts& opts) {
  if (opts.auto_sweep == !opts.powers.empty()) {
    throw InvalidConfig("pass exactly one of --powers or --auto");
  }
  if (opts.fma_top > 0 && !opts.auto_sweep) {
    throw InvalidConfig("--fma-top requires --auto");
  }
  if (opts.fma_top > 0 && !opts.x_star) {
    throw InvalidConfig("--fma-top requires --x-star (averaging targets the "
                        "mean response at a point)");
  }

  std::vector<std::string> warnings;
  const LoadedData d = load_data(opts.data, &warnings);
  const Track track = parse_track(opts.track);
  const std::optional<double> shift_req =
      resolve_shift(opts.shift, opts.shift_by, d.x);
  const SolverConfig solver;

  Json payload{{"kind", "fit"},
               {"n", static_cast<int>(d.x.size())},
               {"dropped_rows", d.dropped}};

  if (opts.auto_sweep) {
    SweepConfig sc;
    sc.track = track;
    sc.mode = parse_mode(opts.mode);
    sc.max_terms = opts.max_terms;
    sc.estimator = estimator_from_name(opts.estimator);
    sc.solver = solver;
    sc.offset = shift_req;
    const SelectionResult sel = sweep(d.x, d.y, d.cov_ptr(), sc, &d.cov_names);
    payload["selection"] = selection_to_json(sel);

    const CandidateFit& best = sel.best();
    payload["normality"] = normality_json(best.fit);
    add_fit_warnings(best.fit, &warnings);
    if (best.perfect_fit) {
      warnings.push_back("winning block reproduces y exactly; information "
                         "criteria cannot rank it");
    }
    if (!sel.failures.empty()) {
      warnings.push_back(std::to_string(sel.failures.size()) +
                         " candidate block(s) failed to fit");
    }
    if (sel.candidates.size() >= 2 && opts.fma_top == 0 &&
        report_single_best_rule(sel) == SelectionAdvice::RecommendFma) {
      warnings.push_back("runner-up within 6 BIC points of the winner; "
                         "consider model averaging (--fma-top)");
    }
    if (opts.fma_top > 0) {
      const FmaResult avg =
          fma(sel, prediction_estimand(*opts.x_star), opts.fma_top);
      payload["fma"] = fma_to_json(avg, sel);
    }
    if (opts.x_star) {
      payload["prediction"] = prediction_json(best.fit, *opts.x_star);
    }
    if (opts.diagnose_formb) {
      payload["formb"] = formb_json(best.fit, track, &warnings);
    }
  } else {
    const FpBlock block = parse_powers(opts.powers, track);
    const ShiftResult sr = shift_domain(d.x, shift_req);
    const ModelFrame frame =
        make_frame(d.x, block, sr.offset, d.cov_ptr(), &d.cov_names);
    const FitResult fit =
        fit_with(estimator_from_name(opts.estimator), frame, d.y, solver);
    payload["fit"] = fit_to_json(fit);
    payload["normality"] = normality_json(fit);
    add_fit_warnings(fit, &warnings);
    if (opts.x_star) payload["prediction"] = prediction_json(fit, *opts.x_star);
    if (opts.diagnose_formb) {
      payload["formb"] = formb_json(fit, track, &warnings);
    }
  }

  return emit_report("fit", opts.seed, fit_config_echo(opts), payload,
                     warnings, opts.out);
}

// --- bootstrap -------------------------------------------------------------------

struct BootOpts {
  DataOpts data;
  std::string powers;
  std::string estimators = "ols,pmm2";
  int B = 500;
  bool stability = false;
  std::string estimator = "pmm2";  // sweep estimator for --selection-stability
  std::string track = "positive";
  std::string mode = "subsets";
  int max_terms = 4;
  bool shift = false;
  std::optional<double> shift_by;
  std::uint64_t seed = 1;
  int threads = default_thread_count();
  std::string out;
  std::string csv;
  std::string config;
};

// Coefficient table (or the selection-frequency table when stability ran).
void write_bootstrap_csv(const std::string& path, const BootstrapResult& boot,
                         const SelectionStability* stability) {
  if (stability) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& r : stability->rows) {
      rows.push_back({r.block_label, std::to_string(r.count),
                      csv_num(r.frequency)});
    }
    write_table(path, {"block", "count", "frequency"}, rows);
    return;
  }
  std::vector<std::vector<std::string>> rows;
  for (const auto& est : boot.estimators) {
    const std::string name = estimator_name(est.estimator);
    for (Eigen::Index j = 0; j < est.beta_full.size(); ++j) {
      rows.push_back({name, boot.column_labels[static_cast<std::size_t>(j)],
                      csv_num(est.beta_full[j]), csv_num(est.se_asymptotic[j]),
                      csv_num(est.se_boot[j]),
                      csv_num(est.ci95_percentile[static_cast<std::size_t>(j)].first),
                      csv_num(est.ci95_percentile[static_cast<std::size_t>(j)].second)});
    }
  }
  write_table(path, {"estimator", "term", "beta", "se_asymptotic", "se_boot",
                     "ci95_low", "ci95_high"},
              rows);
}

int cmd_bootstrap(const BootOpts& opts) {
  std::vector<std::string> warnings;
  const LoadedData d = load_data(opts.data, &warnings);
  const Track track = parse_track(opts.track);
  const FpBlock block = parse_powers(opts.powers, track);
  const std::optional<double> shift_req =
      resolve_shift(opts.shift, opts.shift_by, d.x);

  BootstrapConfig bc;
  bc.B = opts.B;
  bc.seed = opts.seed;
  bc.threads = opts.threads;
  bc.offset = shift_req;
  const std::vector<EstimatorKind> kinds = parse_estimators(opts.estimators);

  const BootstrapResult boot =
      bootstrap_fixed_model(d.x, d.y, d.cov_ptr(), block, kinds, bc);
  Json payload{{"kind", "bootstrap"}, {"n", static_cast<int>(d.x.size())},
               {"dropped_rows", d.dropped}, {"bootstrap", bootstrap_to_json(boot)}};
  if (boot.n_failed > 0) {
    warnings.push_back(std::to_string(boot.n_failed) +
                       " bootstrap replicate(s) failed and were dropped");
  }

  std::optional<SelectionStability> stability;
  if (opts.stability) {
    SweepConfig sc;
    sc.track = track;
    sc.mode = parse_mode(opts.mode);
    sc.max_terms = opts.max_terms;
    sc.estimator = estimator_from_name(opts.estimator);
    sc.offset = shift_req;
    stability = bootstrap_selection_stability(d.x, d.y, d.cov_ptr(), sc,
                                              opts.B, opts.seed, opts.threads);
    payload["stability"] = stability_to_json(*stability);
    if (stability->n_failed > 0) {
      warnings.push_back(std::to_string(stability->n_failed) +
                         " selection replicate(s) failed and were dropped");
    }
  }
  if (!opts.csv.empty()) {
    write_bootstrap_csv(opts.csv, boot,
                        stability ? &*stability : nullptr);
  }

  Json echo{{"data", opts.data.path},
            {"x", opts.data.x_col},
            {"y", opts.data.y_col},
            {"powers", opts.powers},
            {"estimators", opts.estimators},
            {"B", opts.B},
            {"seed", opts.seed},
            {"threads", opts.threads}};
  if (!opts.data.covariates.empty()) echo["covariates"] = opts.data.covariates;
  if (opts.stability) {
    echo["selection_stability"] = true;
    echo["track"] = opts.track;
    echo["mode"] = opts.mode;
    echo["max_terms"] = opts.max_terms;
    echo["estimator"] = opts.estimator;
  }
  if (opts.shift) echo["shift"] = true;
  if (opts.shift_by) echo["shift_by"] = *opts.shift_by;

  return emit_report("bootstrap", opts.seed, echo, payload, warnings,
                     opts.out);
}

// --- simulate --------------------------------------------------------------------

struct SimOpts {
  std::string experiment;
  std::string laws;
  std::string n_list;
  int replications = 0;  // 0 = take from profile
  std::string top_j = "3,5";
  double x_star = 2.0;
  std::string profile = "desk";
  std::uint64_t seed = 1;
  int threads = default_thread_count();
  std::string out;
  std::string csv;
  std::string config;
};

std::string canonical_experiment(const std::string& name) {
  if (name == "matched" || name == "matched_basis") return "matched_basis";
  if (name == "fma") return "fma";
  if (name == "symmetric") return "symmetric";
  if (name == "timing" || name == "timings") return "timings";
  throw UnknownExperiment(
      "unknown experiment '" + name +
      "' (expected matched_basis|fma|symmetric|timings)");
}

void write_matched_csv(const std::string& path,
                       const std::vector<MatchedCell>& cells) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : cells) {
    rows.push_back({c.law, std::to_string(c.n), std::to_string(c.usable),
                    csv_num(c.g2_analytic), csv_num(c.g2_robust),
                    csv_num(c.reduction_pct), csv_num(c.coverage_ols),
                    csv_num(c.coverage_pmm), csv_num(c.pred_efficiency)});
  }
  write_table(path,
              {"law", "n", "usable", "g2_theoretical", "g2_robust",
               "reduction_pct", "coverage_ols", "coverage_pmm",
               "pred_efficiency"},
              rows);
}

void write_fma_csv(const std::string& path, const std::vector<FmaCell>& cells) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : cells) {
    for (const auto& v : c.variants) {
      rows.push_back({c.law, std::to_string(c.n), v.variant, csv_num(v.bias),
                      csv_num(v.variance), csv_num(v.mse), csv_num(v.coverage),
                      csv_num(v.mean_ci_width)});
    }
  }
  write_table(path,
              {"law", "n", "variant", "bias", "variance", "mse", "coverage",
               "mean_ci_width"},
              rows);
}

void write_are_csv(const std::string& path, const std::vector<AreCell>& cells) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& c : cells) {
    rows.push_back({c.law, c.estimator, std::to_string(c.n),
                    std::to_string(c.usable), csv_num(c.are), csv_num(c.are_se),
                    csv_num(c.are_ci_low), csv_num(c.are_ci_high)});
  }
  write_table(path,
              {"law", "estimator", "n", "usable", "are", "are_se", "ci95_low",
               "ci95_high"},
              rows);
}

void write_timings_csv(const std::string& path,
                       const std::vector<TimingSummary>& rows_in) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& t : rows_in) {
    rows.push_back({t.estimator, std::to_string(t.n), std::to_string(t.repeats),
                    csv_num(t.median_ms), csv_num(t.sd_ms)});
  }
  write_table(path, {"estimator", "n", "repeats", "median_ms", "sd_ms"}, rows);
}

struct SimProfile {
  std::vector<int> matched_grid;
  int matched_m;
  std::vector<int> fma_grid;
  int fma_m;
  std::vector<int> sym_grid;
  int sym_m;
  std::vector<int> timing_grid;
  int timing_repeats, timing_warmup;
};

SimProfile profile_for(const std::string& name) {
  if (name == "desk") {
    return {{500}, 300, {200}, 200, {200}, 2000, {100, 1000}, 30, 10};
  }
  if (name == "paper") {
    return {{100, 200, 500}, 1000, {100, 200, 500}, 500,
            {200},           10000, {100, 200, 500, 1000}, 60, 10};
  }
  throw InvalidConfig("unknown profile '" + name + "' (expected desk|paper)");
}

int cmd_simulate(const SimOpts& opts) {
  const std::string experiment = canonical_experiment(opts.experiment);
  const SimProfile prof = profile_for(opts.profile);
  std::vector<std::string> warnings;

  McDesign design;
  design.seed = opts.seed;
  design.threads = opts.threads;
  design.x_star = opts.x_star;

  Json results;
  std::string default_laws;
  if (experiment == "matched_basis") {
    default_laws = "gaussian,beta(2,5),gamma(3),exponential,lognormal(1)";
    design.n_grid = prof.matched_grid;
    design.replications = prof.matched_m;
  } else if (experiment == "fma") {
    default_laws = "gamma(3),lognormal(1)";
    design.n_grid = prof.fma_grid;
    design.replications = prof.fma_m;
  } else if (experiment == "symmetric") {
    default_laws = "uniform(-1,1),laplace,gen_gaussian(0.5)";
    design.n_grid = prof.sym_grid;
    design.replications = prof.sym_m;
  } else {
    design.n_grid = prof.timing_grid;
  }
  if (!opts.n_list.empty()) design.n_grid = parse_int_list(opts.n_list, "n");
  if (opts.replications > 0) design.replications = opts.replications;
  const std::string law_spec = opts.laws.empty() ? default_laws : opts.laws;
  if (!law_spec.empty()) design.laws = parse_laws(law_spec);

  if (experiment == "matched_basis") {
    const auto cells = run_matched_basis_experiment(design);
    for (const auto& c : cells) {
      if (c.usable < c.replications) {
        warnings.push_back("cell " + c.law + " n=" + std::to_string(c.n) +
                           ": " + std::to_string(c.replications - c.usable) +
                           " replicate(s) failed");
      }
    }
    results = matched_cells_to_json(cells);
    if (!opts.csv.empty()) write_matched_csv(opts.csv, cells);
  } else if (experiment == "fma") {
    const auto cells =
        run_fma_experiment(design, parse_int_list(opts.top_j, "top_j"));
    for (const auto& c : cells) {
      if (c.usable < c.replications) {
        warnings.push_back("cell " + c.law + " n=" + std::to_string(c.n) +
                           ": " + std::to_string(c.replications - c.usable) +
                           " replicate(s) failed");
      }
    }
    results = fma_cells_to_json(cells);
    if (!opts.csv.empty()) write_fma_csv(opts.csv, cells);
  } else if (experiment == "symmetric") {
    const auto cells = run_symmetric_degradation_experiment(design);
    for (const auto& c : cells) {
      if (c.usable < c.replications) {
        warnings.push_back("cell " + c.law + "/" + c.estimator +
                           " n=" + std::to_string(c.n) + ": " +
                           std::to_string(c.replications - c.usable) +
                           " replicate(s) failed");
      }
    }
    results = are_cells_to_json(cells);
    if (!opts.csv.empty()) write_are_csv(opts.csv, cells);
  } else {
    const auto timings = capture_timings(
        design.n_grid, prof.timing_repeats, prof.timing_warmup, opts.seed);
    results = timings_to_json(timings);
    if (!opts.csv.empty()) write_timings_csv(opts.csv, timings);
  }

  Json laws_echo = Json::array();
  for (const auto& law : design.laws) laws_echo.push_back(law.label());
  Json design_echo{{"laws", laws_echo},
                   {"n_grid", design.n_grid},
                   {"replications", design.replications},
                   {"x_star", design.x_star},
                   {"seed", design.seed}};
  if (experiment == "timings") {
    design_echo = Json{{"n_grid", design.n_grid},
                       {"repeats", prof.timing_repeats},
                       {"warmup", prof.timing_warmup},
                       {"seed", design.seed}};
  }

  const Json payload{{"kind", "simulate"},
                     {"experiment", experiment},
                     {"design", design_echo},
                     {"results", results}};
  Json echo{{"experiment", experiment},
            {"profile", opts.profile},
            {"seed", opts.seed},
            {"threads", opts.threads},
            {"x_star", opts.x_star}};
  if (!opts.laws.empty()) echo["laws"] = opts.laws;
  if (!opts.n_list.empty()) echo["n"] = opts.n_list;
  if (opts.replications > 0) echo["replications"] = opts.replications;
  if (experiment == "fma") echo["top_j"] = opts.top_j;

  return emit_report("simulate", opts.seed, echo, payload, warnings, opts.out);
}

// --- wiring ----------------------------------------------------------------------

void add_data_options(CLI::App* cmd, DataOpts* d) {
  cmd->add_option("--data", d->path, "CSV file with a header row")->required();
  cmd->add_option("--x", d->x_col, "covariate column (default x)");
  cmd->add_option("--y", d->y_col, "response column (default y)");
  cmd->add_option("--covariates", d->covariates,
                  "comma-separated extra linear columns");
}

void bind_data_config(ConfigBinder* bind, DataOpts* d) {
  bind->add("data", "--data", [d](const Json& v) { d->path = v.get<std::string>(); });
  bind->add("x", "--x", [d](const Json& v) { d->x_col = v.get<std::string>(); });
  bind->add("y", "--y", [d](const Json& v) { d->y_col = v.get<std::string>(); });
  bind->add("covariates", "--covariates",
            [d](const Json& v) { d->covariates = v.get<std::string>(); });
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Fractional polynomial regression with second-order "
               "moment-corrected estimation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pmmfp 1.0.0");

  FitOpts fit_opts;
  BootOpts boot_opts;
  SimOpts sim_opts;

  CLI::App* fit_cmd = app.add_subcommand("fit", "Fit one block or sweep");
  add_data_options(fit_cmd, &fit_opts.data);
  fit_cmd->add_option("--powers", fit_opts.powers,
                      "comma-separated powers, e.g. 0.5,2 (twice = repeated)");
  fit_cmd->add_flag("--auto", fit_opts.auto_sweep,
                    "enumerate blocks and rank by BIC");
  fit_cmd->add_option("--estimator", fit_opts.estimator, "ols|pmm2|huber");
  fit_cmd->add_option("--track", fit_opts.track, "positive|full");
  fit_cmd->add_option("--mode", fit_opts.mode, "subsets|ra2");
  fit_cmd->add_option("--max-terms", fit_opts.max_terms,
                      "block size cap for --auto")
      ->check(CLI::Range(1, 4));
  fit_cmd->add_option("--x-star", fit_opts.x_star,
                      "report the mean response at this x");
  fit_cmd->add_option("--fma-top", fit_opts.fma_top,
                      "average the top J candidates (needs --auto, --x-star)");
  fit_cmd->add_flag("--diagnose-formb", fit_opts.diagnose_formb,
                    "attach the score-basis efficiency diagnostic");
  fit_cmd->add_flag("--shift", fit_opts.shift, "auto-shift x to positive");
  auto* fit_shift_by = fit_cmd->add_option("--shift-by", fit_opts.shift_by,
                                           "shift x by this exact offset");
  fit_cmd->get_option("--shift")->excludes(fit_shift_by);
  fit_cmd->add_option("--seed", fit_opts.seed, "RNG seed");
  fit_cmd->add_option("--threads", fit_opts.threads,
                      "worker threads (or PMMFP_THREADS)");
  fit_cmd->add_option("--out", fit_opts.out, "write the JSON report here");
  fit_cmd->add_option("--config", fit_opts.config, "JSON config file");

  ConfigBinder fit_bind(fit_cmd);
  bind_data_config(&fit_bind, &fit_opts.data);
  fit_bind.add("powers", "--powers",
               [&](const Json& v) { fit_opts.powers = v.get<std::string>(); });
  fit_bind.add("auto", "--auto",
               [&](const Json& v) { fit_opts.auto_sweep = v.get<bool>(); });
  fit_bind.add("estimator", "--estimator",
               [&](const Json& v) { fit_opts.estimator = v.get<std::string>(); });
  fit_bind.add("track", "--track",
               [&](const Json& v) { fit_opts.track = v.get<std::string>(); });
  fit_bind.add("mode", "--mode",
               [&](const Json& v) { fit_opts.mode = v.get<std::string>(); });
  fit_bind.add("max_terms", "--max-terms",
               [&](const Json& v) { fit_opts.max_terms = v.get<int>(); });
  fit_bind.add("x_star", "--x-star",
               [&](const Json& v) { fit_opts.x_star = v.get<double>(); });
  fit_bind.add("fma_top", "--fma-top",
               [&](const Json& v) { fit_opts.fma_top = v.get<int>(); });
  fit_bind.add("diagnose_formb", "--diagnose-formb",
               [&](const Json& v) { fit_opts.diagnose_formb = v.get<bool>(); });
  fit_bind.add("shift", "--shift",
               [&](const Json& v) { fit_opts.shift = v.get<bool>(); });
  fit_bind.add("shift_by", "--shift-by",
               [&](const Json& v) { fit_opts.shift_by = v.get<double>(); });
  fit_bind.add("seed", "--seed",
               [&](const Json& v) { fit_opts.seed = v.get<std::uint64_t>(); });
  fit_bind.add("threads", "--threads",
               [&](const Json& v) { fit_opts.threads = v.get<int>(); });
  fit_bind.add("out", "--out",
               [&](const Json& v) { fit_opts.out = v.get<std::string>(); });

  CLI::App* boot_cmd =
      app.add_subcommand("bootstrap", "Pairs bootstrap of a fixed block");
  add_data_options(boot_cmd, &boot_opts.data);
  boot_cmd->add_option("--powers", boot_opts.powers, "block to refit")
      ->required();
  boot_cmd->add_option("--estimators", boot_opts.estimators,
                       "comma-separated, e.g. ols,pmm2");
  boot_cmd->add_option("--B", boot_opts.B, "bootstrap replicates (>= 100)");
  boot_cmd->add_flag("--selection-stability", boot_opts.stability,
                     "also tabulate the winning block per replicate");
  boot_cmd->add_option("--estimator", boot_opts.estimator,
                       "sweep estimator for --selection-stability");
  boot_cmd->add_option("--track", boot_opts.track, "positive|full");
  boot_cmd->add_option("--mode", boot_opts.mode, "subsets|ra2");
  boot_cmd->add_option("--max-terms", boot_opts.max_terms,
                       "block size cap for the stability sweep")
      ->check(CLI::Range(1, 4));
  boot_cmd->add_flag("--shift", boot_opts.shift, "auto-shift x to positive");
  auto* boot_shift_by = boot_cmd->add_option(
      "--shift-by", boot_opts.shift_by, "shift x by this exact offset");
  boot_cmd->get_option("--shift")->excludes(boot_shift_by);
  boot_cmd->add_option("--seed", boot_opts.seed, "RNG seed");
  boot_cmd->add_option("--threads", boot_opts.threads,
                       "worker threads (or PMMFP_THREADS)");
  boot_cmd->add_option("--out", boot_opts.out, "write the JSON report here");
  boot_cmd->add_option("--csv", boot_opts.csv,
                       "also write a CSV table (coefficients, or the "
                       "selection-frequency table under "
                       "--selection-stability)");
  boot_cmd->add_option("--config", boot_opts.config, "JSON config file");

  ConfigBinder boot_bind(boot_cmd);
  bind_data_config(&boot_bind, &boot_opts.data);
  boot_bind.add("powers", "--powers",
                [&](const Json& v) { boot_opts.powers = v.get<std::string>(); });
  boot_bind.add("estimators", "--estimators", [&](const Json& v) {
    boot_opts.estimators = v.get<std::string>();
  });
  boot_bind.add("B", "--B", [&](const Json& v) { boot_opts.B = v.get<int>(); });
  boot_bind.add("selection_stability", "--selection-stability",
                [&](const Json& v) { boot_opts.stability = v.get<bool>(); });
  boot_bind.add("estimator", "--estimator", [&](const Json& v) {
    boot_opts.estimator = v.get<std::string>();
  });
  boot_bind.add("track", "--track",
                [&](const Json& v) { boot_opts.track = v.get<std::string>(); });
  boot_bind.add("mode", "--mode",
                [&](const Json& v) { boot_opts.mode = v.get<std::string>(); });
  boot_bind.add("max_terms", "--max-terms",
                [&](const Json& v) { boot_opts.max_terms = v.get<int>(); });
  boot_bind.add("shift", "--shift",
                [&](const Json& v) { boot_opts.shift = v.get<bool>(); });
  boot_bind.add("shift_by", "--shift-by",
                [&](const Json& v) { boot_opts.shift_by = v.get<double>(); });
  boot_bind.add("seed", "--seed", [&](const Json& v) {
    boot_opts.seed = v.get<std::uint64_t>();
  });
  boot_bind.add("threads", "--threads",
                [&](const Json& v) { boot_opts.threads = v.get<int>(); });
  boot_bind.add("out", "--out",
                [&](const Json& v) { boot_opts.out = v.get<std::string>(); });
  boot_bind.add("csv", "--csv",
                [&](const Json& v) { boot_opts.csv = v.get<std::string>(); });

  CLI::App* sim_cmd =
      app.add_subcommand("simulate", "Monte Carlo studies and timings");
  sim_cmd
      ->add_option("--experiment", sim_opts.experiment,
                   "matched_basis|fma|symmetric|timings")
      ->required();
  sim_cmd->add_option("--laws", sim_opts.laws,
                      "comma-separated error laws, e.g. gamma(3),laplace");
  sim_cmd->add_option("--n", sim_opts.n_list, "comma-separated sample sizes");
  sim_cmd->add_option("--replications", sim_opts.replications,
                      "Monte Carlo replicates per cell");
  sim_cmd->add_option("--top-j", sim_opts.top_j,
                      "averaging depths for the fma experiment");
  sim_cmd->add_option("--x-star", sim_opts.x_star,
                      "prediction point for matched/fma");
  sim_cmd->add_option("--profile", sim_opts.profile,
                      "desk (quick) or paper (full size)");
  sim_cmd->add_option("--seed", sim_opts.seed, "RNG seed");
  sim_cmd->add_option("--threads", sim_opts.threads,
                      "worker threads (or PMMFP_THREADS)");
  sim_cmd->add_option("--out", sim_opts.out, "write the JSON report here");
  sim_cmd->add_option("--csv", sim_opts.csv,
                      "also write the summary table as CSV");
  sim_cmd->add_option("--config", sim_opts.config, "JSON config file");

  ConfigBinder sim_bind(sim_cmd);
  sim_bind.add("experiment", "--experiment", [&](const Json& v) {
    sim_opts.experiment = v.get<std::string>();
  });
  sim_bind.add("laws", "--laws",
               [&](const Json& v) { sim_opts.laws = v.get<std::string>(); });
  sim_bind.add("n", "--n",
               [&](const Json& v) { sim_opts.n_list = v.get<std::string>(); });
  sim_bind.add("replications", "--replications", [&](const Json& v) {
    sim_opts.replications = v.get<int>();
  });
  sim_bind.add("top_j", "--top-j",
               [&](const Json& v) { sim_opts.top_j = v.get<std::string>(); });
  sim_bind.add("x_star", "--x-star",
               [&](const Json& v) { sim_opts.x_star = v.get<double>(); });
  sim_bind.add("profile", "--profile",
               [&](const Json& v) { sim_opts.profile = v.get<std::string>(); });
  sim_bind.add("seed", "--seed", [&](const Json& v) {
    sim_opts.seed = v.get<std::uint64_t>();
  });
  sim_bind.add("threads", "--threads",
               [&](const Json& v) { sim_opts.threads = v.get<int>(); });
  sim_bind.add("out", "--out",
               [&](const Json& v) { sim_opts.out = v.get<std::string>(); });
  sim_bind.add("csv", "--csv",
               [&](const Json& v) { sim_opts.csv = v.get<std::string>(); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 64;
  }

  try {
    if (fit_cmd->parsed()) {
      if (!fit_opts.config.empty()) fit_bind.apply(fit_opts.config);
      if (fit_opts.threads < 1) throw InvalidConfig("threads must be positive");
      return cmd_fit(fit_opts);
    }
    if (boot_cmd->parsed()) {
      if (!boot_opts.config.empty()) boot_bind.apply(boot_opts.config);
      if (boot_opts.threads < 1) throw InvalidConfig("threads must be positive");
      return cmd_bootstrap(boot_opts);
    }
    if (!sim_opts.config.empty()) sim_bind.apply(sim_opts.config);
    if (sim_opts.threads < 1) throw InvalidConfig("threads must be positive");
    return cmd_simulate(sim_opts);
  } catch (const InvalidConfig& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 64;
  } catch (const UnknownExperiment& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 64;
  } catch (const InvalidPower& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 64;
  } catch (const InvalidBlock& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 64;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace pmmfp
