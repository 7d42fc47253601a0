// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#include "pmmfp/report.hpp"

#include <cmath>
#include <ctime>
#include <fstream>

#include "pmmfp/errors.hpp"

namespace pmmfp {
namespace {

Json vec_to_json(const Vector& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Json vec_to_json(const std::vector<double>& v) {
  return Json(v);
}

Json ci_list_to_json(const std::vector<std::pair<double, double>>& cis) {
  Json a = Json::array();
  for (const auto& ci : cis) a.push_back(Json::array({ci.first, ci.second}));
  return a;
}

std::string json_type_name(const Json& j) {
  if (j.is_object()) return "object";
  if (j.is_array()) return "array";
  if (j.is_string()) return "string";
  if (j.is_boolean()) return "boolean";
  if (j.is_null()) return "null";
  if (j.is_number_integer() || j.is_number_unsigned()) return "integer";
  return "number";
}

bool type_matches(const std::string& wanted, const Json& inst) {
  const std::string actual = json_type_name(inst);
  if (wanted == actual) return true;
  return wanted == "number" && actual == "integer";
}

void validate_node(const Json& schema, const Json& inst,
                   const std::string& path, std::vector<std::string>& out);

void validate_one_of(const Json& alternatives, const Json& inst,
                     const std::string& path, std::vector<std::string>& out) {
  int matches = 0;
  for (const Json& alt : alternatives) {
    std::vector<std::string> probe;
    validate_node(alt, inst, path, probe);
    if (probe.empty()) ++matches;
  }
  if (matches != 1) {
    out.push_back(path + ": matches " + std::to_string(matches) +
                  " of the oneOf alternatives, expected exactly 1");
  }
}

void validate_node(const Json& schema, const Json& inst,
                   const std::string& path, std::vector<std::string>& out) {
  if (!schema.is_object()) return;

  if (auto it = schema.find("type"); it != schema.end()) {
    bool ok = false;
    if (it->is_array()) {
      for (const Json& t : *it) ok = ok || type_matches(t.get<std::string>(), inst);
    } else {
      ok = type_matches(it->get<std::string>(), inst);
    }
    if (!ok) {
      out.push_back(path + ": has type " + json_type_name(inst) +
                    ", expected " + it->dump());
      return;  // further checks assume the type fits
    }
  }

  if (auto it = schema.find("enum"); it != schema.end()) {
    bool found = false;
    for (const Json& v : *it) found = found || (v == inst);
    if (!found) out.push_back(path + ": value " + inst.dump() + " not in enum");
  }

  if (auto it = schema.find("minimum"); it != schema.end()) {
    if (inst.is_number() && inst.get<double>() < it->get<double>()) {
      out.push_back(path + ": " + inst.dump() + " below minimum " + it->dump());
    }
  }

  if (auto it = schema.find("oneOf"); it != schema.end()) {
    validate_one_of(*it, inst, path, out);
  }

  if (inst.is_object()) {
    if (auto it = schema.find("required"); it != schema.end()) {
      for (const Json& key : *it) {
        if (!inst.contains(key.get<std::string>())) {
          out.push_back(path + ": missing required key '" +
                        key.get<std::string>() + "'");
        }
      }
    }
    const auto props = schema.find("properties");
    if (props != schema.end()) {
      for (auto it = props->begin(); it != props->end(); ++it) {
        if (inst.contains(it.key())) {
          validate_node(it.value(), inst.at(it.key()), path + "/" + it.key(),
                        out);
        }
      }
    }
    if (auto it = schema.find("additionalProperties");
        it != schema.end() && it->is_boolean() && !it->get<bool>()) {
      for (auto mem = inst.begin(); mem != inst.end(); ++mem) {
        if (props == schema.end() || !props->contains(mem.key())) {
          out.push_back(path + ": unexpected key '" + mem.key() + "'");
        }
      }
    }
  }

  if (inst.is_array()) {
    if (auto it = schema.find("items"); it != schema.end()) {
      for (std::size_t i = 0; i < inst.size(); ++i) {
        validate_node(*it, inst[i], path + "/" + std::to_string(i), out);
      }
    }
  }
}

}  // namespace

std::string current_timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

ReportEnvelope make_envelope(const std::string& command, std::uint64_t seed) {
  ReportEnvelope env;
  env.timestamp = current_timestamp_utc();
  env.seed = seed;
  env.command = command;
  return env;
}

Json envelope_to_json(const ReportEnvelope& env) {
  return Json{{"schema_version", env.schema_version},
              {"timestamp", env.timestamp},
              {"seed", env.seed},
              {"command", env.command},
              {"config", env.config},
              {"payload", env.payload},
              {"warnings", env.warnings}};
}

ReportEnvelope envelope_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidConfig("report envelope must be an object");
  for (const char* key : {"schema_version", "timestamp", "seed", "command",
                          "config", "payload", "warnings"}) {
    if (!j.contains(key)) {
      throw InvalidConfig(std::string("report envelope is missing '") + key +
                          "'");
    }
  }
  ReportEnvelope env;
  try {
    env.schema_version = j.at("schema_version").get<std::string>();
    env.timestamp = j.at("timestamp").get<std::string>();
    env.seed = j.at("seed").get<std::uint64_t>();
    env.command = j.at("command").get<std::string>();
    env.config = j.at("config");
    env.payload = j.at("payload");
    env.warnings = j.at("warnings").get<std::vector<std::string>>();
  } catch (const Json::exception& e) {
    throw InvalidConfig(std::string("malformed report envelope: ") + e.what());
  }
  return env;
}

Json cumulants_to_json(const ResidualCumulants& c) {
  return Json{{"sigma2", c.sigma2},   {"gamma3", c.gamma3},
              {"gamma4", c.gamma4},   {"a", c.a},
              {"g2", c.g2},           {"degraded", c.degraded},
              {"degenerate", c.degenerate}};
}

Json fit_to_json(const FitResult& fit) {
  Json coef = Json::array();
  for (Eigen::Index i = 0; i < fit.beta.size(); ++i) {
    coef.push_back(Json{{"term", fit.column_labels[i]},
                        {"estimate", fit.beta[i]},
                        {"se", fit.se_asymptotic[i]}});
  }
  return Json{{"estimator", estimator_name(fit.estimator)},
              {"block", fit.block.label()},
              {"coefficients", coef},
              {"n", fit.n()},
              {"rss", fit.rss},
              {"converged", fit.converged},
              {"iterations", fit.iterations},
              {"used_ridge", fit.used_ridge},
              {"applied_offset", fit.applied_offset},
              {"cumulants", cumulants_to_json(fit.cumulants)}};
}

Json correlant_to_json(const CorrelantReport& report) {
  Json basis = Json::array();
  for (const auto& fn : report.basis) basis.push_back(fn.label());
  Json j{{"basis", basis},
         {"tau", report.tau},
         {"g_hat", report.g_hat},
         {"g_hat_tau_tenth", report.g_hat_tau_tenth},
         {"b", vec_to_json(report.b)},
         {"condition_number", report.spectral.condition_infinite
                                  ? Json()
                                  : Json(report.spectral.condition_number)},
         {"condition_infinite", report.spectral.condition_infinite},
         {"singular_values", vec_to_json(report.spectral.singular_values)},
         {"stable", report.stable}};
  j["inverse_moment"] = Json{{"evaluated", report.inverse_moment.evaluated},
                             {"mean_inv_sq", report.inverse_moment.mean_inv_sq},
                             {"tail_fraction", report.inverse_moment.tail_fraction},
                             {"admissible", report.inverse_moment.admissible}};
  return j;
}

Json selection_to_json(const SelectionResult& sel) {
  Json candidates = Json::array();
  const double best_bic = sel.best().bic;
  for (int idx : sel.ranking) {
    const CandidateFit& c = sel.candidates[static_cast<std::size_t>(idx)];
    candidates.push_back(
        Json{{"block", c.fit.block.label()},
             {"bic", c.bic},
             {"delta_bic", c.perfect_fit ? 0.0 : c.bic - best_bic},
             {"perfect_fit", c.perfect_fit},
             {"converged", c.fit.converged},
             {"g2", c.fit.cumulants.g2}});
  }
  Json failures = Json::array();
  for (const auto& f : sel.failures) {
    failures.push_back(Json{{"block", f.block_label}, {"reason", f.reason}});
  }
  Json j{{"offset", sel.offset},
         {"candidates", candidates},
         {"failures", failures},
         {"best", fit_to_json(sel.best().fit)},
         {"delta_bic_runner_up", sel.delta_bic_runner_up()}};
  if (sel.candidates.size() >= 2) {
    j["advice"] = report_single_best_rule(sel) == SelectionAdvice::SingleBestOk
                      ? "single_best_ok"
                      : "recommend_fma";
  }
  return j;
}

Json fma_to_json(const FmaResult& fma, const SelectionResult& sel) {
  Json models = Json::array();
  for (std::size_t t = 0; t < fma.candidate_indices.size(); ++t) {
    const auto& c =
        sel.candidates[static_cast<std::size_t>(fma.candidate_indices[t])];
    models.push_back(Json{{"block", c.fit.block.label()},
                          {"bic", c.bic},
                          {"weight", fma.weights[t]}});
  }
  return Json{{"theta", fma.theta},
              {"variance", fma.variance},
              {"ci95", Json::array({fma.ci95.first, fma.ci95.second})},
              {"models", models}};
}

Json bootstrap_to_json(const BootstrapResult& boot) {
  Json estimators = Json::array();
  for (const auto& e : boot.estimators) {
    estimators.push_back(Json{{"estimator", estimator_name(e.estimator)},
                              {"beta_full", vec_to_json(e.beta_full)},
                              {"se_asymptotic", vec_to_json(e.se_asymptotic)},
                              {"se_boot", vec_to_json(e.se_boot)},
                              {"ci95_percentile",
                               ci_list_to_json(e.ci95_percentile)}});
  }
  Json j{{"B", boot.B},
         {"n_failed", boot.n_failed},
         {"seed", boot.seed},
         {"offset", boot.offset},
         {"terms", boot.column_labels},
         {"estimators", estimators}};
  if (boot.variance_ratio) j["variance_ratio"] = vec_to_json(*boot.variance_ratio);
  return j;
}

Json stability_to_json(const SelectionStability& stab) {
  Json rows = Json::array();
  for (const auto& r : stab.rows) {
    rows.push_back(Json{{"block", r.block_label},
                        {"count", r.count},
                        {"frequency", r.frequency}});
  }
  return Json{{"B", stab.B}, {"n_failed", stab.n_failed}, {"winners", rows}};
}

Json matched_cells_to_json(const std::vector<MatchedCell>& cells) {
  Json a = Json::array();
  for (const auto& c : cells) {
    a.push_back(Json{{"law", c.law},
                     {"n", c.n},
                     {"replications", c.replications},
                     {"usable", c.usable},
                     {"slope_bias_ols", c.slope_bias_ols},
                     {"slope_bias_pmm", c.slope_bias_pmm},
                     {"slope_var_ols", c.slope_var_ols},
                     {"slope_var_pmm", c.slope_var_pmm},
                     {"slope_mse_ols", c.slope_mse_ols},
                     {"slope_mse_pmm", c.slope_mse_pmm},
                     {"g2_robust", c.g2_robust},
                     {"g2_variance", c.g2_variance},
                     {"g2_analytic", c.g2_analytic},
                     {"reduction_pct", c.reduction_pct},
                     {"coverage_ols", c.coverage_ols},
                     {"coverage_pmm", c.coverage_pmm},
                     {"pred_mse_ols", c.pred_mse_ols},
                     {"pred_mse_pmm", c.pred_mse_pmm},
                     {"pred_efficiency", c.pred_efficiency},
                     {"median_fit_ms_ols", c.median_fit_ms_ols},
                     {"median_fit_ms_pmm", c.median_fit_ms_pmm}});
  }
  return a;
}

Json fma_cells_to_json(const std::vector<FmaCell>& cells) {
  Json a = Json::array();
  for (const auto& c : cells) {
    Json variants = Json::array();
    for (const auto& v : c.variants) {
      variants.push_back(Json{{"variant", v.variant},
                              {"coverage", v.coverage},
                              {"mean_ci_width", v.mean_ci_width},
                              {"bias", v.bias},
                              {"variance", v.variance},
                              {"mse", v.mse}});
    }
    a.push_back(Json{{"law", c.law},
                     {"n", c.n},
                     {"replications", c.replications},
                     {"usable", c.usable},
                     {"true_mean", c.true_mean},
                     {"variants", variants}});
  }
  return a;
}

Json are_cells_to_json(const std::vector<AreCell>& cells) {
  Json a = Json::array();
  for (const auto& c : cells) {
    a.push_back(Json{{"law", c.law},
                     {"estimator", c.estimator},
                     {"n", c.n},
                     {"replications", c.replications},
                     {"usable", c.usable},
                     {"are", c.are},
                     {"are_se", c.are_se},
                     {"are_ci", Json::array({c.are_ci_low, c.are_ci_high})}});
  }
  return a;
}

Json timings_to_json(const std::vector<TimingSummary>& timings) {
  Json a = Json::array();
  for (const auto& t : timings) {
    a.push_back(Json{{"estimator", t.estimator},
                     {"n", t.n},
                     {"repeats", t.repeats},
                     {"median_ms", t.median_ms},
                     {"sd_ms", t.sd_ms}});
  }
  return a;
}

std::vector<std::string> schema_validate(const Json& schema,
                                         const Json& instance) {
  std::vector<std::string> problems;
  validate_node(schema, instance, "#", problems);
  return problems;
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InvalidConfig("'" + path + "' is not valid JSON: " + e.what());
  }
}

}  // namespace pmmfp
