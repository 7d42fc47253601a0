// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#include <cctype>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "pmmfp/errors.hpp"
#include "pmmfp/report.hpp"
#include "pmmfp/rng.hpp"

using namespace pmmfp;

namespace {

FitResult tiny_fit() {
  Vector x(20), y(20);
  Rng rng(77);
  for (int i = 0; i < 20; ++i) {
    x(i) = 1.0 + 0.2 * i;
    y(i) = 1.0 + 2.0 * x(i) + 0.1 * rng.normal();
  }
  const ModelFrame frame =
      make_frame(x, FpBlock::from_powers({1}, Track::PositiveOnly));
  return fit_ols(frame, y);
}

}  // namespace

TEST_SUITE("report") {

TEST_CASE("envelope round trip") {
  ReportEnvelope env = make_envelope("fit", 42);
  env.config = Json{{"alpha", 1}};
  env.payload = Json{{"value", 3.5}};
  env.warnings = {"one", "two"};

  const Json j = envelope_to_json(env);
  const ReportEnvelope back = envelope_from_json(j);
  CHECK(back.schema_version == env.schema_version);
  CHECK(back.timestamp == env.timestamp);
  CHECK(back.seed == 42);
  CHECK(back.command == "fit");
  CHECK(back.config == env.config);
  CHECK(back.payload == env.payload);
  CHECK(back.warnings == env.warnings);
}

TEST_CASE("timestamps are ISO 8601 UTC") {
  const std::string ts = current_timestamp_utc();
  REQUIRE(ts.size() == 20);
  CHECK(ts[4] == '-');
  CHECK(ts[7] == '-');
  CHECK(ts[10] == 'T');
  CHECK(ts[13] == ':');
  CHECK(ts[16] == ':');
  CHECK(ts[19] == 'Z');
  for (int i : {0, 1, 2, 3, 5, 6, 8, 9, 11, 12, 14, 15, 17, 18}) {
    CHECK(std::isdigit(static_cast<unsigned char>(ts[i])));
  }
}

TEST_CASE("malformed envelopes are rejected") {
  const Json good = envelope_to_json(make_envelope("fit", 1));
  CHECK_NOTHROW(envelope_from_json(good));

  Json missing = good;
  missing.erase("payload");
  CHECK_THROWS_AS(envelope_from_json(missing), InvalidConfig);

  Json wrong_type = good;
  wrong_type["seed"] = "not a number";
  CHECK_THROWS_AS(envelope_from_json(wrong_type), InvalidConfig);

  CHECK_THROWS_AS(envelope_from_json(Json::array()), InvalidConfig);
}

TEST_CASE("schema validator core rules") {
  const Json schema = Json::parse(R"({
    "type": "object",
    "required": ["name", "kind", "count"],
    "additionalProperties": false,
    "properties": {
      "name": {"type": "string"},
      "kind": {"enum": ["a", "b"]},
      "count": {"type": "integer", "minimum": 0},
      "values": {"type": "array", "items": {"type": "number"}},
      "mode": {"oneOf": [{"type": "string"}, {"type": "integer"}]}
    }
  })");

  const Json ok = Json{{"name", "x"}, {"kind", "a"}, {"count", 3},
                       {"values", {1.0, 2}}, {"mode", 5}};
  CHECK(schema_validate(schema, ok).empty());

  CHECK_FALSE(schema_validate(schema, Json{{"name", "x"}, {"kind", "a"}})
                  .empty());  // missing count
  CHECK_FALSE(
      schema_validate(schema, Json{{"name", 1}, {"kind", "a"}, {"count", 3}})
          .empty());  // name type
  CHECK_FALSE(
      schema_validate(schema, Json{{"name", "x"}, {"kind", "c"}, {"count", 3}})
          .empty());  // enum
  CHECK_FALSE(
      schema_validate(schema, Json{{"name", "x"}, {"kind", "a"}, {"count", -1}})
          .empty());  // minimum
  CHECK_FALSE(schema_validate(schema, Json{{"name", "x"},
                                           {"kind", "a"},
                                           {"count", 3},
                                           {"extra", 1}})
                  .empty());  // additionalProperties
  CHECK_FALSE(schema_validate(schema, Json{{"name", "x"},
                                           {"kind", "a"},
                                           {"count", 3},
                                           {"values", {1.0, "two"}}})
                  .empty());  // items
  CHECK_FALSE(schema_validate(schema, Json{{"name", "x"},
                                           {"kind", "a"},
                                           {"count", 3},
                                           {"mode", true}})
                  .empty());  // oneOf
  // Integers satisfy a "number" expectation.
  CHECK(schema_validate(Json{{"type", "number"}}, Json(3)).empty());
  CHECK_FALSE(schema_validate(Json{{"type", "integer"}}, Json(3.5)).empty());
}

TEST_CASE("the shipped schema loads and accepts a bare envelope") {
  const Json schema =
      load_json_file(std::string(PMMFP_REPO_DIR) + "/schema/report.schema.json");
  REQUIRE(schema.is_object());
  CHECK(schema.contains("properties"));

  CHECK_THROWS_AS(load_json_file("/tmp/pmmfp_missing_schema.json"),
                  FileNotFound);
  const std::string bad_path = "/tmp/pmmfp_bad_schema.json";
  {
    std::ofstream out(bad_path);
    out << "{not json";
  }
  CHECK_THROWS_AS(load_json_file(bad_path), InvalidConfig);
  std::remove(bad_path.c_str());
}

TEST_CASE("fit serialiser carries the full coefficient table") {
  const FitResult fit = tiny_fit();
  const Json j = fit_to_json(fit);
  CHECK(j.at("estimator") == "ols");
  CHECK(j.at("block") == "{1}");
  CHECK(j.at("n") == 20);
  REQUIRE(j.at("coefficients").size() == 2);
  for (const auto& c : j.at("coefficients")) {
    CHECK(c.contains("term"));
    CHECK(c.contains("estimate"));
    CHECK(c.contains("se"));
  }
  CHECK(j.at("cumulants").contains("g2"));
  CHECK(j.at("cumulants").contains("degenerate"));
}

TEST_CASE("study serialisers expose the documented fields") {
  MatchedCell cell;
  cell.law = "gamma(3)";
  cell.n = 100;
  cell.g2_robust = 0.7;
  cell.reduction_pct = 30.0;
  const Json mj = matched_cells_to_json({cell});
  REQUIRE(mj.is_array());
  CHECK(mj[0].at("law") == "gamma(3)");
  CHECK(mj[0].at("reduction_pct") == 30.0);
  CHECK(mj[0].contains("g2_robust"));
  CHECK(mj[0].contains("coverage_pmm"));

  TimingSummary t{"ols", 100, 50, 0.5, 0.1};
  const Json tj = timings_to_json({t});
  REQUIRE(tj.is_array());
  CHECK(tj[0].at("estimator") == "ols");
  CHECK(tj[0].at("median_ms") == 0.5);
  CHECK(tj[0].at("sd_ms") == 0.1);

  FmaVariantSummary v;
  v.variant = "pmm_fma_top3";
  v.bias = 0.01;
  v.variance = 0.2;
  v.mse = 0.21;
  FmaCell fc;
  fc.law = "gamma(3)";
  fc.variants = {v};
  const Json fj = fma_cells_to_json({fc});
  CHECK(fj[0].at("variants")[0].at("variant") == "pmm_fma_top3");
  CHECK(fj[0].at("variants")[0].contains("bias"));
  CHECK(fj[0].at("variants")[0].contains("variance"));
  CHECK(fj[0].at("variants")[0].contains("mse"));
}

}  // TEST_SUITE
