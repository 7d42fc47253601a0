// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "pmmfp/estimators.hpp"
#include "pmmfp/resampling.hpp"
#include "pmmfp/score_formb.hpp"
#include "pmmfp/selection.hpp"
#include "pmmfp/simulation.hpp"

namespace pmmfp {

using Json = nlohmann::json;

// Common wrapper for everything the command line emits.  The timestamp is
// the only field that varies between identical runs; consumers that diff
// reports should compare `payload` (and `warnings`).
struct ReportEnvelope {
  std::string schema_version = "1.0.0";
  std::string timestamp;  // ISO 8601, UTC
  std::uint64_t seed = 0;
  std::string command;
  Json config = Json::object();
  Json payload = Json::object();
  std::vector<std::string> warnings;
};

std::string current_timestamp_utc();

ReportEnvelope make_envelope(const std::string& command, std::uint64_t seed);
Json envelope_to_json(const ReportEnvelope& env);
ReportEnvelope envelope_from_json(const Json& j);

// --- Serialisers for library results ---------------------------------------

Json cumulants_to_json(const ResidualCumulants& c);
Json fit_to_json(const FitResult& fit);
Json correlant_to_json(const CorrelantReport& report);
Json selection_to_json(const SelectionResult& sel);
Json fma_to_json(const FmaResult& fma, const SelectionResult& sel);
Json bootstrap_to_json(const BootstrapResult& boot);
Json stability_to_json(const SelectionStability& stab);
Json matched_cells_to_json(const std::vector<MatchedCell>& cells);
Json fma_cells_to_json(const std::vector<FmaCell>& cells);
Json are_cells_to_json(const std::vector<AreCell>& cells);
Json timings_to_json(const std::vector<TimingSummary>& timings);

// --- Minimal JSON-schema checking -------------------------------------------
//
// Supports the subset used by schema/report.schema.json: "type", "required",
// "properties", "additionalProperties" (boolean), "items", "enum", "oneOf",
// "minimum".  Returns human-readable problems, one per violation; empty means
// the instance conforms.
std::vector<std::string> schema_validate(const Json& schema,
                                         const Json& instance);

Json load_json_file(const std::string& path);  // FileNotFound / InvalidConfig

}  // namespace pmmfp
