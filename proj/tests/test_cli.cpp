// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "pmmfp/error_law.hpp"
#include "pmmfp/report.hpp"
#include "pmmfp/rng.hpp"

using namespace pmmfp;

namespace {

struct CliRun {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CliRun run_cli(const std::string& args) {
  const std::string out_path = "/tmp/pmmfp_cli_stdout.txt";
  const std::string err_path = "/tmp/pmmfp_cli_stderr.txt";
  const std::string cmd = std::string(PMMFP_CLI_PATH) + " " + args + " > " +
                          out_path + " 2> " + err_path;
  const int status = std::system(cmd.c_str());
  CliRun r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out_path);
  r.err = slurp(err_path);
  return r;
}

// One deterministic dataset shared by the whole suite.
const std::string& data_path() {
  static const std::string path = [] {
    const std::string p = "/tmp/pmmfp_cli_data.csv";
    Rng rng(31415);
    const ErrorLaw law = ErrorLaw::gamma(3);
    std::ofstream out(p);
    out << "x,y,age\n";
    for (int i = 0; i < 150; ++i) {
      const double x = 0.5 + 4.5 * i / 149.0;
      const double y = 1.0 + 2.0 * std::sqrt(x) + 0.5 * law.sample_centred(rng);
      out << x << "," << y << "," << (30 + i % 40) << "\n";
    }
    return p;
  }();
  return path;
}

const Json& schema() {
  static const Json s = load_json_file(std::string(PMMFP_REPO_DIR) +
                                       "/schema/report.schema.json");
  return s;
}

Json parse_report(const CliRun& r) {
  REQUIRE_FALSE(r.out.empty());
  const Json j = Json::parse(r.out);
  const auto problems = schema_validate(schema(), j);
  for (const auto& p : problems) {
    MESSAGE("schema violation: ", p);
  }
  CHECK(problems.empty());
  return j;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("version and usage errors") {
  const CliRun v = run_cli("--version");
  CHECK(v.exit_code == 0);
  CHECK(v.out.find("pmmfp 1.0.0") != std::string::npos);

  CHECK(run_cli("").exit_code == 64);
  CHECK(run_cli("fit --data " + data_path() + " --powers 0.5 --bogus-flag")
            .exit_code == 64);
  CHECK(run_cli("frobnicate").exit_code == 64);
}

TEST_CASE("fixed-block fit emits a schema-clean report") {
  const CliRun r = run_cli("fit --data " + data_path() +
                           " --powers 0.5 --estimator pmm2 --seed 3 "
                           "--x-star 2.0");
  CHECK(r.exit_code == 0);
  const Json j = parse_report(r);
  CHECK(j.at("command") == "fit");
  CHECK(j.at("seed") == 3);
  const Json& payload = j.at("payload");
  CHECK(payload.at("kind") == "fit");
  CHECK(payload.at("n") == 150);
  CHECK(payload.at("fit").at("estimator") == "pmm2");
  CHECK(payload.at("fit").at("block") == "{0.5}");
  CHECK(payload.at("fit").at("converged") == true);

  // Gamma errors are visibly right-skewed at n = 150.
  const Json& norm = payload.at("normality");
  CHECK(norm.at("skewed") == true);
  CHECK(norm.at("gamma3").get<double>() > 0.5);
  CHECK(norm.at("se_gamma3_normal").get<double>() ==
        doctest::Approx(std::sqrt(6.0 / 150)).epsilon(1e-9));

  CHECK(payload.at("prediction").at("x_star") == 2.0);
  CHECK(payload.at("prediction").contains("ci95"));
}

TEST_CASE("reports are deterministic apart from the timestamp") {
  const std::string args = "fit --data " + data_path() +
                           " --auto --estimator pmm2 --max-terms 2 --seed 9";
  const CliRun a = run_cli(args);
  const CliRun b = run_cli(args);
  CHECK(a.exit_code == b.exit_code);
  const Json ja = Json::parse(a.out);
  const Json jb = Json::parse(b.out);
  CHECK(ja.at("payload") == jb.at("payload"));
  CHECK(ja.at("config") == jb.at("config"));
  CHECK(ja.at("warnings") == jb.at("warnings"));
}

TEST_CASE("auto sweep reports selection and optional averaging") {
  const CliRun r = run_cli("fit --data " + data_path() +
                           " --auto --max-terms 2 --fma-top 3 --x-star 2.0 "
                           "--seed 4");
  REQUIRE((r.exit_code == 0 || r.exit_code == 2));
  const Json j = parse_report(r);
  const Json& payload = j.at("payload");
  REQUIRE(payload.contains("selection"));
  CHECK(payload.at("selection").at("candidates").size() >= 10);
  REQUIRE(payload.contains("fma"));
  const Json& fma = payload.at("fma");
  CHECK(fma.contains("theta"));
  CHECK(fma.at("ci95").size() == 2);
  double total = 0.0;
  for (const auto& model : fma.at("models")) {
    total += model.at("weight").get<double>();
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("fit option conflicts are usage errors") {
  const std::string base = "fit --data " + data_path();
  CHECK(run_cli(base + " --powers 0.5 --auto").exit_code == 64);
  CHECK(run_cli(base).exit_code == 64);
  CHECK(run_cli(base + " --powers 0.5 --estimator ridge").exit_code == 64);
  CHECK(run_cli(base + " --powers 7").exit_code == 64);
  CHECK(run_cli(base + " --auto --fma-top 3").exit_code == 64);  // no x-star
  CHECK(run_cli(base + " --powers 0.5 --threads 0").exit_code == 64);
}

TEST_CASE("data problems are runtime errors") {
  CHECK(run_cli("fit --data /tmp/pmmfp_no_such_file.csv --powers 0.5")
            .exit_code == 1);
  CHECK(run_cli("fit --data " + data_path() + " --powers 0.5 --y nope")
            .exit_code == 1);
}

TEST_CASE("config files fill gaps but never override flags") {
  const std::string cfg_path = "/tmp/pmmfp_cli_cfg.json";
  {
    std::ofstream out(cfg_path);
    out << R"({"estimator": "huber", "powers": "1"})";
  }
  const CliRun from_cfg =
      run_cli("fit --data " + data_path() + " --config " + cfg_path);
  CHECK(from_cfg.exit_code == 0);
  CHECK(Json::parse(from_cfg.out).at("payload").at("fit").at("estimator") ==
        "huber");

  const CliRun overridden = run_cli("fit --data " + data_path() +
                                    " --estimator ols --config " + cfg_path);
  CHECK(overridden.exit_code == 0);
  CHECK(Json::parse(overridden.out).at("payload").at("fit").at("estimator") ==
        "ols");

  {
    std::ofstream out(cfg_path);
    out << R"({"estimatr": "huber"})";
  }
  const CliRun unknown =
      run_cli("fit --data " + data_path() + " --powers 0.5 --config " + cfg_path);
  CHECK(unknown.exit_code == 64);
  CHECK(unknown.err.find("unknown config key") != std::string::npos);

  {
    std::ofstream out(cfg_path);
    out << R"({"threads": "four"})";
  }
  CHECK(run_cli("fit --data " + data_path() + " --powers 0.5 --config " +
                cfg_path)
            .exit_code == 64);
  std::remove(cfg_path.c_str());
}

TEST_CASE("reports can be redirected to a file") {
  const std::string out_path = "/tmp/pmmfp_cli_report.json";
  std::remove(out_path.c_str());
  const CliRun r = run_cli("fit --data " + data_path() +
                           " --powers 0.5 --out " + out_path);
  CHECK(r.exit_code == 0);
  CHECK(r.out.empty());
  const Json j = load_json_file(out_path);
  CHECK(j.at("command") == "fit");
  std::remove(out_path.c_str());
}

TEST_CASE("bootstrap command summarises matched replicates") {
  const std::string csv_path = "/tmp/pmmfp_cli_boot.csv";
  const CliRun r = run_cli("bootstrap --data " + data_path() +
                           " --powers 0.5 --B 100 --estimators ols,pmm2 "
                           "--seed 5 --csv " + csv_path);
  CHECK(r.exit_code == 0);
  const Json j = parse_report(r);
  const Json& boot = j.at("payload").at("bootstrap");
  CHECK(boot.at("B") == 100);
  CHECK(boot.at("estimators").size() == 2);
  CHECK(boot.contains("variance_ratio"));

  const std::string csv = slurp(csv_path);
  CHECK(csv.rfind("estimator,term,beta,se_asymptotic,se_boot,ci95_low,"
                  "ci95_high",
                  0) == 0);
  std::remove(csv_path.c_str());

  CHECK(run_cli("bootstrap --data " + data_path() + " --powers 0.5 --B 99")
            .exit_code == 64);
}

TEST_CASE("bootstrap selection stability tabulates winners") {
  const std::string csv_path = "/tmp/pmmfp_cli_stab.csv";
  const CliRun r = run_cli("bootstrap --data " + data_path() +
                           " --powers 0.5 --B 100 --selection-stability "
                           "--max-terms 1 --estimator ols --seed 6 --csv " +
                           csv_path);
  REQUIRE((r.exit_code == 0 || r.exit_code == 2));
  const Json j = parse_report(r);
  const Json& stab = j.at("payload").at("stability");
  CHECK(stab.at("B") == 100);
  REQUIRE_FALSE(stab.at("winners").empty());
  double total = 0.0;
  for (const auto& row : stab.at("winners")) {
    total += row.at("frequency").get<double>();
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

  const std::string csv = slurp(csv_path);
  CHECK(csv.rfind("block,count,frequency", 0) == 0);
  std::remove(csv_path.c_str());
}

TEST_CASE("simulate accepts canonical and alias experiment names") {
  const std::string csv_path = "/tmp/pmmfp_cli_sim.csv";
  const CliRun r = run_cli(
      "simulate --experiment matched --laws 'gamma(3)' --n 60 "
      "--replications 60 --seed 2 --csv " + csv_path);
  REQUIRE((r.exit_code == 0 || r.exit_code == 2));
  const Json j = parse_report(r);
  CHECK(j.at("payload").at("experiment") == "matched_basis");
  REQUIRE_FALSE(j.at("payload").at("results").empty());
  CHECK(j.at("payload").at("results")[0].at("law") == "gamma(3)");

  const std::string csv = slurp(csv_path);
  CHECK(csv.rfind("law,n,usable,g2_theoretical,g2_robust,reduction_pct,"
                  "coverage_ols,coverage_pmm,pred_efficiency",
                  0) == 0);
  std::remove(csv_path.c_str());

  CHECK(run_cli("simulate --experiment bogus").exit_code == 64);
}

TEST_CASE("simulate timings run quickly at small sizes") {
  const CliRun r = run_cli(
      "simulate --experiment timings --n 50 --seed 2");
  CHECK(r.exit_code == 0);
  const Json j = parse_report(r);
  CHECK(j.at("payload").at("experiment") == "timings");
  const Json& rows = j.at("payload").at("results");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].at("estimator") == "ols");
  CHECK(rows[1].at("estimator") == "pmm2");
}

TEST_CASE("the schema rejects a mutilated report") {
  const CliRun r = run_cli("fit --data " + data_path() + " --powers 0.5");
  REQUIRE(r.exit_code == 0);
  Json j = Json::parse(r.out);
  j.erase("seed");
  CHECK_FALSE(schema_validate(schema(), j).empty());

  Json wrong = Json::parse(r.out);
  wrong["schema_version"] = 7;
  CHECK_FALSE(schema_validate(schema(), wrong).empty());
}

}  // TEST_SUITE
