// Copyright 2026 The elastic-mfc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "elastic_mfc/experiment.hpp"

using emfc::ExperimentConfig;

namespace {

std::string temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::create_directories(dir);
  return dir.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("config keys") {
  ExperimentConfig cfg;

  SUBCASE("set and get round-trip") {
    cfg.set("alpha", "-1");
    CHECK(cfg.get("alpha") == "-1");
    cfg.set("m_max", "64");
    CHECK(cfg.m_max == 64);
    cfg.set("estimator", "algebraic");
    CHECK(cfg.get("estimator") == "algebraic");
  }

  SUBCASE("unknown keys are named in the error") {
    try {
      cfg.set("no_such_key", "1");
      FAIL("expected a validation error");
    } catch (const emfc::ValidationError& ex) {
      CHECK(std::string(ex.what()).find("no_such_key") != std::string::npos);
    }
  }

  SUBCASE("bad values are rejected") {
    CHECK_THROWS_AS(cfg.set("alpha", "abc"), emfc::ValidationError);
    CHECK_THROWS_AS(cfg.set("estimator", "newton"), emfc::ValidationError);
    CHECK_THROWS_AS(cfg.set("elb_ramp_limit", "maybe"), emfc::ValidationError);
  }

  SUBCASE("validation echoes controller invariants") {
    cfg.set("tau_seconds", "30");  // tau < 2h with h = 60
    CHECK_FALSE(cfg.diagnostics().empty());
    CHECK_THROWS_AS(cfg.validate(), emfc::ValidationError);

    ExperimentConfig zero_alpha;
    zero_alpha.set("alpha", "0");
    CHECK_THROWS_AS(zero_alpha.validate(), emfc::ValidationError);

    ExperimentConfig clean;
    CHECK(clean.diagnostics().empty());
    CHECK_NOTHROW(clean.validate());
  }

  SUBCASE("trace sources are validated") {
    cfg.set("trace", "nonsense");
    CHECK_THROWS_AS(cfg.validate(), emfc::ValidationError);
    cfg.set("trace", "csv:/tmp/definitely_missing_trace_file.csv");
    CHECK_THROWS_AS(cfg.validate(), emfc::ValidationError);
    cfg.set("trace", "spiky");
    CHECK_NOTHROW(cfg.validate());
  }

  SUBCASE("policy list parsing") {
    cfg.set("policy", "mfc, static_20 ,target_tracking");
    const auto names = cfg.policy_list();
    REQUIRE(names.size() == 3);
    CHECK(names[1] == "static_20");
    cfg.set("policy", "warp_drive");
    CHECK_THROWS_AS(cfg.validate(), emfc::ValidationError);
  }
}

TEST_CASE("config file parsing") {
  const std::string dir = temp_dir("emfc_cfg_test");
  const std::string path = dir + "/exp.cfg";
  {
    std::ofstream out(path);
    out << "# benchmark defaults\n"
        << "alpha = 1\n"
        << "k_p=0.8\n"
        << "\n"
        << "m_max = 50\n";
  }
  const ExperimentConfig cfg = ExperimentConfig::load_file(path);
  CHECK(cfg.alpha == 1.0);
  CHECK(cfg.k_p == 0.8);
  CHECK(cfg.m_max == 50);

  const std::string bad_path = dir + "/bad.cfg";
  {
    std::ofstream out(bad_path);
    out << "alpha 1\n";
  }
  CHECK_THROWS_AS(ExperimentConfig::load_file(bad_path), emfc::ValidationError);
  CHECK_THROWS_AS(ExperimentConfig::load_file(dir + "/missing.cfg"),
                  emfc::IoError);
}

TEST_CASE("fingerprint tracks config content") {
  ExperimentConfig a, b;
  CHECK(a.fingerprint() == b.fingerprint());
  CHECK(a.fingerprint().size() == 16);
  b.set("seed", "43");
  CHECK(a.fingerprint() != b.fingerprint());
}

TEST_CASE("policy factory") {
  const ExperimentConfig cfg;
  CHECK(emfc::make_policy("mfc", cfg)->label() == "mfc");
  CHECK(emfc::make_policy("target_tracking", cfg)->label() == "target_tracking");
  CHECK(emfc::make_policy("static", cfg)->label() == "static_30");
  CHECK(emfc::make_policy("static_20", cfg)->label() == "static_20");
  CHECK(emfc::make_policy("static:25", cfg)->label() == "static_25");
  CHECK_THROWS_AS(emfc::make_policy("static_x", cfg), emfc::ValidationError);
  CHECK_THROWS_AS(emfc::make_policy("pid", cfg), emfc::ValidationError);
}

TEST_CASE("experiment run writes the full artifact set") {
  ExperimentConfig cfg;
  cfg.set("out_dir", temp_dir("emfc_exp_artifacts"));
  const emfc::ExperimentResult result = emfc::run_experiment(cfg);

  REQUIRE(result.runs.size() == 4);  // mfc, target_tracking, static_20, static_30
  REQUIRE(result.artifact_paths.size() == 5);
  for (const std::string& path : result.artifact_paths)
    CHECK(std::filesystem::exists(path));

  const std::string steps = slurp(result.artifact_paths.front());
  std::istringstream lines(steps);
  std::string schema_line, header;
  std::getline(lines, schema_line);
  std::getline(lines, header);
  CHECK(schema_line.find("# schema=steps-v1") == 0);
  CHECK(header ==
        "t,arrivals,served,failed,y,y_d,e,f_estim,u_raw,m_commanded,m_active,"
        "avg_cpu_pct,response_time_proxy");
  // 120 data rows for the two-hour minute-sampled benchmark trace.
  int rows = 0;
  std::string row;
  while (std::getline(lines, row)) ++rows;
  CHECK(rows == 120);

  const std::string kpi = slurp(result.artifact_paths.back());
  CHECK(kpi.find("# schema=kpi-v1") == 0);
  CHECK(kpi.find("static_30") != std::string::npos);
}

TEST_CASE("experiment runs are bit-reproducible") {
  ExperimentConfig cfg;
  cfg.set("trace", "spiky");
  cfg.set("policy", "mfc,target_tracking");
  cfg.set("out_dir", temp_dir("emfc_exp_repro_a"));
  const emfc::ExperimentResult first = emfc::run_experiment(cfg);
  const std::string steps_a = slurp(first.artifact_paths[0]);
  const std::string kpi_a = slurp(first.artifact_paths.back());

  cfg.set("out_dir", temp_dir("emfc_exp_repro_b"));
  const emfc::ExperimentResult second = emfc::run_experiment(cfg);
  CHECK(slurp(second.artifact_paths[0]) == steps_a);
  CHECK(slurp(second.artifact_paths.back()) == kpi_a);

  // A different seed changes the spiky trace and thus the telemetry.
  cfg.set("seed", "43");
  cfg.set("out_dir", temp_dir("emfc_exp_repro_c"));
  const emfc::ExperimentResult third = emfc::run_experiment(cfg);
  CHECK(slurp(third.artifact_paths[0]) != steps_a);
}

TEST_CASE("csv trace feeds an experiment") {
  const std::string dir = temp_dir("emfc_exp_csvtrace");
  const std::string trace_path = dir + "/trace.csv";
  emfc::save_trace_csv(emfc::default_step_trace(), trace_path);

  ExperimentConfig cfg;
  cfg.set("trace", "csv:" + trace_path);
  cfg.set("policy", "static_20,static_30");
  cfg.set("out_dir", dir);
  const emfc::ExperimentResult result = emfc::run_experiment(cfg);
  CHECK(result.runs[0].kpi.vm_seconds == 144000.0);
  CHECK(result.runs[1].kpi.vm_seconds == 216000.0);
}
