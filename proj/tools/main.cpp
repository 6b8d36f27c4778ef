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

// Experiment driver for the elastic-mfc engine. Talks to the engine only
// through the shared-library C API.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "elastic_mfc.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

int exit_code_for(emfc_status status) {
  switch (status) {
    case EMFC_OK:
      return kExitOk;
    case EMFC_ERR_INVALID_ARGUMENT:
    case EMFC_ERR_CONFIG:
      return kExitConfigError;
    default:
      return kExitRuntimeError;
  }
}

int fail(emfc_status status, const std::string& context) {
  std::cerr << "error: " << context << ": " << emfc_last_error() << "\n";
  return exit_code_for(status);
}

struct ConfigDeleter {
  void operator()(emfc_config* c) const { emfc_config_free(c); }
};
struct TraceDeleter {
  void operator()(emfc_trace* t) const { emfc_trace_free(t); }
};
struct RunDeleter {
  void operator()(emfc_run* r) const { emfc_run_free(r); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "elastic-mfc: model-free-control horizontal elasticity benchmark"};
  app.footer(
      "Outputs one steps_<policy>.csv per policy plus kpi.csv in --out.\n"
      "Exit codes: 0 ok, 2 config error, 3 runtime error.");

  std::string config_path;
  std::string trace_spec;
  std::string out_dir;
  std::string seed;
  std::vector<std::string> policies;
  int static_count = -1;
  bool validate_only = false;

  app.add_option("--config", config_path,
                 "key=value config file (see README for keys)");
  app.add_option("--policy", policies,
                 "policy to run: mfc, target_tracking, static, static_<N> "
                 "(repeatable)");
  app.add_option("--trace", trace_spec, "trace source: step, spiky, csv:<path>");
  app.add_option("--seed", seed, "RNG seed (overrides config and environment)");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--static-count", static_count,
                 "VM count for the bare 'static' policy");
  app.add_flag("--validate-only", validate_only,
               "validate the configuration and exit");

  CLI11_PARSE(app, argc, argv);

  std::unique_ptr<emfc_config, ConfigDeleter> cfg(emfc_config_new());
  if (!cfg) {
    std::cerr << "error: out of memory\n";
    return kExitRuntimeError;
  }

  emfc_status st = EMFC_OK;
  if (!config_path.empty()) {
    st = emfc_config_load_file(cfg.get(), config_path.c_str());
    if (st != EMFC_OK) return fail(st, "loading " + config_path);
  }

  // Seed precedence: --seed flag, then ELASTIC_MFC_SEED, then config file.
  if (const char* env_seed = std::getenv("ELASTIC_MFC_SEED");
      env_seed != nullptr && seed.empty())
    seed = env_seed;
  auto set_key = [&](const char* key, const std::string& value) {
    st = emfc_config_set(cfg.get(), key, value.c_str());
    return st == EMFC_OK;
  };
  if (!seed.empty() && !set_key("seed", seed)) return fail(st, "setting seed");
  if (!trace_spec.empty() && !set_key("trace", trace_spec))
    return fail(st, "setting trace");
  if (!out_dir.empty() && !set_key("out_dir", out_dir))
    return fail(st, "setting out_dir");
  if (static_count >= 0 && !set_key("static_count", std::to_string(static_count)))
    return fail(st, "setting static_count");
  if (!policies.empty()) {
    std::string joined;
    for (const std::string& p : policies) {
      if (!joined.empty()) joined += ',';
      joined += p;
    }
    if (!set_key("policy", joined)) return fail(st, "setting policy");
  }

  if (validate_only) {
    char* diag = nullptr;
    st = emfc_config_diagnostics(cfg.get(), &diag);
    if (st != EMFC_OK) return fail(st, "validating configuration");
    const std::string text = diag == nullptr ? "" : diag;
    emfc_string_free(diag);
    if (text.empty()) {
      std::cout << "ok\n";
      return kExitOk;
    }
    std::cerr << text;
    return kExitConfigError;
  }

  st = emfc_config_validate(cfg.get());
  if (st != EMFC_OK) return fail(st, "validating configuration");

  char* trace_kind = nullptr;
  st = emfc_config_get(cfg.get(), "trace", &trace_kind);
  if (st != EMFC_OK) return fail(st, "reading trace kind");
  std::string kind = trace_kind;
  emfc_string_free(trace_kind);

  emfc_trace* raw_trace = nullptr;
  st = emfc_trace_create(cfg.get(), kind.c_str(), &raw_trace);
  if (st != EMFC_OK) return fail(st, "building trace '" + kind + "'");
  std::unique_ptr<emfc_trace, TraceDeleter> trace(raw_trace);

  char* out_value = nullptr;
  st = emfc_config_get(cfg.get(), "out_dir", &out_value);
  if (st != EMFC_OK) return fail(st, "reading out_dir");
  const std::string out_path = out_value;
  emfc_string_free(out_value);
  std::error_code ec;
  std::filesystem::create_directories(out_path, ec);
  if (ec) {
    std::cerr << "error: cannot create output directory " << out_path << ": "
              << ec.message() << "\n";
    return kExitRuntimeError;
  }

  char* policy_value = nullptr;
  st = emfc_config_get(cfg.get(), "policy", &policy_value);
  if (st != EMFC_OK) return fail(st, "reading policy list");
  std::string policy_csv = policy_value;
  emfc_string_free(policy_value);

  std::vector<std::string> policy_names;
  for (std::size_t pos = 0; pos <= policy_csv.size();) {
    const std::size_t comma = policy_csv.find(',', pos);
    const std::string name =
        policy_csv.substr(pos, comma == std::string::npos ? std::string::npos
                                                          : comma - pos);
    if (!name.empty()) policy_names.push_back(name);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }

  std::vector<std::unique_ptr<emfc_run, RunDeleter>> runs;
  for (const std::string& name : policy_names) {
    emfc_run* raw_run = nullptr;
    st = emfc_run_policy(cfg.get(), trace.get(), name.c_str(), &raw_run);
    if (st != EMFC_OK) return fail(st, "running policy '" + name + "'");
    runs.emplace_back(raw_run);

    emfc_kpi_report kpi{};
    emfc_run_kpi(raw_run, &kpi);
    const std::string steps_path =
        (std::filesystem::path(out_path) / ("steps_" + std::string(kpi.policy) + ".csv"))
            .string();
    st = emfc_run_write_steps_csv(raw_run, steps_path.c_str());
    if (st != EMFC_OK) return fail(st, "writing " + steps_path);
    std::cout << "wrote " << steps_path << "\n";
  }

  if (runs.size() >= 2) {
    std::vector<const emfc_run*> raw;
    raw.reserve(runs.size());
    for (const auto& r : runs) raw.push_back(r.get());

    const std::string kpi_path =
        (std::filesystem::path(out_path) / "kpi.csv").string();
    st = emfc_kpi_write_csv(raw.data(), raw.size(), kpi_path.c_str());
    if (st != EMFC_OK) return fail(st, "writing " + kpi_path);
    std::cout << "wrote " << kpi_path << "\n\n";

    char* table = nullptr;
    st = emfc_kpi_table(raw.data(), raw.size(), &table);
    if (st != EMFC_OK) return fail(st, "formatting KPI table");
    std::cout << table;
    emfc_string_free(table);
  } else if (runs.size() == 1) {
    emfc_kpi_report kpi{};
    emfc_run_kpi(runs.front().get(), &kpi);
    std::printf("%s: vm_seconds=%.0f cpu_deviation=%.2f%% failed=%.0f\n",
                kpi.policy, kpi.vm_seconds, kpi.mean_cpu_deviation_pct,
                kpi.failed_requests);
  }

  return kExitOk;
}
