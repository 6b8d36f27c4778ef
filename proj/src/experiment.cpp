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

#include "elastic_mfc/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace emfc {

WorkloadTrace trace_from_config(const ExperimentConfig& cfg) {
  if (cfg.trace == "step") return default_step_trace();
  if (cfg.trace == "spiky") return default_spiky_trace(cfg.seed);
  std::string path;
  if (cfg.trace.rfind("csv:", 0) == 0)
    path = cfg.trace.substr(4);
  else if (cfg.trace.size() > 4 &&
           cfg.trace.substr(cfg.trace.size() - 4) == ".csv")
    path = cfg.trace;
  else
    throw ValidationError(
        "config: key 'trace' must be step, spiky or csv:<path>, got '" +
        cfg.trace + "'");
  return load_trace_csv(path);
}

PolicyRun run_policy(const ExperimentConfig& cfg, const WorkloadTrace& trace,
                     const std::string& policy_name) {
  cfg.validate();
  const std::unique_ptr<ScalingPolicy> policy = make_policy(policy_name, cfg);
  PolicyRun out;
  out.run = simulate(trace, *policy, cfg.cluster_config());
  out.kpi = make_report(out.run, cfg.fingerprint());
  return out;
}

std::string steps_csv_string(const RunResult& run) {
  std::ostringstream os;
  os << "# schema=" << kStepsCsvSchema << " policy=" << run.policy_label
     << "\n";
  os << "t,arrivals,served,failed,y,y_d,e,f_estim,u_raw,m_commanded,m_active,"
        "avg_cpu_pct,response_time_proxy\n";
  char buf[352];
  for (const StepRecord& s : run.steps) {
    std::snprintf(buf, sizeof buf,
                  "%.10g,%lld,%lld,%lld,%.10g,%.10g,%.10g,%.10g,%.10g,%d,%d,"
                  "%.10g,%.10g\n",
                  s.t, static_cast<long long>(s.arrivals),
                  static_cast<long long>(s.served),
                  static_cast<long long>(s.failed), s.y, s.y_d, s.e, s.f_estim,
                  s.u_raw, s.m_commanded, s.m_active, s.avg_cpu_pct,
                  s.response_time_proxy);
    os << buf;
  }
  return os.str();
}

void write_steps_csv(const RunResult& run, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << steps_csv_string(run);
  if (!out) throw IoError("failed writing " + path);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const WorkloadTrace trace = trace_from_config(cfg);

  std::filesystem::create_directories(cfg.out_dir);
  ExperimentResult result;
  std::vector<KpiReport> reports;
  for (const std::string& name : cfg.policy_list()) {
    PolicyRun pr = run_policy(cfg, trace, name);
    const std::string path =
        (std::filesystem::path(cfg.out_dir) /
         ("steps_" + pr.run.policy_label + ".csv"))
            .string();
    write_steps_csv(pr.run, path);
    result.artifact_paths.push_back(path);
    reports.push_back(pr.kpi);
    result.runs.push_back(std::move(pr));
  }

  if (reports.size() >= 2) {
    result.comparison = compare(reports);
  } else {
    result.comparison.by_vm_seconds = reports;
    result.comparison.deviation_rank = {1};
  }
  const std::string kpi_path =
      (std::filesystem::path(cfg.out_dir) / "kpi.csv").string();
  std::ofstream kpi_out(kpi_path, std::ios::binary);
  if (!kpi_out) throw IoError("cannot write " + kpi_path);
  kpi_out << comparison_csv(result.comparison);
  if (!kpi_out) throw IoError("failed writing " + kpi_path);
  result.artifact_paths.push_back(kpi_path);
  return result;
}

}  // namespace emfc
