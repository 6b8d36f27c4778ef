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

#ifndef ELASTIC_MFC_EXPERIMENT_HPP
#define ELASTIC_MFC_EXPERIMENT_HPP

#include <string>
#include <vector>

#include "elastic_mfc/config.hpp"
#include "elastic_mfc/kpi.hpp"
#include "elastic_mfc/workload.hpp"

namespace emfc {

inline constexpr const char* kStepsCsvSchema = "steps-v1";
inline constexpr const char* kKpiCsvSchema = "kpi-v1";

// Builds the trace named by cfg.trace ("step", "spiky", "csv:<path>").
WorkloadTrace trace_from_config(const ExperimentConfig& cfg);

// One policy over one trace, KPIs attached.
struct PolicyRun {
  RunResult run;
  KpiReport kpi;
};

PolicyRun run_policy(const ExperimentConfig& cfg, const WorkloadTrace& trace,
                     const std::string& policy_name);

void write_steps_csv(const RunResult& run, const std::string& path);
std::string steps_csv_string(const RunResult& run);

struct ExperimentResult {
  std::vector<PolicyRun> runs;
  KpiComparison comparison;
  std::vector<std::string> artifact_paths;  // steps_<policy>.csv..., kpi.csv
};

// The end-to-end driver: build trace, run every configured policy, write
// steps_<policy>.csv and kpi.csv under cfg.out_dir.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

}  // namespace emfc

#endif  // ELASTIC_MFC_EXPERIMENT_HPP
