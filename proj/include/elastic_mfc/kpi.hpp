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

#ifndef ELASTIC_MFC_KPI_HPP
#define ELASTIC_MFC_KPI_HPP

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "elastic_mfc/cluster.hpp"

namespace emfc {

struct KpiReport {
  std::string policy;
  double vm_seconds = 0.0;              // sum of VM lifetimes
  double mean_cpu_deviation_pct = 0.0;  // mean |avg_cpu_pct - reference|
  std::int64_t failed_requests = 0;
  std::int64_t unavailable_periods = 0;  // steps with no Active VM
  std::string config_fingerprint;
};

// Sum over the lifetime log of (stopped_at - started_at), boot time included.
double vm_seconds(std::span<const VmLifetime> log);

// Mean over steps with at least one Active VM of |avg_cpu_pct - reference_pct|.
// Steps with no Active VM are excluded (they are tallied separately as
// unavailability).
double mean_cpu_deviation(std::span<const StepRecord> steps,
                          double reference_pct = 50.0);

KpiReport make_report(const RunResult& run, const std::string& fingerprint);

// Pairwise ordering check between two policies in a comparison.
struct KpiOrderingFlag {
  std::string description;
  bool holds = false;
};

struct KpiComparison {
  std::vector<KpiReport> by_vm_seconds;  // ascending, ties by policy label
  std::vector<int> deviation_rank;       // rank of by_vm_seconds[i] on deviation, 1-based
  std::vector<KpiOrderingFlag> flags;
};

// Requires at least two reports. Flags record the benchmark orderings
// (model-free control vs target tracking vs static) whenever the policies
// involved are present.
KpiComparison compare(const std::vector<KpiReport>& reports);

std::string format_comparison_table(const KpiComparison& cmp);
std::string comparison_csv(const KpiComparison& cmp);

}  // namespace emfc

#endif  // ELASTIC_MFC_KPI_HPP
