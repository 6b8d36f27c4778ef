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

#ifndef ELASTIC_MFC_CLUSTER_HPP
#define ELASTIC_MFC_CLUSTER_HPP

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "elastic_mfc/errors.hpp"
#include "elastic_mfc/workload.hpp"

namespace emfc {

class ScalingPolicy;

// Discrete-time simulation of a VM cluster behind a load balancer. Every
// sampling period: dispatch requests -> update per-VM CPU -> measure the
// output and reference -> let the policy pick a target cardinality ->
// actuate. Deterministic given (config, trace).

enum class VmLifecycle { kBooting, kActive, kTerminating };

struct VmRecord {
  int id = 0;
  VmLifecycle lifecycle = VmLifecycle::kBooting;
  double capacity = 0.0;        // requests/s at 100% CPU
  int boot_remaining = 0;       // sampling periods until Active
  double cpu = 0.0;             // fraction in [0, 1]
  double started_at = 0.0;      // [s]
  std::optional<double> stopped_at;
};

// Closed lifetime interval, the unit of VM-seconds accounting. A VM is
// billed from creation (boot included) to termination.
struct VmLifetime {
  int id = 0;
  double started_at = 0.0;
  double stopped_at = 0.0;
};

struct ClusterConfig {
  int m_min = 1;
  int m_max = 40;
  int boot_delay_periods = 2;
  double vm_capacity_rps = 12.0;
  bool elb_ramp_limit = false;   // admitted rate growth capped at +50%/300 s
  double base_rt_seconds = 0.05;
  double h = 60.0;               // sampling period [s]
  int initial_vms = 0;           // 0 = policy default (static count or m_min)

  void validate() const;
};

struct DispatchResult {
  std::int64_t arrivals = 0;   // requests offered this period
  double admitted_rate = 0.0;  // rate after the ELB ramp limiter [req/s]
  std::int64_t served = 0;     // requests
  std::int64_t failed = 0;     // arrivals - served, exactly
  bool service_unavailable = false;  // no Active VM this period
};

// One sampling period of full telemetry; the CSV row of steps_<policy>.csv.
struct StepRecord {
  double t = 0.0;
  std::int64_t arrivals = 0;
  std::int64_t served = 0;
  std::int64_t failed = 0;
  double y = 0.0;        // sum of per-VM CPU fractions over Active VMs
  double y_d = 0.0;      // reference: m_active / 2
  double e = 0.0;        // y_d - y
  double f_estim = 0.0;  // MFC only, 0 for other policies
  double u_raw = 0.0;    // policy output before quantization
  int m_commanded = 0;
  int m_active = 0;
  double avg_cpu_pct = 0.0;
  double response_time_proxy = 0.0;  // base_rt / (1 - min(avg cpu, .99))
};

class Cluster {
 public:
  Cluster(const ClusterConfig& cfg, int initial_vms);

  // Booting VMs count down one period; those reaching zero become Active.
  void advance_lifecycle();

  // Evenly splits the admitted arrival rate across Active VMs and sets their
  // CPU to min(1, per_vm_rate / capacity). Load beyond capacity is dropped
  // and counted failed; with no Active VM everything fails.
  DispatchResult dispatch(double arrival_rate);

  // y(t): sum of CPU fractions over Active VMs.
  double measure_output() const;

  // y_d(t) = m_active / 2, the 50% average-CPU setpoint. Requires at least
  // one Active VM.
  double reference() const;

  // Creates Booting VMs or terminates the youngest ones (Booting first,
  // then Active) so that the commissioned count equals `target`.
  void apply_scaling(int target);

  // Closes every open lifetime at t_end.
  void close_run(double t_end);

  int active_count() const;
  int commissioned_count() const;  // Active + Booting
  const std::vector<VmRecord>& vms() const { return vms_; }
  const std::vector<VmLifetime>& lifetime_log() const { return lifetime_log_; }
  double vm_seconds_incremental() const { return vm_seconds_; }
  double clock() const { return clock_; }
  void set_clock(double t) { clock_ = t; }
  const ClusterConfig& config() const { return cfg_; }

 private:
  void terminate_back(double stopped_at);

  ClusterConfig cfg_;
  std::vector<VmRecord> vms_;  // creation order; the youngest VM is at the back
  std::vector<VmLifetime> lifetime_log_;
  double vm_seconds_ = 0.0;    // incremental accumulator, cross-checked by kpi
  std::deque<double> admitted_history_;  // ELB limiter reference rates
  int next_id_ = 0;
  double clock_ = 0.0;
};

// Rounds to the nearest integer with ties toward more capacity, then clamps
// to [m_min, m_max].
int quantize_command(double u_raw, const ClusterConfig& cfg);

struct RunResult {
  std::string policy_label;
  std::vector<StepRecord> steps;
  std::vector<VmLifetime> vm_log;
  double vm_seconds_incremental = 0.0;
  std::int64_t unavailable_periods = 0;
  double duration = 0.0;
};

// Runs one policy over a whole trace. The trace spacing must equal cfg.h.
RunResult simulate(const WorkloadTrace& trace, ScalingPolicy& policy,
                   const ClusterConfig& cfg);

}  // namespace emfc

#endif  // ELASTIC_MFC_CLUSTER_HPP
