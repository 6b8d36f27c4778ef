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

#include "elastic_mfc/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "elastic_mfc/policies.hpp"

namespace emfc {

void ClusterConfig::validate() const {
  if (m_min < 1) throw ValidationError("cluster: m_min must be >= 1");
  if (m_max < m_min) throw ValidationError("cluster: m_max must be >= m_min");
  if (boot_delay_periods < 0)
    throw ValidationError("cluster: boot_delay_periods must be >= 0");
  if (!(vm_capacity_rps > 0.0))
    throw ValidationError("cluster: vm_capacity_rps must be > 0");
  if (!(base_rt_seconds > 0.0))
    throw ValidationError("cluster: base_rt_seconds must be > 0");
  if (!(h > 0.0)) throw ValidationError("cluster: h must be > 0");
  if (initial_vms < 0)
    throw ValidationError("cluster: initial_vms must be >= 0");
  if (initial_vms > 0 && (initial_vms < m_min || initial_vms > m_max))
    throw ValidationError("cluster: initial_vms must lie in [m_min, m_max]");
}

Cluster::Cluster(const ClusterConfig& cfg, int initial_vms) : cfg_(cfg) {
  cfg_.validate();
  // 0 is a legal bootstrap state; the first actuation restores the
  // [m_min, m_max] band.
  if (initial_vms != 0 &&
      (initial_vms < cfg_.m_min || initial_vms > cfg_.m_max))
    throw ValidationError("cluster: initial fleet outside [m_min, m_max]");
  // The initial fleet is pre-warmed: Active from t = 0.
  for (int i = 0; i < initial_vms; ++i) {
    VmRecord vm;
    vm.id = next_id_++;
    vm.lifecycle = VmLifecycle::kActive;
    vm.capacity = cfg_.vm_capacity_rps;
    vm.boot_remaining = 0;
    vm.started_at = 0.0;
    vms_.push_back(vm);
  }
}

void Cluster::advance_lifecycle() {
  for (VmRecord& vm : vms_) {
    if (vm.lifecycle == VmLifecycle::kBooting && --vm.boot_remaining <= 0)
      vm.lifecycle = VmLifecycle::kActive;
  }
}

int Cluster::active_count() const {
  return static_cast<int>(
      std::count_if(vms_.begin(), vms_.end(), [](const VmRecord& vm) {
        return vm.lifecycle == VmLifecycle::kActive;
      }));
}

int Cluster::commissioned_count() const { return static_cast<int>(vms_.size()); }

DispatchResult Cluster::dispatch(double arrival_rate) {
  if (!(arrival_rate >= 0.0) || !std::isfinite(arrival_rate))
    throw ValidationError("dispatch: arrival rate must be finite and >= 0");
  DispatchResult result;
  // Requests are counted as discrete events per period.
  result.arrivals = std::llround(arrival_rate * cfg_.h);

  double admitted = arrival_rate;
  if (cfg_.elb_ramp_limit) {
    // The balancer tolerates at most +50% rate growth per 5 minutes,
    // referenced to what it admitted 300 s earlier. It starts pre-warmed to
    // the first observed rate, and a one-VM floor lets traffic restart after
    // an idle stretch. Excess is turned away and counted failed.
    const auto lag = static_cast<std::size_t>(
        std::max(1.0, std::round(300.0 / cfg_.h)));
    if (!admitted_history_.empty()) {
      const double reference = std::max(
          cfg_.vm_capacity_rps,
          admitted_history_.size() >= lag
              ? admitted_history_[admitted_history_.size() - lag]
              : admitted_history_.front());
      admitted = std::min(arrival_rate, 1.5 * reference);
    }
    admitted_history_.push_back(admitted);
    if (admitted_history_.size() > lag) admitted_history_.pop_front();
  }
  result.admitted_rate = admitted;

  const int actives = active_count();
  for (VmRecord& vm : vms_)
    if (vm.lifecycle != VmLifecycle::kActive) vm.cpu = 0.0;
  if (actives == 0) {
    result.served = 0;
    result.failed = result.arrivals;
    result.service_unavailable = true;
    return result;
  }

  // Failures are derived from the drop rate (balancer excess plus per-VM
  // overload), which is exactly zero when nothing saturates.
  const double per_vm = admitted / static_cast<double>(actives);
  double drop_rate = arrival_rate - admitted;
  for (VmRecord& vm : vms_) {
    if (vm.lifecycle != VmLifecycle::kActive) continue;
    vm.cpu = std::min(1.0, per_vm / vm.capacity);
    drop_rate += std::max(0.0, per_vm - vm.capacity);
  }
  result.failed = std::llround(drop_rate * cfg_.h);
  if (result.failed < 0) result.failed = 0;
  if (result.failed > result.arrivals) result.failed = result.arrivals;
  result.served = result.arrivals - result.failed;
  return result;
}

double Cluster::measure_output() const {
  double sum = 0.0;
  for (const VmRecord& vm : vms_)
    if (vm.lifecycle == VmLifecycle::kActive) sum += vm.cpu;
  return sum;
}

double Cluster::reference() const {
  const int actives = active_count();
  if (actives < 1)
    throw ValidationError("reference: needs at least one Active VM");
  return static_cast<double>(actives) / 2.0;
}

void Cluster::terminate_back(double stopped_at) {
  VmRecord vm = vms_.back();
  vms_.pop_back();
  vm.lifecycle = VmLifecycle::kTerminating;
  vm.stopped_at = stopped_at;
  vm_seconds_ += stopped_at - vm.started_at;
  lifetime_log_.push_back({vm.id, vm.started_at, stopped_at});
}

void Cluster::apply_scaling(int target) {
  if (target < cfg_.m_min || target > cfg_.m_max) {
    std::ostringstream os;
    os << "apply_scaling: target " << target << " outside [" << cfg_.m_min
       << ", " << cfg_.m_max << "]";
    throw ValidationError(os.str());
  }
  int commissioned = commissioned_count();
  while (commissioned < target) {
    VmRecord vm;
    vm.id = next_id_++;
    vm.capacity = cfg_.vm_capacity_rps;
    vm.boot_remaining = cfg_.boot_delay_periods;
    vm.lifecycle = cfg_.boot_delay_periods > 0 ? VmLifecycle::kBooting
                                               : VmLifecycle::kActive;
    vm.started_at = clock_;
    vms_.push_back(vm);
    ++commissioned;
  }
  // Scale-in removes the youngest first; creation order makes that the back
  // of the vector, so still-Booting VMs are canceled before Active ones.
  while (commissioned > target) {
    terminate_back(clock_);
    --commissioned;
  }
}

void Cluster::close_run(double t_end) {
  for (VmRecord& vm : vms_) {
    vm.lifecycle = VmLifecycle::kTerminating;
    vm.stopped_at = t_end;
    vm_seconds_ += t_end - vm.started_at;
    lifetime_log_.push_back({vm.id, vm.started_at, t_end});
  }
  vms_.clear();
}

int quantize_command(double u_raw, const ClusterConfig& cfg) {
  if (!std::isfinite(u_raw))
    throw ValidationError("quantize_command: non-finite command");
  // Nearest integer, ties toward more capacity.
  const double bounded =
      std::clamp(u_raw, -1e9, 1e9);  // keep the cast to int well-defined
  auto rounded = static_cast<int>(std::floor(bounded + 0.5));
  return std::clamp(rounded, cfg.m_min, cfg.m_max);
}

RunResult simulate(const WorkloadTrace& trace, ScalingPolicy& policy,
                   const ClusterConfig& cfg) {
  cfg.validate();
  if (trace.size() == 0) throw ValidationError("simulate: empty trace");
  if (std::abs(trace.spacing() - cfg.h) > 1e-6 * cfg.h)
    throw ValidationError(
        "simulate: trace spacing must equal the sampling period h");

  const int initial =
      cfg.initial_vms > 0
          ? cfg.initial_vms
          : policy.default_initial_vms(cfg, trace.samples().front().rate);
  Cluster cluster(cfg, initial);
  policy.on_run_start(initial);

  RunResult result;
  result.policy_label = std::string(policy.label());
  result.steps.reserve(trace.size());
  result.duration = trace.duration();

  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double t = static_cast<double>(k) * cfg.h;
    cluster.set_clock(t);
    cluster.advance_lifecycle();

    const DispatchResult disp = cluster.dispatch(trace.samples()[k].rate);
    const int m_active = cluster.active_count();
    const double y = cluster.measure_output();
    // Reference and error use the pre-actuation cluster: measurement
    // precedes action within a period.
    const double y_d = m_active > 0 ? cluster.reference() : 0.0;
    const double e = y_d - y;
    const double avg_cpu_pct =
        m_active > 0 ? 100.0 * y / static_cast<double>(m_active) : 0.0;

    PolicyTelemetry telemetry{t,         y,
                              y_d,       e,
                              avg_cpu_pct, m_active,
                              cluster.commissioned_count()};
    const PolicyDecision decision = policy.decide(telemetry);
    const int m_commanded = quantize_command(decision.target, cfg);
    // Actuation closes the period: lifetimes run on period boundaries.
    cluster.set_clock(t + cfg.h);
    cluster.apply_scaling(m_commanded);

    StepRecord rec;
    rec.t = t;
    rec.arrivals = disp.arrivals;
    rec.served = disp.served;
    rec.failed = disp.failed;
    rec.y = y;
    rec.y_d = y_d;
    rec.e = e;
    rec.f_estim = decision.f_estim;
    rec.u_raw = decision.u_raw;
    rec.m_commanded = m_commanded;
    rec.m_active = m_active;
    rec.avg_cpu_pct = avg_cpu_pct;
    const double rho = std::min(avg_cpu_pct / 100.0, 0.99);
    rec.response_time_proxy = cfg.base_rt_seconds / (1.0 - rho);
    if (disp.service_unavailable) ++result.unavailable_periods;
    result.steps.push_back(rec);
  }

  cluster.close_run(trace.duration());
  result.vm_log = cluster.lifetime_log();
  result.vm_seconds_incremental = cluster.vm_seconds_incremental();
  return result;
}

}  // namespace emfc
