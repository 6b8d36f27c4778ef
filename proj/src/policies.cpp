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

#include "elastic_mfc/policies.hpp"

#include <algorithm>
#include <cmath>

namespace emfc {

int ScalingPolicy::default_initial_vms(const ClusterConfig& cfg,
                                       double first_rate_rps) const {
  const auto sized = static_cast<int>(
      std::llround(2.0 * first_rate_rps / cfg.vm_capacity_rps));
  return std::clamp(sized, cfg.m_min, cfg.m_max);
}

PolicyDecision MfcPolicy::decide(const PolicyTelemetry& telemetry) {
  const ControlOutput out =
      controller_.step(telemetry.t, telemetry.y, telemetry.y_d);
  return {out.u, out.u_raw, out.f_estim};
}

void MfcPolicy::on_run_start(int initial_vms) {
  controller_.reset();
  controller_.set_initial_command(static_cast<double>(initial_vms));
}

void TtConfig::validate() const {
  if (!(target_pct > 0.0) || !(target_pct < 100.0))
    throw ValidationError("target_tracking: target_pct must be in (0, 100)");
  if (eval_periods < 1)
    throw ValidationError("target_tracking: eval_periods must be >= 1");
  if (scale_out_cooldown_s < 0.0 || scale_in_cooldown_s < 0.0)
    throw ValidationError("target_tracking: cooldowns must be >= 0");
}

int target_tracking_step(double avg_cpu_pct, int current, const TtConfig& cfg,
                         TtState& state, double clock) {
  cfg.validate();
  if (current < 1)
    throw ValidationError("target_tracking: current capacity must be >= 1");
  if (!std::isfinite(avg_cpu_pct) || avg_cpu_pct < 0.0)
    throw ValidationError("target_tracking: bad average CPU");

  // Proportional-capacity sizing, the published heuristic for utilization
  // tracking: keep capacity * target ~= capacity * observed.
  const double ratio = avg_cpu_pct / cfg.target_pct;
  const int desired = static_cast<int>(
      std::ceil(static_cast<double>(current) * ratio - 1e-9));

  if (avg_cpu_pct > cfg.target_pct) {
    ++state.above_count;
    state.below_count = 0;
  } else if (avg_cpu_pct < cfg.target_pct) {
    ++state.below_count;
    state.above_count = 0;
  } else {
    state.above_count = 0;
    state.below_count = 0;
  }

  if (state.above_count >= cfg.eval_periods && desired > current &&
      clock - state.last_scale_out >= cfg.scale_out_cooldown_s) {
    state.last_scale_out = clock;
    return desired;
  }
  if (state.below_count >= cfg.eval_periods && desired < current &&
      clock - state.last_scale_in >= cfg.scale_in_cooldown_s) {
    state.last_scale_in = clock;
    return desired;
  }
  return current;
}

TargetTrackingPolicy::TargetTrackingPolicy(TtConfig cfg) : cfg_(cfg) {
  cfg_.validate();
}

PolicyDecision TargetTrackingPolicy::decide(const PolicyTelemetry& telemetry) {
  // Sizing is based on the commissioned count: instances still booting are
  // already paid-for capacity, and ignoring them would double-provision.
  const int current = std::max(1, telemetry.m_commissioned);
  const int next = target_tracking_step(telemetry.avg_cpu_pct, current, cfg_,
                                        state_, telemetry.t);
  return {static_cast<double>(next), static_cast<double>(next), 0.0};
}

StaticPolicy::StaticPolicy(int count) : count_(count) {
  if (count < 1) throw ValidationError("static policy: count must be >= 1");
  label_ = "static_" + std::to_string(count);
}

PolicyDecision StaticPolicy::decide(const PolicyTelemetry&) {
  const int n = static_step(count_);
  return {static_cast<double>(n), static_cast<double>(n), 0.0};
}

int static_step(int count) { return count; }

}  // namespace emfc
