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

#ifndef ELASTIC_MFC_POLICIES_HPP
#define ELASTIC_MFC_POLICIES_HPP

#include <limits>
#include <memory>
#include <string>
#include <string_view>

#include "elastic_mfc/cluster.hpp"
#include "elastic_mfc/controller.hpp"

namespace emfc {

// What a policy sees each period, all measured before actuation.
struct PolicyTelemetry {
  double t = 0.0;
  double y = 0.0;
  double y_d = 0.0;
  double e = 0.0;
  double avg_cpu_pct = 0.0;
  int m_active = 0;
  int m_commissioned = 0;
};

struct PolicyDecision {
  double target = 0.0;   // desired cardinality, quantized downstream
  double u_raw = 0.0;    // pre-clamp/pre-quantize value, for telemetry
  double f_estim = 0.0;  // MFC only
};

// A scaling policy is a deterministic state machine; one owner at a time.
class ScalingPolicy {
 public:
  virtual ~ScalingPolicy() = default;
  virtual PolicyDecision decide(const PolicyTelemetry& telemetry) = 0;
  virtual std::string_view label() const = 0;
  // Cluster size at t = 0 when the config does not pin one. Elastic policies
  // provision for the first observed rate at the 50% utilization target, the
  // way an operator would bring up a service expecting known traffic.
  virtual int default_initial_vms(const ClusterConfig& cfg,
                                  double first_rate_rps) const;
  // Called once per run before the first decision.
  virtual void on_run_start(int /*initial_vms*/) {}
};

class MfcPolicy : public ScalingPolicy {
 public:
  explicit MfcPolicy(ControllerConfig cfg) : controller_(cfg) {}
  PolicyDecision decide(const PolicyTelemetry& telemetry) override;
  std::string_view label() const override { return "mfc"; }
  void on_run_start(int initial_vms) override;
  const Controller& controller() const { return controller_; }

 private:
  Controller controller_;
};

// Emulation of a commercial target-tracking autoscaler. The provider does
// not publish the sizing rule, so this uses the proportional-capacity rule
//   desired = ceil(current * avg_cpu_pct / target_pct)
// gated by consecutive breach observations and per-direction cooldowns.
struct TtConfig {
  double target_pct = 50.0;            // 0 < target_pct < 100
  int eval_periods = 3;                // consecutive breaches before acting
  double scale_out_cooldown_s = 0.0;
  double scale_in_cooldown_s = 300.0;

  void validate() const;
};

struct TtState {
  int above_count = 0;
  int below_count = 0;
  double last_scale_out = -std::numeric_limits<double>::infinity();
  double last_scale_in = -std::numeric_limits<double>::infinity();
};

// One evaluation of the emulated autoscaler. Never scales against the sign
// of (avg_cpu_pct - target_pct); holds inside a cooldown.
int target_tracking_step(double avg_cpu_pct, int current, const TtConfig& cfg,
                         TtState& state, double clock);

class TargetTrackingPolicy : public ScalingPolicy {
 public:
  explicit TargetTrackingPolicy(TtConfig cfg);
  PolicyDecision decide(const PolicyTelemetry& telemetry) override;
  std::string_view label() const override { return "target_tracking"; }

 private:
  TtConfig cfg_;
  TtState state_;
};

class StaticPolicy : public ScalingPolicy {
 public:
  explicit StaticPolicy(int count);
  PolicyDecision decide(const PolicyTelemetry& telemetry) override;
  std::string_view label() const override { return label_; }
  int default_initial_vms(const ClusterConfig&, double) const override {
    return count_;
  }

 private:
  int count_;
  std::string label_;
};

int static_step(int count);

}  // namespace emfc

#endif  // ELASTIC_MFC_POLICIES_HPP
