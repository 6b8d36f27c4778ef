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

#ifndef ELASTIC_MFC_CONFIG_HPP
#define ELASTIC_MFC_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "elastic_mfc/cluster.hpp"
#include "elastic_mfc/controller.hpp"
#include "elastic_mfc/policies.hpp"

namespace emfc {

// Flat experiment configuration. Every knob has a flat key=value spelling;
// unknown keys are rejected by name.
struct ExperimentConfig {
  // Sampling and controller.
  double h_seconds = 60.0;
  double tau_seconds = 180.0;
  double alpha = -1.0;
  double k_p = 0.8;
  std::string estimator = "online";        // online | algebraic
  std::string online_kp_sign = "paper";    // paper | rearranged

  // Cluster.
  int m_min = 1;
  int m_max = 40;
  int boot_delay_periods = 2;
  double vm_capacity_rps = 12.0;
  std::string elb_ramp_limit = "off";      // on | off
  double base_rt_seconds = 0.05;
  int initial_vms = 0;                     // 0 = per-policy default

  // Baseline autoscaler.
  double tt_target_pct = 50.0;
  int tt_eval_periods = 3;
  double tt_scale_out_cooldown_seconds = 0.0;
  double tt_scale_in_cooldown_seconds = 300.0;
  int static_count = 30;                   // for the bare "static" policy name

  // Experiment driver.
  std::uint64_t seed = 42;
  std::string trace = "step";              // step | spiky | csv:<path>
  std::string policy = "mfc,target_tracking,static_20,static_30";
  std::string out_dir = "out";

  // Throws ValidationError naming the offending key.
  void set(const std::string& key, const std::string& value);
  std::string get(const std::string& key) const;

  // Re-validates every downstream invariant (controller, cluster, policies,
  // trace source). Returns diagnostics instead of throwing when `collect` is
  // non-null; otherwise throws ValidationError on the first problem.
  void validate() const;
  std::vector<std::string> diagnostics() const;

  // Sorted key=value dump; the config fingerprint hashes this.
  std::string canonical_string() const;
  std::string fingerprint() const;  // 16 hex chars, FNV-1a 64

  ControllerConfig controller_config() const;
  ClusterConfig cluster_config() const;
  TtConfig tt_config() const;

  // Parsed policy list, e.g. {"mfc", "static_20"}.
  std::vector<std::string> policy_list() const;

  static ExperimentConfig load_file(const std::string& path);
  static const std::vector<std::string>& known_keys();
};

// Builds a policy instance from a list entry: "mfc", "target_tracking",
// "static" (uses static_count), "static_<N>" or "static:<N>".
std::unique_ptr<ScalingPolicy> make_policy(const std::string& name,
                                           const ExperimentConfig& cfg);

}  // namespace emfc

#endif  // ELASTIC_MFC_CONFIG_HPP
