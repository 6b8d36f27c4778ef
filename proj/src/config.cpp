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

#include "elastic_mfc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace emfc {

namespace {

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto r = std::from_chars(value.data(), value.data() + value.size(), out);
  if (r.ec != std::errc() || r.ptr != value.data() + value.size())
    throw ValidationError("config: key '" + key + "' expects a number, got '" +
                          value + "'");
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  int out = 0;
  const auto r = std::from_chars(value.data(), value.data() + value.size(), out);
  if (r.ec != std::errc() || r.ptr != value.data() + value.size())
    throw ValidationError("config: key '" + key + "' expects an integer, got '" +
                          value + "'");
  return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t out = 0;
  const auto r = std::from_chars(value.data(), value.data() + value.size(), out);
  if (r.ec != std::errc() || r.ptr != value.data() + value.size())
    throw ValidationError("config: key '" + key +
                          "' expects an unsigned integer, got '" + value + "'");
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void check_choice(const std::string& key, const std::string& value,
                  std::initializer_list<const char*> choices) {
  for (const char* c : choices)
    if (value == c) return;
  std::ostringstream os;
  os << "config: key '" << key << "' must be one of {";
  bool first = true;
  for (const char* c : choices) {
    if (!first) os << ", ";
    os << c;
    first = false;
  }
  os << "}, got '" << value << "'";
  throw ValidationError(os.str());
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

const std::vector<std::string>& ExperimentConfig::known_keys() {
  static const std::vector<std::string> keys = {
      "h_seconds",
      "tau_seconds",
      "alpha",
      "k_p",
      "estimator",
      "online_kp_sign",
      "m_min",
      "m_max",
      "boot_delay_periods",
      "vm_capacity_rps",
      "elb_ramp_limit",
      "base_rt_seconds",
      "initial_vms",
      "tt_target_pct",
      "tt_eval_periods",
      "tt_scale_out_cooldown_seconds",
      "tt_scale_in_cooldown_seconds",
      "static_count",
      "seed",
      "trace",
      "policy",
      "out_dir",
  };
  return keys;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  if (key == "h_seconds") h_seconds = parse_double(key, value);
  else if (key == "tau_seconds") tau_seconds = parse_double(key, value);
  else if (key == "alpha") alpha = parse_double(key, value);
  else if (key == "k_p") k_p = parse_double(key, value);
  else if (key == "estimator") {
    check_choice(key, value, {"online", "algebraic"});
    estimator = value;
  } else if (key == "online_kp_sign") {
    check_choice(key, value, {"paper", "rearranged"});
    online_kp_sign = value;
  } else if (key == "m_min") m_min = parse_int(key, value);
  else if (key == "m_max") m_max = parse_int(key, value);
  else if (key == "boot_delay_periods") boot_delay_periods = parse_int(key, value);
  else if (key == "vm_capacity_rps") vm_capacity_rps = parse_double(key, value);
  else if (key == "elb_ramp_limit") {
    check_choice(key, value, {"on", "off"});
    elb_ramp_limit = value;
  } else if (key == "base_rt_seconds") base_rt_seconds = parse_double(key, value);
  else if (key == "initial_vms") initial_vms = parse_int(key, value);
  else if (key == "tt_target_pct") tt_target_pct = parse_double(key, value);
  else if (key == "tt_eval_periods") tt_eval_periods = parse_int(key, value);
  else if (key == "tt_scale_out_cooldown_seconds")
    tt_scale_out_cooldown_seconds = parse_double(key, value);
  else if (key == "tt_scale_in_cooldown_seconds")
    tt_scale_in_cooldown_seconds = parse_double(key, value);
  else if (key == "static_count") static_count = parse_int(key, value);
  else if (key == "seed") seed = parse_u64(key, value);
  else if (key == "trace") trace = value;
  else if (key == "policy") policy = value;
  else if (key == "out_dir") out_dir = value;
  else
    throw ValidationError("config: unknown key '" + key + "'");
}

std::string ExperimentConfig::get(const std::string& key) const {
  if (key == "h_seconds") return format_double(h_seconds);
  if (key == "tau_seconds") return format_double(tau_seconds);
  if (key == "alpha") return format_double(alpha);
  if (key == "k_p") return format_double(k_p);
  if (key == "estimator") return estimator;
  if (key == "online_kp_sign") return online_kp_sign;
  if (key == "m_min") return std::to_string(m_min);
  if (key == "m_max") return std::to_string(m_max);
  if (key == "boot_delay_periods") return std::to_string(boot_delay_periods);
  if (key == "vm_capacity_rps") return format_double(vm_capacity_rps);
  if (key == "elb_ramp_limit") return elb_ramp_limit;
  if (key == "base_rt_seconds") return format_double(base_rt_seconds);
  if (key == "initial_vms") return std::to_string(initial_vms);
  if (key == "tt_target_pct") return format_double(tt_target_pct);
  if (key == "tt_eval_periods") return std::to_string(tt_eval_periods);
  if (key == "tt_scale_out_cooldown_seconds")
    return format_double(tt_scale_out_cooldown_seconds);
  if (key == "tt_scale_in_cooldown_seconds")
    return format_double(tt_scale_in_cooldown_seconds);
  if (key == "static_count") return std::to_string(static_count);
  if (key == "seed") return std::to_string(seed);
  if (key == "trace") return trace;
  if (key == "policy") return policy;
  if (key == "out_dir") return out_dir;
  throw ValidationError("config: unknown key '" + key + "'");
}

ControllerConfig ExperimentConfig::controller_config() const {
  ControllerConfig cfg;
  cfg.alpha = alpha;
  cfg.k_p = k_p;
  cfg.tau = tau_seconds;
  cfg.h = h_seconds;
  cfg.estimator = estimator == "algebraic" ? EstimatorKind::kAlgebraic
                                           : EstimatorKind::kOnline;
  cfg.online_kp_sign = online_kp_sign == "rearranged" ? OnlineKpSign::kRearranged
                                                      : OnlineKpSign::kPaper;
  // The command is the cluster cardinality, so the iP output is clamped to
  // the fleet bounds before quantization.
  cfg.u_min = static_cast<double>(m_min);
  cfg.u_max = static_cast<double>(m_max);
  return cfg;
}

ClusterConfig ExperimentConfig::cluster_config() const {
  ClusterConfig cfg;
  cfg.m_min = m_min;
  cfg.m_max = m_max;
  cfg.boot_delay_periods = boot_delay_periods;
  cfg.vm_capacity_rps = vm_capacity_rps;
  cfg.elb_ramp_limit = elb_ramp_limit == "on";
  cfg.base_rt_seconds = base_rt_seconds;
  cfg.h = h_seconds;
  cfg.initial_vms = initial_vms;
  return cfg;
}

TtConfig ExperimentConfig::tt_config() const {
  TtConfig cfg;
  cfg.target_pct = tt_target_pct;
  cfg.eval_periods = tt_eval_periods;
  cfg.scale_out_cooldown_s = tt_scale_out_cooldown_seconds;
  cfg.scale_in_cooldown_s = tt_scale_in_cooldown_seconds;
  return cfg;
}

std::vector<std::string> ExperimentConfig::policy_list() const {
  std::vector<std::string> names;
  std::string item;
  std::istringstream in(policy);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) names.push_back(item);
  }
  if (names.empty())
    throw ValidationError("config: key 'policy' names no policies");
  return names;
}

std::vector<std::string> ExperimentConfig::diagnostics() const {
  std::vector<std::string> problems;
  auto probe = [&problems](const std::function<void()>& check) {
    try {
      check();
    } catch (const std::exception& ex) {
      problems.emplace_back(ex.what());
    }
  };
  probe([this] { controller_config().validate(); });
  probe([this] { cluster_config().validate(); });
  probe([this] { tt_config().validate(); });
  probe([this] {
    if (m_max < m_min) throw ValidationError("config: m_max must be >= m_min");
  });
  probe([this] {
    for (const std::string& name : policy_list()) make_policy(name, *this);
  });
  probe([this] {
    if (trace == "step" || trace == "spiky") return;
    std::string path;
    if (trace.rfind("csv:", 0) == 0) path = trace.substr(4);
    else if (trace.size() > 4 && trace.substr(trace.size() - 4) == ".csv")
      path = trace;
    else
      throw ValidationError("config: key 'trace' must be step, spiky or csv:<path>, got '" +
                            trace + "'");
    if (!std::filesystem::exists(path))
      throw ValidationError("config: trace file does not exist: " + path);
  });
  return problems;
}

void ExperimentConfig::validate() const {
  const std::vector<std::string> problems = diagnostics();
  if (!problems.empty()) throw ValidationError(problems.front());
}

std::string ExperimentConfig::canonical_string() const {
  std::map<std::string, std::string> kv;
  // out_dir changes where artifacts land, never what they contain, so it
  // stays out of the fingerprint.
  for (const std::string& key : known_keys())
    if (key != "out_dir") kv[key] = get(key);
  std::ostringstream os;
  for (const auto& [key, value] : kv) os << key << '=' << value << '\n';
  return os.str();
}

std::string ExperimentConfig::fingerprint() const {
  // FNV-1a 64.
  const std::string canonical = canonical_string();
  std::uint64_t hash = 1469598103934665603ull;
  for (const unsigned char c : canonical) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(hash));
  return buf;
}

ExperimentConfig ExperimentConfig::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  ExperimentConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos) {
      std::ostringstream os;
      os << path << ":" << line_no << ": expected key=value, got '" << stripped
         << "'";
      throw ValidationError(os.str());
    }
    cfg.set(trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1)));
  }
  return cfg;
}

std::unique_ptr<ScalingPolicy> make_policy(const std::string& name,
                                           const ExperimentConfig& cfg) {
  if (name == "mfc") return std::make_unique<MfcPolicy>(cfg.controller_config());
  if (name == "target_tracking")
    return std::make_unique<TargetTrackingPolicy>(cfg.tt_config());
  if (name == "static") return std::make_unique<StaticPolicy>(cfg.static_count);
  for (const char* prefix : {"static_", "static:"}) {
    if (name.rfind(prefix, 0) == 0) {
      const std::string tail = name.substr(7);
      int count = 0;
      const auto r =
          std::from_chars(tail.data(), tail.data() + tail.size(), count);
      if (r.ec != std::errc() || r.ptr != tail.data() + tail.size())
        throw ValidationError("config: bad static policy spec '" + name + "'");
      return std::make_unique<StaticPolicy>(count);
    }
  }
  throw ValidationError(
      "config: unknown policy '" + name +
      "' (expected mfc, target_tracking, static or static_<count>)");
}

}  // namespace emfc
