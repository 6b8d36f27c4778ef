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

#ifndef ELASTIC_MFC_WORKLOAD_HPP
#define ELASTIC_MFC_WORKLOAD_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "elastic_mfc/errors.hpp"

namespace emfc {

struct TracePoint {
  double t = 0.0;     // [s]
  double rate = 0.0;  // arrival rate [requests/s], >= 0
};

// A uniformly sampled request-arrival trace. The rate at sample k applies to
// the interval [t_k, t_k + spacing).
class WorkloadTrace {
 public:
  WorkloadTrace(std::vector<TracePoint> samples, double spacing);

  const std::vector<TracePoint>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }
  double spacing() const { return spacing_; }
  double duration() const { return spacing_ * static_cast<double>(samples_.size()); }

  // Sum of rate * spacing over all samples.
  double total_requests() const;

 private:
  std::vector<TracePoint> samples_;
  double spacing_;
};

struct TraceLevel {
  double duration = 0.0;  // [s], positive multiple of the trace spacing
  double rate = 0.0;      // [requests/s]
};

// Piecewise-constant trace from (duration, rate) levels.
WorkloadTrace step_trace(const std::vector<TraceLevel>& levels, double spacing);

// Rescales all rates so that total_requests() == target.
WorkloadTrace normalize_total(const WorkloadTrace& trace, double target);

struct SpikyParams {
  double duration = 7200.0;
  double spacing = 60.0;
  double total_requests = 1e6;
  double diurnal_amplitude = 0.45;  // fraction of the baseline
  int diurnal_cycles = 2;           // compressed day cycles over the trace
  int extra_bursts = 2;             // seeded bursts besides the anchor burst
  double burst_min_factor = 2.0;
  double burst_max_factor = 3.0;
  double anchor_factor = 3.0;       // burst pinned at the diurnal peak
  int rise_periods = 2;             // periods from onset to the burst peak
  double decay_periods = 12.0;      // e-folding of a burst tail, in periods
};

// Sharply varying traffic: a compressed diurnal baseline plus seeded
// multiplicative bursts that rise within a single period. Deterministic in
// (seed, params). Construction enforces the advertised shape: peak/trough
// ratio >= 5, at least one +50% rate growth within any 300 s, and the exact
// requested request total.
WorkloadTrace spiky_trace(std::uint64_t seed, const SpikyParams& params = {});

// Time-compresses a trace: timestamps and spacing divided by `factor`, rates
// multiplied by it, so the request total is preserved.
WorkloadTrace compress_trace(const WorkloadTrace& trace, double factor);

// Two-column CSV (t_seconds,rate_rps), optional header, LF line endings.
WorkloadTrace load_trace_csv(const std::string& path);
void save_trace_csv(const WorkloadTrace& trace, const std::string& path);

// The default benchmark traces (before seeding/normalization knobs).
WorkloadTrace default_step_trace();
WorkloadTrace default_spiky_trace(std::uint64_t seed);

}  // namespace emfc

#endif  // ELASTIC_MFC_WORKLOAD_HPP
