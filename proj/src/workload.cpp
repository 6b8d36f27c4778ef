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

#include "elastic_mfc/workload.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

namespace emfc {

namespace {

// Deterministic draws with fully specified arithmetic; std distributions are
// not portable across standard library implementations.
double rand_u01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double rand_range(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * rand_u01(rng);
}

int rand_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rand_u01(rng) * static_cast<double>(hi - lo + 1));
}

}  // namespace

WorkloadTrace::WorkloadTrace(std::vector<TracePoint> samples, double spacing)
    : samples_(std::move(samples)), spacing_(spacing) {
  if (samples_.empty()) throw ValidationError("trace: no samples");
  if (!std::isfinite(spacing_) || spacing_ <= 0.0)
    throw ValidationError("trace: spacing must be > 0");
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const TracePoint& p = samples_[i];
    if (!std::isfinite(p.t) || !std::isfinite(p.rate))
      throw ValidationError("trace: non-finite sample");
    if (p.rate < 0.0) {
      std::ostringstream os;
      os << "trace: negative rate " << p.rate << " at sample " << i;
      throw ValidationError(os.str());
    }
    if (i > 0) {
      const double dt = p.t - samples_[i - 1].t;
      if (dt <= 0.0)
        throw ValidationError("trace: timestamps must be strictly increasing");
      if (std::abs(dt - spacing_) > 1e-6 * spacing_)
        throw ValidationError("trace: timestamps must be uniformly spaced");
    }
  }
}

double WorkloadTrace::total_requests() const {
  double total = 0.0;
  for (const TracePoint& p : samples_) total += p.rate * spacing_;
  return total;
}

WorkloadTrace step_trace(const std::vector<TraceLevel>& levels, double spacing) {
  if (levels.empty()) throw ValidationError("step_trace: no levels");
  if (!(spacing > 0.0)) throw ValidationError("step_trace: spacing must be > 0");
  std::vector<TracePoint> samples;
  double t = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const TraceLevel& level = levels[i];
    if (!(level.duration > 0.0)) {
      std::ostringstream os;
      os << "step_trace: level " << i << " duration must be > 0";
      throw ValidationError(os.str());
    }
    if (level.rate < 0.0) {
      std::ostringstream os;
      os << "step_trace: level " << i << " rate must be >= 0";
      throw ValidationError(os.str());
    }
    const double count_f = level.duration / spacing;
    const auto count = static_cast<std::size_t>(std::llround(count_f));
    if (count == 0 || std::abs(count_f - static_cast<double>(count)) > 1e-9) {
      std::ostringstream os;
      os << "step_trace: level " << i
         << " duration must be a positive multiple of the spacing";
      throw ValidationError(os.str());
    }
    for (std::size_t k = 0; k < count; ++k) {
      samples.push_back({t, level.rate});
      t += spacing;
    }
  }
  return WorkloadTrace(std::move(samples), spacing);
}

WorkloadTrace normalize_total(const WorkloadTrace& trace, double target) {
  if (!(target > 0.0)) throw ValidationError("normalize_total: target must be > 0");
  const double current = trace.total_requests();
  if (!(current > 0.0))
    throw ValidationError("normalize_total: trace has zero total");
  const double factor = target / current;
  std::vector<TracePoint> samples = trace.samples();
  for (TracePoint& p : samples) p.rate *= factor;
  return WorkloadTrace(std::move(samples), trace.spacing());
}

WorkloadTrace spiky_trace(std::uint64_t seed, const SpikyParams& params) {
  const double count_f = params.duration / params.spacing;
  const auto n = static_cast<std::size_t>(std::llround(count_f));
  if (n < 12 || std::abs(count_f - static_cast<double>(n)) > 1e-9)
    throw ValidationError(
        "spiky_trace: duration must be a multiple of the spacing, >= 12 periods");
  if (params.diurnal_amplitude < 0.0 || params.diurnal_amplitude >= 1.0)
    throw ValidationError("spiky_trace: diurnal_amplitude must be in [0, 1)");
  if (params.burst_min_factor < 1.0 ||
      params.burst_max_factor < params.burst_min_factor)
    throw ValidationError("spiky_trace: burst factors must satisfy 1 <= min <= max");
  if (!(params.decay_periods > 0.0))
    throw ValidationError("spiky_trace: decay_periods must be > 0");
  if (params.rise_periods < 1)
    throw ValidationError("spiky_trace: rise_periods must be >= 1");
  if (params.extra_bursts < 0)
    throw ValidationError("spiky_trace: extra_bursts must be >= 0");

  std::mt19937_64 rng(seed);
  const double two_pi = 2.0 * std::acos(-1.0);

  // Baseline: compressed day/night cycles, minimum at k = 0.
  std::vector<double> rate(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double phase = two_pi * params.diurnal_cycles *
                             static_cast<double>(k) / static_cast<double>(n) -
                         0.5 * two_pi / 2.0;
    rate[k] = 1.0 + params.diurnal_amplitude * std::sin(phase);
  }

  // Burst positions: one anchor at the first diurnal peak so the global
  // peak/trough ratio is controlled, plus seeded extras kept apart.
  std::vector<int> starts;
  const int anchor =
      static_cast<int>(static_cast<double>(n) / (2.0 * params.diurnal_cycles));
  starts.push_back(anchor);
  const int min_gap = 8;
  for (int b = 0; b < params.extra_bursts; ++b) {
    for (int attempt = 0; attempt < 64; ++attempt) {
      const int k = rand_int(rng, 4, static_cast<int>(n) - 8);
      bool ok = true;
      for (int s : starts) ok = ok && std::abs(k - s) >= min_gap;
      if (ok) {
        starts.push_back(k);
        break;
      }
    }
  }
  std::sort(starts.begin() + 1, starts.end());

  for (std::size_t b = 0; b < starts.size(); ++b) {
    const double factor =
        b == 0 ? params.anchor_factor
               : rand_range(rng, params.burst_min_factor, params.burst_max_factor);
    const int k0 = starts[b];
    for (std::size_t k = static_cast<std::size_t>(k0); k < n; ++k) {
      const double age = static_cast<double>(k - static_cast<std::size_t>(k0));
      // Linear climb to the peak, then exponential relaxation.
      const double shape =
          age < params.rise_periods
              ? (age + 1.0) / static_cast<double>(params.rise_periods)
              : std::exp(-(age - params.rise_periods + 1.0) /
                         params.decay_periods);
      const double mult = 1.0 + (factor - 1.0) * shape;
      rate[k] *= mult;
      if (age >= params.rise_periods && mult < 1.0 + 1e-3) break;
    }
  }

  std::vector<TracePoint> samples(n);
  for (std::size_t k = 0; k < n; ++k)
    samples[k] = {static_cast<double>(k) * params.spacing, rate[k]};
  WorkloadTrace trace = normalize_total(
      WorkloadTrace(std::move(samples), params.spacing), params.total_requests);

  // Post-checks on the advertised shape.
  double lo = trace.samples().front().rate, hi = lo;
  for (const TracePoint& p : trace.samples()) {
    lo = std::min(lo, p.rate);
    hi = std::max(hi, p.rate);
  }
  if (!(lo > 0.0) || hi / lo < 5.0)
    throw ValidationError("spiky_trace: peak/trough ratio below 5");
  const auto window = static_cast<std::size_t>(std::llround(300.0 / params.spacing));
  bool sharp = false;
  for (std::size_t k = 0; k + window < trace.size() && !sharp; ++k)
    sharp = trace.samples()[k + window].rate > 1.5 * trace.samples()[k].rate;
  if (window >= 1 && !sharp)
    throw ValidationError("spiky_trace: no +50% growth within 300 s");
  if (std::abs(trace.total_requests() - params.total_requests) >
      1e-3 * params.total_requests)
    throw ValidationError("spiky_trace: request total off by more than 0.1%");
  return trace;
}

WorkloadTrace compress_trace(const WorkloadTrace& trace, double factor) {
  if (!(factor > 0.0) || !std::isfinite(factor))
    throw ValidationError("compress_trace: factor must be finite and > 0");
  std::vector<TracePoint> samples = trace.samples();
  for (TracePoint& p : samples) {
    p.t /= factor;
    p.rate *= factor;
  }
  return WorkloadTrace(std::move(samples), trace.spacing() / factor);
}

WorkloadTrace load_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open trace file: " + path);
  std::vector<TracePoint> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::size_t comma = line.find(',');
    auto fail = [&](const char* why) {
      std::ostringstream os;
      os << path << ":" << line_no << ": " << why << ": '" << line << "'";
      return ValidationError(os.str());
    };
    if (comma == std::string::npos) {
      if (line_no == 1) continue;  // tolerated header
      throw fail("expected 't_seconds,rate_rps'");
    }
    double t = 0.0, rate = 0.0;
    const char* b1 = line.data();
    const char* e1 = line.data() + comma;
    const char* b2 = line.data() + comma + 1;
    const char* e2 = line.data() + line.size();
    const auto r1 = std::from_chars(b1, e1, t);
    const auto r2 = std::from_chars(b2, e2, rate);
    if (r1.ec != std::errc() || r1.ptr != e1 || r2.ec != std::errc() ||
        r2.ptr != e2) {
      if (line_no == 1) continue;  // header row such as "t_seconds,rate_rps"
      throw fail("malformed row");
    }
    samples.push_back({t, rate});
  }
  if (samples.empty())
    throw ValidationError(path + ": no trace samples");
  if (samples.size() < 2)
    throw ValidationError(path + ": need at least 2 samples to infer spacing");
  const double spacing = samples[1].t - samples[0].t;
  if (!(spacing > 0.0))
    throw ValidationError(path + ": timestamps must be strictly increasing");
  return WorkloadTrace(std::move(samples), spacing);
}

void save_trace_csv(const WorkloadTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write trace file: " + path);
  out << "t_seconds,rate_rps\n";
  char buf[64];
  for (const TracePoint& p : trace.samples()) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", p.t, p.rate);
    out << buf;
  }
  if (!out) throw IoError("failed writing trace file: " + path);
}

WorkloadTrace default_step_trace() {
  // Four plateaus over two hours, shaped so that a 20-VM static cluster
  // saturates on the tall plateau while a 30-VM one never does.
  const std::vector<TraceLevel> levels = {
      {1080.0, 60.0},
      {2400.0, 130.0},
      {1920.0, 255.0},
      {1800.0, 74.0},
  };
  return normalize_total(step_trace(levels, 60.0), 1e6);
}

WorkloadTrace default_spiky_trace(std::uint64_t seed) {
  return spiky_trace(seed, SpikyParams{});
}

}  // namespace emfc
