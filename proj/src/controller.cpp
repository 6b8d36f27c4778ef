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

#include "elastic_mfc/controller.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace emfc {

namespace {

bool finite(double v) { return std::isfinite(v); }

// Composite trapezoidal rule over uniformly spaced values f(j*h).
// The integration span is (n-1)*h.
template <typename GetF>
double trapezoid(std::size_t n, double h, GetF&& f) {
  double acc = 0.5 * (f(0) + f(n - 1));
  for (std::size_t j = 1; j + 1 < n; ++j) acc += f(j);
  return acc * h;
}

}  // namespace

std::size_t ControllerConfig::window_capacity() const {
  return static_cast<std::size_t>(std::ceil(tau / h - 1e-9));
}

void ControllerConfig::validate() const {
  if (!finite(alpha) || alpha == 0.0)
    throw ValidationError("controller: alpha must be finite and nonzero");
  if (!finite(k_p) || k_p <= 0.0)
    throw ValidationError("controller: k_p must be > 0");
  if (!finite(h) || h <= 0.0)
    throw ValidationError("controller: h must be > 0");
  if (!finite(tau) || tau < 2.0 * h - 1e-12 * h)
    throw ValidationError("controller: tau must be >= 2*h (window of >= 2 samples)");
  if (!(u_min < u_max))
    throw ValidationError("controller: u_min must be < u_max");
}

Sample Sample::make(double t, double y, double u, double y_d, double yd_dot) {
  Sample s;
  s.t = t;
  s.y = y;
  s.u = u;
  s.y_d = y_d;
  s.yd_dot = yd_dot;
  s.e = y_d - y;
  return s;
}

double ip_control(double f_estim, double yd_dot, double e,
                  const ControllerConfig& cfg, bool* clamped, double* u_raw) {
  if (!finite(cfg.alpha) || cfg.alpha == 0.0)
    throw ValidationError("ip_control: alpha must be finite and nonzero");
  if (!finite(f_estim) || !finite(yd_dot) || !finite(e))
    throw ValidationError("ip_control: non-finite input");
  const double raw = -(f_estim - yd_dot - cfg.k_p * e) / cfg.alpha;
  const double u = std::clamp(raw, cfg.u_min, cfg.u_max);
  if (u_raw != nullptr) *u_raw = raw;
  if (clamped != nullptr) *clamped = (u != raw);
  return u;
}

std::optional<double> estimate_f_algebraic(std::span<const Sample> window,
                                           const ControllerConfig& cfg) {
  const std::size_t n = cfg.window_capacity();
  if (window.size() < n) return std::nullopt;
  const std::span<const Sample> w = window.last(n);
  const double h = cfg.h;
  const double span = static_cast<double>(n - 1) * h;
  const double integral = trapezoid(n, h, [&](std::size_t j) {
    const double sigma = static_cast<double>(j) * h;
    return (span - 2.0 * sigma) * w[j].y +
           cfg.alpha * sigma * (span - sigma) * w[j].u;
  });
  return -6.0 / (span * span * span) * integral;
}

std::optional<double> estimate_f_online(std::span<const Sample> window,
                                        const ControllerConfig& cfg) {
  const std::size_t n = cfg.window_capacity();
  if (window.size() < n) return std::nullopt;
  const std::span<const Sample> w = window.last(n);
  const double kp_term =
      cfg.online_kp_sign == OnlineKpSign::kPaper ? -cfg.k_p : cfg.k_p;
  const double span = static_cast<double>(n - 1) * cfg.h;
  const double integral = trapezoid(n, cfg.h, [&](std::size_t j) {
    return w[j].yd_dot - cfg.alpha * w[j].u + kp_term * w[j].e;
  });
  return integral / span;
}

Controller::Controller(ControllerConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  reset();
}

void Controller::reset() {
  window_.clear();
  window_.reserve(cfg_.window_capacity());
  f_estim_ = 0.0;
  last_u_ = std::clamp(0.0, cfg_.u_min, cfg_.u_max);
  prev_y_d_ = 0.0;
  has_prev_y_d_ = false;
}

void Controller::set_initial_command(double u) {
  if (!finite(u)) throw ValidationError("set_initial_command: non-finite u");
  last_u_ = std::clamp(u, cfg_.u_min, cfg_.u_max);
}

ControlOutput Controller::step(double t, double y, double y_d) {
  // y_d is piecewise constant in the elasticity loop, so its derivative is
  // approximated by the bounded backward difference (0 on the first sample).
  const double yd_dot =
      has_prev_y_d_ ? (y_d - prev_y_d_) / cfg_.h : 0.0;
  return step_impl(t, y, y_d, yd_dot);
}

ControlOutput Controller::step(double t, double y, double y_d, double yd_dot) {
  return step_impl(t, y, y_d, yd_dot);
}

ControlOutput Controller::step_impl(double t, double y, double y_d,
                                    double yd_dot) {
  if (!finite(t) || !finite(y) || !finite(y_d) || !finite(yd_dot))
    throw ValidationError("controller_step: non-finite input");
  if (!window_.empty()) {
    const double prev_t = window_.back().t;
    if (t <= prev_t) {
      std::ostringstream os;
      os << "controller_step: out-of-order timestamp " << t << " after "
         << prev_t;
      throw ValidationError(os.str());
    }
    if (std::abs(t - (prev_t + cfg_.h)) > 1e-6 * cfg_.h)
      throw ValidationError("controller_step: sample not on the h grid");
  }

  // The new sample enters the window with the previous command as its u;
  // that is the command that was actually active over (t - h, t]. Once the
  // new u is computed below it replaces the placeholder, so the window
  // always stores the applied command for the period each sample opened.
  window_.push_back(Sample::make(t, y, last_u_, y_d, yd_dot));
  if (window_.size() > cfg_.window_capacity())
    window_.erase(window_.begin());

  const std::optional<double> f =
      cfg_.estimator == EstimatorKind::kAlgebraic
          ? estimate_f_algebraic(window_, cfg_)
          : estimate_f_online(window_, cfg_);

  ControlOutput out;
  out.warming_up = !f.has_value();
  f_estim_ = f.value_or(0.0);
  if (!finite(f_estim_))
    throw ValidationError("controller_step: estimator produced a non-finite value");
  out.f_estim = f_estim_;
  if (out.warming_up) {
    // Hold until the estimator has a full window behind it.
    out.u = last_u_;
    out.u_raw = last_u_;
    out.clamped = false;
  } else {
    out.u = ip_control(f_estim_, yd_dot, window_.back().e, cfg_, &out.clamped,
                       &out.u_raw);
  }
  window_.back().u = out.u;
  last_u_ = out.u;
  prev_y_d_ = y_d;
  has_prev_y_d_ = true;
  return out;
}

void Controller::preload(std::span<const Sample> history) {
  if (history.empty()) throw ValidationError("preload: empty history");
  const std::size_t n = std::min(history.size(), cfg_.window_capacity());
  const std::span<const Sample> tail = history.last(n);
  for (std::size_t j = 0; j < tail.size(); ++j) {
    const Sample& s = tail[j];
    if (!finite(s.t) || !finite(s.y) || !finite(s.u) || !finite(s.y_d) ||
        !finite(s.yd_dot))
      throw ValidationError("preload: non-finite sample");
    if (j > 0 &&
        std::abs(tail[j].t - (tail[j - 1].t + cfg_.h)) > 1e-6 * cfg_.h)
      throw ValidationError("preload: history not on the h grid");
  }
  window_.assign(tail.begin(), tail.end());
  for (Sample& s : window_) s.e = s.y_d - s.y;
  last_u_ = window_.back().u;
  prev_y_d_ = window_.back().y_d;
  has_prev_y_d_ = true;
  const std::optional<double> f =
      cfg_.estimator == EstimatorKind::kAlgebraic
          ? estimate_f_algebraic(window_, cfg_)
          : estimate_f_online(window_, cfg_);
  f_estim_ = f.value_or(0.0);
}

}  // namespace emfc
