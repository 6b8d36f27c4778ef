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

#ifndef ELASTIC_MFC_CONTROLLER_HPP
#define ELASTIC_MFC_CONTROLLER_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "elastic_mfc/errors.hpp"

namespace emfc {

// Model-free control core.
//
// The controller works against the first-order ultra-local model
//
//     y' = F + alpha * u
//
// where F lumps together every unmodeled dynamic and disturbance. F is
// re-estimated each sampling period from a sliding window of (y, u)
// history, and the intelligent-proportional (iP) law
//
//     u = -(F_est - yd_dot - k_p * e) / alpha,   e = y_d - y
//
// turns the tracking-error dynamics into e' + k_p * e = F_est - F.

enum class EstimatorKind { kAlgebraic, kOnline };

// Sign of the k_p*e term inside the online estimator integrand.
// kPaper keeps the published integrand (yd_dot - alpha*u - k_p*e);
// kRearranged uses the sign obtained by solving the iP law for F,
// (yd_dot + k_p*e - alpha*u). The two differ and the intended one is
// ambiguous, so both are implemented and selectable.
enum class OnlineKpSign { kPaper, kRearranged };

struct ControllerConfig {
  double alpha = -1.0;  // ultra-local input gain; nonzero. The default sign
                        // matches the cluster plant, where the reference
                        // y_d = M/2 (not y) responds to the command.
  double k_p = 0.8;     // stabilizing proportional gain [1/s], > 0
  double tau = 180.0;   // estimator window length [s], >= 2h
  double h = 60.0;      // sampling period [s], > 0
  EstimatorKind estimator = EstimatorKind::kOnline;
  OnlineKpSign online_kp_sign = OnlineKpSign::kPaper;
  double u_min = -kUnboundedU;
  double u_max = kUnboundedU;

  static constexpr double kUnboundedU = 1e300;

  // Number of samples the estimator window holds: ceil(tau / h).
  std::size_t window_capacity() const;

  // Throws ValidationError on any broken invariant.
  void validate() const;
};

// One sampling period of controller telemetry. `u` is the command that was
// actually applied (post-clamp), `e` is always y_d - y.
struct Sample {
  double t = 0.0;       // timestamp [s]
  double y = 0.0;       // measured output
  double u = 0.0;       // applied command
  double y_d = 0.0;     // reference
  double yd_dot = 0.0;  // reference derivative
  double e = 0.0;       // tracking error, y_d - y

  static Sample make(double t, double y, double u, double y_d, double yd_dot);
};

struct ControlOutput {
  double u = 0.0;       // clamped command, what the actuator receives
  double u_raw = 0.0;   // pre-clamp iP output
  double f_estim = 0.0;
  bool clamped = false;
  bool warming_up = false;  // window not yet full; bootstrap F_est = 0 used
};

// iP control law: u = -(f_estim - yd_dot - k_p*e)/alpha, clamped to
// [u_min, u_max]. Non-finite inputs are rejected with ValidationError.
double ip_control(double f_estim, double yd_dot, double e,
                  const ControllerConfig& cfg, bool* clamped = nullptr,
                  double* u_raw = nullptr);

// Algebraic estimator. With sigma the window-local time in [0, T] and T the
// window span ((N-1)*h for an N-sample window):
//
//   F_est = -(6/T^3) * Int_0^T [ (T - 2*sigma) y(sigma)
//                               + alpha * sigma * (T - sigma) u(sigma) ] dsigma
//
// discretized with the composite trapezoidal rule on the sample grid.
// Exact (up to O(h^2) quadrature error) whenever y is affine in sigma and u
// is constant. Returns nullopt while fewer than window_capacity() samples
// are available ("warming up"). When given more, only the trailing
// window_capacity() samples are used.
std::optional<double> estimate_f_algebraic(std::span<const Sample> window,
                                           const ControllerConfig& cfg);

// Online estimator, the mean of the controller's own signals over the window:
//
//   F_est = (1/T) * Int_{t-T}^{t} (yd_dot - alpha*u -/+ k_p*e) dsigma
//
// with the k_p*e sign picked by cfg.online_kp_sign (kPaper: minus).
// Same warm-up and trailing-window semantics as estimate_f_algebraic.
std::optional<double> estimate_f_online(std::span<const Sample> window,
                                        const ControllerConfig& cfg);

// Discrete-time iP controller with online F-estimation.
//
// Deterministic state machine: each step appends a sample, runs the
// configured estimator over the window, computes u through ip_control and
// records the applied u into the newest sample. Until the window first
// fills the estimator has nothing trustworthy to say, so the controller
// reports F_est = 0 and holds the previous command (the initial command at
// reset); acting on a zeroed estimate would kick a settled system for no
// reason. Not thread-safe; one owner at a time.
class Controller {
 public:
  explicit Controller(ControllerConfig cfg);

  // Steps with yd_dot computed by backward difference of y_d (zero on the
  // first sample after reset).
  ControlOutput step(double t, double y, double y_d);

  // Steps with a caller-supplied reference derivative.
  ControlOutput step(double t, double y, double y_d, double yd_dot);

  // Replaces the window with the trailing window_capacity() entries of
  // `history` (warm start / replay). Validates grid spacing and e = y_d - y.
  void preload(std::span<const Sample> history);

  // Seeds the command held during warm-up (clamped to [u_min, u_max]).
  // Defaults to clamp(0): u_min for an all-positive command range.
  void set_initial_command(double u);

  void reset();

  const ControllerConfig& config() const { return cfg_; }
  const std::vector<Sample>& window() const { return window_; }
  bool window_full() const { return window_.size() >= cfg_.window_capacity(); }
  double f_estim() const { return f_estim_; }
  double last_u() const { return last_u_; }

 private:
  ControlOutput step_impl(double t, double y, double y_d, double yd_dot);

  ControllerConfig cfg_;
  std::vector<Sample> window_;
  double f_estim_ = 0.0;
  double last_u_ = 0.0;
  double prev_y_d_ = 0.0;
  bool has_prev_y_d_ = false;
};

}  // namespace emfc

#endif  // ELASTIC_MFC_CONTROLLER_HPP
