// Copyright 2026 The Erasehead Authors
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

// Dormand-Prince 5(4) embedded Runge-Kutta pair with the fourth-order
// continuous extension of Hairer, Norsett & Wanner, "Solving Ordinary
// Differential Equations I" (DOPRI5). The state is any Eigen dense object
// (complex vectors or matrices); the error norm is the RMS of the component
// errors scaled by atol + rtol * max(|y_old|, |y_new|).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>

#include "erasehead/errors.hpp"

namespace erasehead::ode {

struct Options {
  double rtol = 1e-8;
  double atol = 1e-10;
  double max_step = std::numeric_limits<double>::infinity();
  double initial_step = 0.0;  // 0: automatic
  std::size_t max_steps = 50'000'000;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t rhs_evaluations = 0;
};

namespace detail {

// Butcher tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                        a76 = 11.0 / 84;
// Fifth-order minus embedded fourth-order weights.
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                        e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense output.
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

template <class State>
double scaled_rms(const State& err, const State& y0, const State& y1, const Options& opt) {
  const auto scale = (opt.atol + opt.rtol * y0.cwiseAbs2().cwiseMax(y1.cwiseAbs2()).array().sqrt());
  const double sum = (err.cwiseAbs2().array() / scale.square()).sum();
  return std::sqrt(sum / static_cast<double>(err.size()));
}

}  // namespace detail

/// Integrates y' = f(t, y) from t0 over the sorted output times `outputs`
/// (all >= t0; the last one is the final time).
///
///   rhs(t, y, dydt)        fills dydt.
///   observe(i, t, y)       is called once per output time, in order.
///   after_step(t, y)       runs after every accepted step and may adjust y.
///
/// Throws StiffnessError on step-size underflow or when max_steps is exceeded.
template <class State, class Rhs, class Observe, class AfterStep>
Stats integrate(Rhs&& rhs, State y, double t0, std::span<const double> outputs, const Options& opt,
                Observe&& observe, AfterStep&& after_step) {
  using namespace detail;
  Stats stats;
  if (outputs.empty()) return stats;
  if (!(opt.rtol > 0.0) || !(opt.atol > 0.0)) throw PreconditionError("integrator tolerances must be positive");
  if (outputs.front() < t0) throw PreconditionError("output times must not precede the start time");
  for (std::size_t i = 1; i < outputs.size(); ++i) {
    if (outputs[i] < outputs[i - 1]) throw PreconditionError("output times must be sorted");
  }

  const double t_end = outputs.back();
  std::size_t next_out = 0;
  while (next_out < outputs.size() && outputs[next_out] == t0) observe(next_out++, t0, y);
  if (next_out == outputs.size()) return stats;

  State k1(y), k2(y), k3(y), k4(y), k5(y), k6(y), k7(y), y_new(y), y_stage(y);
  auto eval = [&](double t, const State& at, State& out) {
    rhs(t, at, out);
    ++stats.rhs_evaluations;
  };
  eval(t0, y, k1);

  const double span_length = t_end - t0;
  double h = opt.initial_step;
  if (h <= 0.0) {
    // Hairer's starting-step heuristic.
    const double scale_y = detail::scaled_rms(y, State(State::Zero(y.rows(), y.cols())), y, opt);
    const double scale_f = detail::scaled_rms(k1, y, y, opt);
    double h0 = (scale_y < 1e-5 || scale_f < 1e-5) ? 1e-6 : 0.01 * scale_y / scale_f;
    h0 = std::min(h0, span_length);
    y_stage = y + h0 * k1;
    eval(t0 + h0, y_stage, k2);
    const double second = detail::scaled_rms(State(k2 - k1), y, y, opt) / h0;
    const double bound = std::max(scale_f, second);
    const double h1 = bound <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / bound, 1.0 / 5.0);
    h = std::min(100.0 * h0, h1);
  }
  h = std::min({h, opt.max_step, span_length});

  constexpr double kSafety = 0.9, kFacMin = 0.2, kFacMax = 10.0;
  double t = t0;
  bool last_rejected = false;
  while (t < t_end) {
    if (stats.accepted + stats.rejected >= opt.max_steps) {
      throw StiffnessError("integrator exceeded " + std::to_string(opt.max_steps) + " steps at t = " +
                           std::to_string(t));
    }
    const double min_step = 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t));
    if (h < min_step) {
      throw StiffnessError("step size underflow (h = " + std::to_string(h) + ") at t = " + std::to_string(t));
    }
    if (t + h > t_end || t_end - (t + h) < min_step) h = t_end - t;

    y_stage = y + h * (a21 * k1);
    eval(t + c2 * h, y_stage, k2);
    y_stage = y + h * (a31 * k1 + a32 * k2);
    eval(t + c3 * h, y_stage, k3);
    y_stage = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
    eval(t + c4 * h, y_stage, k4);
    y_stage = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    eval(t + c5 * h, y_stage, k5);
    y_stage = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    eval(t + h, y_stage, k6);
    y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    eval(t + h, y_new, k7);

    y_stage = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double err = detail::scaled_rms(y_stage, y, y_new, opt);

    if (!(err <= 1.0)) {
      ++stats.rejected;
      const double fac = std::isfinite(err) ? std::max(kFacMin, kSafety * std::pow(err, -0.2)) : kFacMin;
      h *= std::min(1.0, fac);
      last_rejected = true;
      continue;
    }
    ++stats.accepted;
    const double t_new = (h == t_end - t) ? t_end : t + h;

    if (next_out < outputs.size() && outputs[next_out] <= t_new) {
      // Continuous extension on [t, t_new].
      const State r2 = y_new - y;
      const State r3 = h * k1 - r2;
      const State r4 = r2 - h * k7 - r3;
      const State r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      while (next_out < outputs.size() && outputs[next_out] <= t_new) {
        const double to = outputs[next_out];
        if (to == t_new) {
          // Exact endpoint; observed after after_step below.
          break;
        }
        const double theta = (to - t) / h;
        const double theta1 = 1.0 - theta;
        y_stage = y + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
        observe(next_out++, to, y_stage);
      }
    }

    y.swap(y_new);
    k1.swap(k7);
    t = t_new;
    after_step(t, y);
    while (next_out < outputs.size() && outputs[next_out] == t) observe(next_out++, t, y);

    double fac = kSafety * std::pow(std::max(err, 1e-10), -0.2);
    fac = std::clamp(fac, kFacMin, last_rejected ? 1.0 : kFacMax);
    h = std::min(h * fac, opt.max_step);
    last_rejected = false;
  }
  return stats;
}

}  // namespace erasehead::ode
