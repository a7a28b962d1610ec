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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <complex>

#include "erasehead/errors.hpp"
#include "erasehead/ode.hpp"

namespace ode = erasehead::ode;
using Vec = Eigen::VectorXd;

namespace {

auto noop = [](double, Vec&) {};

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out;
  for (int k = 0; k < n; ++k) out.push_back(a + (b - a) * k / (n - 1));
  return out;
}

}  // namespace

TEST(Dopri5, ExponentialDecayOnDenseGrid) {
  const auto grid = linspace(0.0, 5.0, 101);
  Vec y0(1);
  y0 << 1.0;
  double worst = 0.0;
  std::size_t seen = 0;
  ode::Options opt;
  opt.rtol = 1e-10;
  opt.atol = 1e-12;
  const auto stats = ode::integrate(
      [](double, const Vec& y, Vec& dy) { dy = -1.3 * y; }, y0, 0.0, grid, opt,
      [&](std::size_t i, double t, const Vec& y) {
        EXPECT_EQ(i, seen++);
        worst = std::max(worst, std::abs(y(0) - std::exp(-1.3 * t)));
      },
      noop);
  EXPECT_EQ(seen, grid.size());
  EXPECT_LT(worst, 1e-9);
  // Output points come from dense output and do not shorten the steps.
  const std::vector<double> sparse_grid{5.0};
  const auto coarse = ode::integrate([](double, const Vec& y, Vec& dy) { dy = -1.3 * y; }, y0, 0.0, sparse_grid, opt,
                                     [](std::size_t, double, const Vec&) {}, noop);
  EXPECT_EQ(stats.accepted, coarse.accepted);
}

TEST(Dopri5, HarmonicOscillatorComplexState) {
  using CVec = Eigen::VectorXcd;
  CVec y0(1);
  y0 << std::complex<double>(1.0, 0.0);
  const std::vector<double> outs{0.5, 3.0, 10.0};
  std::vector<std::complex<double>> got;
  ode::integrate(
      [](double, const CVec& y, CVec& dy) { dy = std::complex<double>(0.0, -2.0) * y; }, y0, 0.0, outs,
      ode::Options{}, [&](std::size_t, double, const CVec& y) { got.push_back(y(0)); }, [](double, CVec&) {});
  ASSERT_EQ(got.size(), 3u);
  for (std::size_t k = 0; k < outs.size(); ++k) {
    EXPECT_LT(std::abs(got[k] - std::polar(1.0, -2.0 * outs[k])), 1e-7);
  }
}

TEST(Dopri5, TimeDependentRhs) {
  Vec y0(1);
  y0 << 0.0;
  double final_value = 0.0;
  const std::vector<double> outs{2.0};
  ode::integrate([](double t, const Vec&, Vec& dy) { dy.setConstant(std::cos(t)); }, y0, 0.0, outs,
                 ode::Options{}, [&](std::size_t, double, const Vec& y) { final_value = y(0); }, noop);
  EXPECT_NEAR(final_value, std::sin(2.0), 1e-8);
}

TEST(Dopri5, StartTimeOutputObservedOnce) {
  Vec y0(1);
  y0 << 4.0;
  std::vector<double> seen;
  const std::vector<double> outs{1.0, 1.0, 2.0};
  ode::integrate([](double, const Vec&, Vec& dy) { dy.setZero(); }, y0, 1.0, outs, ode::Options{},
                 [&](std::size_t, double t, const Vec&) { seen.push_back(t); }, noop);
  EXPECT_EQ(seen, outs);
}

TEST(Dopri5, AfterStepHookRuns) {
  Vec y0(1);
  y0 << 1.0;
  int calls = 0;
  const std::vector<double> outs{1.0};
  ode::integrate([](double, const Vec& y, Vec& dy) { dy = y; }, y0, 0.0, outs, ode::Options{},
                 [](std::size_t, double, const Vec&) {}, [&](double, Vec&) { ++calls; });
  EXPECT_GT(calls, 0);
}

TEST(Dopri5, Preconditions) {
  Vec y0 = Vec::Ones(1);
  auto f = [](double, const Vec&, Vec& dy) { dy.setZero(); };
  auto obs = [](std::size_t, double, const Vec&) {};
  const std::vector<double> unsorted{2.0, 1.0};
  const std::vector<double> early{-1.0};
  const std::vector<double> fine{1.0};
  EXPECT_THROW(ode::integrate(f, y0, 0.0, unsorted, ode::Options{}, obs, noop), erasehead::PreconditionError);
  EXPECT_THROW(ode::integrate(f, y0, 0.0, early, ode::Options{}, obs, noop), erasehead::PreconditionError);
  ode::Options bad;
  bad.rtol = 0.0;
  EXPECT_THROW(ode::integrate(f, y0, 0.0, fine, bad, obs, noop), erasehead::PreconditionError);
}

TEST(Dopri5, StiffnessErrorOnStepBudget) {
  Vec y0 = Vec::Ones(1);
  ode::Options opt;
  opt.max_steps = 10;
  const std::vector<double> outs{100.0};
  EXPECT_THROW(ode::integrate([](double, const Vec& y, Vec& dy) { dy = -1e4 * y; }, y0, 0.0, outs, opt,
                              [](std::size_t, double, const Vec&) {}, noop),
               erasehead::StiffnessError);
}

TEST(Dopri5, StiffnessErrorOnBlowUp) {
  Vec y0 = Vec::Ones(1);
  const std::vector<double> outs{2.0};
  // y' = y^2 blows up at t = 1.
  EXPECT_THROW(ode::integrate([](double, const Vec& y, Vec& dy) { dy = y.cwiseAbs2(); }, y0, 0.0, outs,
                              ode::Options{}, [](std::size_t, double, const Vec&) {}, noop),
               erasehead::StiffnessError);
}

TEST(Dopri5, MaxStepRespected) {
  Vec y0 = Vec::Ones(1);
  ode::Options opt;
  opt.max_step = 0.01;
  const std::vector<double> outs{1.0};
  const auto stats = ode::integrate([](double, const Vec&, Vec& dy) { dy.setZero(); }, y0, 0.0, outs, opt,
                                    [](std::size_t, double, const Vec&) {}, noop);
  EXPECT_GE(stats.accepted, 100u);
}
