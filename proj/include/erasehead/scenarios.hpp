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

#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "erasehead/analysis.hpp"
#include "erasehead/dynamics.hpp"
#include "erasehead/errors.hpp"
#include "erasehead/model.hpp"

namespace erasehead {

/// Coupler frequency choice: the idling point or an explicit value.
struct CouplerSetting {
  bool idle = true;
  double frequency = 0.0;  // rad/ns, used when !idle

  static CouplerSetting at_idle() { return {}; }
  static CouplerSetting at(double frequency) { return {false, frequency}; }
  bool operator==(const CouplerSetting&) const = default;
};

/// Either an occupation-basis product state or the (|10> + e^{i phi}|01>)/sqrt(2) state.
struct InitialState {
  std::map<std::string, int> occupations;
  std::optional<double> bell_phi;

  static InitialState excited(const std::vector<std::string>& labels);
  static InitialState bell(double phi);
  int excitation() const;
  bool operator==(const InitialState&) const = default;
};

struct ScenarioConfig {
  std::string id = "scenario";
  DeviceParams params;  // omega_c is overwritten from `couplers` on resolution
  std::vector<CouplerSetting> couplers;
  InitialState initial;
  EvolutionConfig evolution;
  std::vector<std::string> observables;  // empty: every mode
  std::vector<std::string> targets;      // empty: every working qubit
  double threshold = kDefaultThreshold;
  CrossingMode mode = CrossingMode::Sustained;
  bool reset_mandatory = false;
  /// Excitation cap for the sector restriction. Unset: the initial excitation.
  std::optional<int> sector_n_max;
  bool use_sector = true;

  int n_working() const { return params.n_working(); }
  /// Params with coupler settings applied. Throws ConfigError when the
  /// coupler list does not match the working-qubit count.
  DeviceParams resolved_params() const;
  std::vector<std::string> resolved_targets() const;
  std::vector<std::string> resolved_observables() const;
};

struct ProtectionEntry {
  std::string label;
  /// 1 - max_t |<n>(t) - <n>(0)|: how well the qubit keeps its initial population.
  double min_fidelity = 1.0;
};

struct TrappingCheck {
  double max_head = 0.0;       // max_t <n_q0>
  double max_resonator = 0.0;  // max_t <n_r>
  double max_budget_error = 0.0;  // max_t |sum of qubit and coupler populations - initial excitation|
};

struct ScenarioResult {
  ScenarioConfig config;
  DeviceParams params;  // resolved
  TraceSet traces;
  ResetReport report;
  std::vector<ProtectionEntry> protection;
  std::optional<TrappingCheck> trapping;
  std::optional<DarkStateEntry> initial_dark_check;
  Index full_dimension = 0;
  Index evolved_dimension = 0;
  double wall_seconds = 0.0;
};

/// Rotating-frame Lindblad run of `config`.
ScenarioResult run_scenario(const ScenarioConfig& config);

/// Target coupler at `reset_frequency`, the other at its idling point, both
/// qubits excited, 600 ns window. Throws ConfigError for an unknown target.
ScenarioConfig selective_config(const DeviceParams& params, const std::string& target,
                                double reset_frequency = from_ghz(3.1));
ScenarioResult selective_reset(const DeviceParams& params, const std::string& target,
                               double reset_frequency = from_ghz(3.1));

/// Every coupler at `reset_frequency`, every working qubit a target.
ScenarioConfig simultaneous_config(const DeviceParams& params, double reset_frequency = from_ghz(3.1));
ScenarioResult simultaneous_reset(const DeviceParams& params, double reset_frequency = from_ghz(3.1));

/// Bell-state run on a two-qubit device over 200 ns.
ScenarioConfig dark_state_config(const DeviceParams& params, double phi, double omega_c1, double omega_c2);

struct DarkStateDemo {
  ScenarioResult symmetric;  // both couplers equal, phi = pi
  ScenarioResult detuned;    // distinct coupler frequencies, phi = pi
};
DarkStateDemo dark_state_demo(const DeviceParams& params, double symmetric_frequency = from_ghz(3.1),
                              double detuned_c1 = from_ghz(3.1), double detuned_c2 = from_ghz(2.9));

struct DetuningPoint {
  double omega_c1 = 0.0;
  double omega_c2 = 0.0;
  std::optional<double> tau_res;
};
struct DetuningSearch {
  std::vector<DetuningPoint> points;
  std::optional<DetuningPoint> best;
};
/// Grid search over coupler pairs with omega_c1 != omega_c2 for the fastest
/// dark-state erasure. Points run on a worker pool.
DetuningSearch dark_state_search(const DeviceParams& params, const std::vector<double>& grid_c1,
                                 const std::vector<double>& grid_c2, double phi = kTwoPi / 2.0);

/// Chain device with every working qubit excited, simultaneous reset.
ScenarioConfig scaling_config(const DeviceParams& params, double t_end = 3000.0);
ScenarioResult scaling_demo(const DeviceParams& params, double t_end = 3000.0);

struct EffectiveComparison {
  double delta = 0.0;
  std::vector<std::string> labels;
  std::vector<double> max_deviation;  // per mode
  double worst = 0.0;
  TraceSet full;
  TraceSet effective;
};
/// Full device with both couplers at omega_r - delta against the dispersive
/// model from the same reduced initial state. Throws ResonantRegimeError for
/// delta = 0 and PreconditionError when |delta| < 5 g_qc.
EffectiveComparison effective_vs_full(const DeviceParams& params, double delta, const InitialState& initial,
                                      double t_end = 300.0, double grid_step = 0.5);

struct RatioReport {
  ResetReport selective;
  ResetReport simultaneous;
  double ratio = 0.0;
  std::optional<double> ratio_alternate;
};

class UnreachedResetError : public PreconditionError {
 public:
  UnreachedResetError(const std::string& what, ResetReport selective, ResetReport simultaneous)
      : PreconditionError(what), selective(std::move(selective)), simultaneous(std::move(simultaneous)) {}
  ResetReport selective;
  ResetReport simultaneous;
};

/// Selective (q1) and simultaneous legs run concurrently. Throws
/// UnreachedResetError carrying both reports when a leg never reaches the
/// threshold; a single working qubit gives ratio 1.
RatioReport ratio_experiment(const DeviceParams& params, double reset_frequency = from_ghz(3.1),
                             double threshold = kDefaultThreshold);

}  // namespace erasehead
