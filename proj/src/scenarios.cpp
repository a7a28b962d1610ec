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

#include "erasehead/scenarios.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

#include "erasehead/parallel.hpp"

namespace erasehead {
namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::vector<std::string> working_labels(int n) {
  std::vector<std::string> out;
  for (int k = 1; k <= n; ++k) out.push_back(working_label(k));
  return out;
}

StateVector initial_vector(const InitialState& initial, const CompositeSpace& space) {
  if (initial.bell_phi) {
    if (!space.contains(working_label(2))) throw ConfigError("a bell initial state needs two working qubits");
    return phi_state(space, *initial.bell_phi);
  }
  for (const auto& [label, occ] : initial.occupations) {
    if (!space.contains(label)) throw ConfigError("initial state names unknown mode '" + label + "'");
    if (occ < 0 || occ >= space.mode(label).dimension) {
      throw ConfigError("occupation " + std::to_string(occ) + " is out of range for mode '" + label + "'");
    }
  }
  return basis_state(initial.occupations, space);
}

double max_abs_difference(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

}  // namespace

InitialState InitialState::excited(const std::vector<std::string>& labels) {
  InitialState s;
  for (const auto& l : labels) s.occupations[l] = 1;
  return s;
}

InitialState InitialState::bell(double phi) {
  InitialState s;
  s.bell_phi = phi;
  return s;
}

int InitialState::excitation() const {
  if (bell_phi) return 1;
  int total = 0;
  for (const auto& [label, occ] : occupations) total += occ;
  return total;
}

DeviceParams ScenarioConfig::resolved_params() const {
  DeviceParams p = params;
  const auto n = static_cast<std::size_t>(p.n_working());
  if (couplers.empty()) {
    if (p.omega_c.size() != n) throw ConfigError("expected " + std::to_string(n) + " coupler frequencies");
    return p;
  }
  if (couplers.size() != n) {
    throw ConfigError("expected " + std::to_string(n) + " coupler settings, got " + std::to_string(couplers.size()));
  }
  p.omega_c.resize(n);
  for (std::size_t k = 0; k < n; ++k) p.omega_c[k] = couplers[k].idle ? idle_frequency(params) : couplers[k].frequency;
  return p;
}

std::vector<std::string> ScenarioConfig::resolved_targets() const {
  const auto all = working_labels(n_working());
  if (targets.empty()) return all;
  for (const auto& t : targets) {
    if (!contains(all, t)) throw ConfigError("reset target '" + t + "' is not a working qubit");
  }
  return targets;
}

std::vector<std::string> ScenarioConfig::resolved_observables() const {
  std::vector<std::string> out = observables;
  if (out.empty()) {
    out = working_labels(n_working());
    for (int k = 1; k <= n_working(); ++k) out.push_back(coupler_label(k));
    out.push_back(kHeadLabel);
    out.push_back(kResonatorLabel);
  }
  for (const auto& t : resolved_targets()) {
    if (!contains(out, t)) out.push_back(t);
  }
  return out;
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  config.evolution.validate();
  ScenarioResult result;
  result.config = config;
  result.params = config.resolved_params();
  const DeviceParams& p = result.params;
  const int n = p.n_working();
  const auto targets = config.resolved_targets();
  const auto labels = config.resolved_observables();

  const SpacePtr space = build_space(p, n);
  const StateVector psi = initial_vector(config.initial, *space);
  TimeDependentHamiltonian h = rotating_frame_hamiltonian(p, space, p.omega_r);
  std::vector<CollapseChannel> channels{
      CollapseChannel(embed(lowering_operator(space->mode(kResonatorLabel).dimension), kResonatorLabel, space).matrix(), p.kappa)};
  std::vector<Observable> observables;
  for (const auto& l : labels) {
    if (!space->contains(l)) throw ConfigError("observable names unknown mode '" + l + "'");
    observables.push_back({l, number_operator(l, space).matrix()});
  }

  Vector amplitudes = psi.amplitudes();
  result.full_dimension = space->total_dimension();
  if (config.use_sector) {
    const int excitation = config.initial.excitation();
    const int n_max = config.sector_n_max.value_or(excitation);
    if (n_max < excitation) {
      throw ConfigError("sector cap " + std::to_string(n_max) + " is below the initial excitation " +
                        std::to_string(excitation));
    }
    const ExcitationSector sector(space, n_max);
    h = h.restricted(sector);
    for (auto& c : channels) c = c.restricted(sector);
    for (auto& o : observables) o.op = sector.restrict(o.op);
    amplitudes = sector.restrict(amplitudes);
  }
  result.evolved_dimension = amplitudes.size();

  result.traces = evolve_master(DensityMatrix::pure(StateVector(amplitudes)), h, channels, config.evolution, observables);
  result.report = reset_time(result.traces, targets, config.threshold, config.mode);

  for (const auto& q : working_labels(n)) {
    if (contains(targets, q) || !result.traces.has(q)) continue;
    const auto& s = result.traces[q];
    double worst = 0.0;
    for (double v : s) worst = std::max(worst, std::abs(v - s.front()));
    result.protection.push_back({q, 1.0 - worst});
  }

  bool complete = result.traces.has(kHeadLabel) && result.traces.has(kResonatorLabel);
  for (int k = 1; k <= n; ++k) complete = complete && result.traces.has(working_label(k)) && result.traces.has(coupler_label(k));
  if (complete) {
    TrappingCheck tc;
    const double excitation = config.initial.excitation();
    for (std::size_t i = 0; i < result.traces.size(); ++i) {
      tc.max_head = std::max(tc.max_head, result.traces[kHeadLabel][i]);
      tc.max_resonator = std::max(tc.max_resonator, result.traces[kResonatorLabel][i]);
      double budget = 0.0;
      for (int k = 1; k <= n; ++k) budget += result.traces[working_label(k)][i] + result.traces[coupler_label(k)][i];
      tc.max_budget_error = std::max(tc.max_budget_error, std::abs(budget - excitation));
    }
    result.trapping = tc;
  }

  if (config.initial.bell_phi) {
    result.initial_dark_check = darkstate_eigencheck(build_qubit_coupler(p, space), psi, p.g_qc);
    result.initial_dark_check->phi = *config.initial.bell_phi;
  }
  result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

ScenarioConfig selective_config(const DeviceParams& params, const std::string& target, double reset_frequency) {
  const int n = params.n_working();
  const auto labels = working_labels(n);
  const auto it = std::find(labels.begin(), labels.end(), target);
  if (it == labels.end()) throw ConfigError("reset target '" + target + "' is not a working qubit");
  ScenarioConfig c;
  c.id = "selective_" + target;
  c.params = params;
  c.couplers.assign(static_cast<std::size_t>(n), CouplerSetting::at_idle());
  c.couplers[static_cast<std::size_t>(it - labels.begin())] = CouplerSetting::at(reset_frequency);
  c.initial = InitialState::excited(labels);
  c.evolution.t_end = 600.0;
  c.evolution.grid_step = 0.1;
  c.targets = {target};
  return c;
}

ScenarioResult selective_reset(const DeviceParams& params, const std::string& target, double reset_frequency) {
  return run_scenario(selective_config(params, target, reset_frequency));
}

ScenarioConfig simultaneous_config(const DeviceParams& params, double reset_frequency) {
  const int n = params.n_working();
  ScenarioConfig c;
  c.id = "simultaneous";
  c.params = params;
  c.couplers.assign(static_cast<std::size_t>(n), CouplerSetting::at(reset_frequency));
  c.initial = InitialState::excited(working_labels(n));
  c.evolution.t_end = 600.0;
  c.evolution.grid_step = 0.1;
  return c;
}

ScenarioResult simultaneous_reset(const DeviceParams& params, double reset_frequency) {
  return run_scenario(simultaneous_config(params, reset_frequency));
}

ScenarioConfig dark_state_config(const DeviceParams& params, double phi, double omega_c1, double omega_c2) {
  if (params.n_working() != 2) throw CapabilityError("the dark-state scenario needs exactly two working qubits");
  ScenarioConfig c;
  c.id = "dark_state";
  c.params = params;
  c.couplers = {CouplerSetting::at(omega_c1), CouplerSetting::at(omega_c2)};
  c.initial = InitialState::bell(phi);
  c.evolution.t_end = 200.0;
  c.evolution.grid_step = 0.1;
  return c;
}

DarkStateDemo dark_state_demo(const DeviceParams& params, double symmetric_frequency, double detuned_c1,
                              double detuned_c2) {
  const double pi = kTwoPi / 2.0;
  ScenarioConfig sym = dark_state_config(params, pi, symmetric_frequency, symmetric_frequency);
  sym.id = "dark_state_symmetric";
  ScenarioConfig det = dark_state_config(params, pi, detuned_c1, detuned_c2);
  det.id = "dark_state_detuned";
  auto sym_run = std::async(std::launch::async, [&] { return run_scenario(sym); });
  DarkStateDemo demo;
  demo.detuned = run_scenario(det);
  demo.symmetric = sym_run.get();
  return demo;
}

DetuningSearch dark_state_search(const DeviceParams& params, const std::vector<double>& grid_c1,
                                 const std::vector<double>& grid_c2, double phi) {
  DetuningSearch search;
  for (double w1 : grid_c1) {
    for (double w2 : grid_c2) {
      if (w1 != w2) search.points.push_back({w1, w2, std::nullopt});
    }
  }
  const auto taus = parallel_map(search.points.size(), [&](std::size_t i) {
    const auto r = run_scenario(dark_state_config(params, phi, search.points[i].omega_c1, search.points[i].omega_c2));
    return r.report.tau_res;
  });
  for (std::size_t i = 0; i < taus.size(); ++i) {
    search.points[i].tau_res = taus[i];
    if (taus[i] && (!search.best || *taus[i] < *search.best->tau_res)) search.best = search.points[i];
  }
  return search;
}

ScenarioConfig scaling_config(const DeviceParams& params, double t_end) {
  const int n = params.n_working();
  ScenarioConfig c;
  c.id = "scaling_" + std::to_string(n);
  c.params = params;
  for (double w : params.omega_c) c.couplers.push_back(CouplerSetting::at(w));
  c.initial = InitialState::excited(working_labels(n));
  c.evolution.t_end = t_end;
  c.evolution.grid_step = 0.5;
  c.sector_n_max = n;
  return c;
}

ScenarioResult scaling_demo(const DeviceParams& params, double t_end) { return run_scenario(scaling_config(params, t_end)); }

EffectiveComparison effective_vs_full(const DeviceParams& params, double delta, const InitialState& initial,
                                      double t_end, double grid_step) {
  if (delta == 0.0) throw ResonantRegimeError("effective model is undefined at zero coupler detuning");
  if (std::abs(delta) < 5.0 * std::abs(params.g_qc)) {
    std::ostringstream os;
    os << "|delta| = " << to_mhz(std::abs(delta)) << " MHz is below 5 g_qc = " << to_mhz(5.0 * std::abs(params.g_qc))
       << " MHz; the dispersive model is not valid there";
    throw PreconditionError(os.str());
  }
  if (params.n_working() != 2) throw CapabilityError("effective comparison needs exactly two working qubits");

  EffectiveComparison out;
  out.delta = delta;
  out.labels = {working_label(1), working_label(2), kHeadLabel, kResonatorLabel};

  ScenarioConfig full;
  full.id = "effective_vs_full";
  full.params = params;
  full.couplers.assign(2, CouplerSetting::at(params.omega_r - delta));
  full.initial = initial;
  full.evolution.t_end = t_end;
  full.evolution.grid_step = grid_step;
  full.observables = out.labels;
  full.targets = {working_label(1)};
  const DeviceParams resolved = full.resolved_params();

  auto full_run = std::async(std::launch::async, [&] { return run_scenario(full).traces; });

  const SpacePtr reduced = build_reduced_space(resolved, 2);
  const StateVector psi = initial_vector(initial, *reduced);
  const ExcitationSector sector(reduced, initial.excitation());
  const TimeDependentHamiltonian h = effective_hamiltonian(resolved, reduced).restricted(sector);
  const std::vector<CollapseChannel> channels{
      CollapseChannel(embed(lowering_operator(reduced->mode(kResonatorLabel).dimension), kResonatorLabel, reduced).matrix(), resolved.kappa)
          .restricted(sector)};
  std::vector<Observable> observables;
  for (const auto& l : out.labels) observables.push_back({l, sector.restrict(number_operator(l, reduced).matrix())});
  out.effective = evolve_master(DensityMatrix::pure(StateVector(sector.restrict(psi.amplitudes()))), h, channels,
                                full.evolution, observables);
  out.full = full_run.get();

  for (const auto& l : out.labels) {
    out.max_deviation.push_back(max_abs_difference(out.full[l], out.effective[l]));
    out.worst = std::max(out.worst, out.max_deviation.back());
  }
  return out;
}

RatioReport ratio_experiment(const DeviceParams& params, double reset_frequency, double threshold) {
  ScenarioConfig sim = simultaneous_config(params, reset_frequency);
  sim.threshold = threshold;
  RatioReport out;
  if (params.n_working() == 1) {
    out.simultaneous = run_scenario(sim).report;
    out.selective = out.simultaneous;
  } else {
    ScenarioConfig sel = selective_config(params, working_label(1), reset_frequency);
    sel.threshold = threshold;
    auto sim_run = std::async(std::launch::async, [&] { return run_scenario(sim).report; });
    out.selective = run_scenario(sel).report;
    out.simultaneous = sim_run.get();
  }
  if (!out.selective.reached() || !out.simultaneous.reached()) {
    std::ostringstream os;
    os << "reset threshold " << threshold << " not reached:";
    if (!out.selective.reached()) os << " selective leg";
    if (!out.simultaneous.reached()) os << " simultaneous leg";
    throw UnreachedResetError(os.str(), out.selective, out.simultaneous);
  }
  out.ratio = params.n_working() == 1 ? 1.0 : *out.simultaneous.tau_res / *out.selective.tau_res;
  if (out.selective.tau_res_alternate && out.simultaneous.tau_res_alternate) {
    out.ratio_alternate =
        params.n_working() == 1 ? 1.0 : *out.simultaneous.tau_res_alternate / *out.selective.tau_res_alternate;
  }
  return out;
}

}  // namespace erasehead
