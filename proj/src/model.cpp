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

#include "erasehead/model.hpp"

#include <cmath>
#include <sstream>

#include "erasehead/errors.hpp"

namespace erasehead {
namespace {

struct Link {
  std::string qubit;
  std::string partner;  // q0 for the head branches, q1/q2 for the chain extensions
  std::string coupler;
  double g;
  int coupler_index;  // zero-based into omega_c
};

std::vector<Link> links(const DeviceParams& params, int n_working) {
  std::vector<Link> out;
  for (int n = 1; n <= std::min(n_working, 2); ++n) {
    out.push_back({working_label(n), kHeadLabel, coupler_label(n), params.g_qc, n - 1});
  }
  // q3 hangs off q1 through c3, q4 off q2 through c4.
  for (int n = 3; n <= n_working; ++n) {
    out.push_back({working_label(n), working_label(n - 2), coupler_label(n), params.g_qc_add, n - 1});
  }
  return out;
}

SparseMatrix sigma_minus() { return lowering_operator(2); }
SparseMatrix sigma_plus() { return raising_operator(2); }

Operator lower(const std::string& label, const SpacePtr& space) {
  return embed(lowering_operator(space->mode(label).dimension), label, space);
}

void require_frequencies(const DeviceParams& params, int n_working) {
  if (static_cast<int>(params.omega_q.size()) < n_working) {
    throw ConfigError("missing working-qubit frequency: need " + std::to_string(n_working) + ", have " +
                      std::to_string(params.omega_q.size()));
  }
  if (static_cast<int>(params.omega_c.size()) < n_working) {
    throw ConfigError("missing coupler frequency: need " + std::to_string(n_working) + ", have " +
                      std::to_string(params.omega_c.size()));
  }
}

int count_working(const CompositeSpace& space) {
  int n = 0;
  for (const auto& m : space.modes()) n += m.kind == ModeKind::WorkingQubit ? 1 : 0;
  return n;
}

bool has_couplers(const CompositeSpace& space) { return space.contains(coupler_label(1)); }

DeviceParams resonant_device(double g_r_mhz, double kappa_mhz) {
  DeviceParams p;
  p.omega_q = {from_ghz(3.0), from_ghz(3.0)};
  p.omega_q0 = from_ghz(3.0);
  p.omega_r = from_ghz(3.0);
  p.g_qc = from_mhz(100.0);
  p.g_p = from_mhz(3.0);
  p.g_r = from_mhz(g_r_mhz);
  p.kappa = from_mhz(kappa_mhz);
  p.fock_cutoff = 3;
  const double idle = idle_frequency(p);
  p.omega_c = {idle, idle};
  return p;
}

}  // namespace

DeviceParams DeviceParams::two_qubit_reference() { return resonant_device(100.0, 30.0); }

DeviceParams DeviceParams::dark_state_reference() { return resonant_device(120.0, 150.0); }

DeviceParams DeviceParams::chain_reference(int n_working) {
  if (n_working != 3 && n_working != 4) {
    throw CapabilityError("chain device supports 3 or 4 working qubits, got " + std::to_string(n_working));
  }
  DeviceParams p = resonant_device(120.0, 150.0);
  p.g_qc_add = from_mhz(90.0);
  p.omega_q.assign(static_cast<std::size_t>(n_working), from_ghz(3.0));
  p.omega_c = {from_ghz(3.1), from_ghz(2.9), from_ghz(2.9)};
  if (n_working == 4) p.omega_c.push_back(from_ghz(3.1));
  return p;
}

std::vector<std::string> DeviceParams::soft_warnings() const {
  std::vector<std::string> out;
  if (g_qc != 0.0 && std::abs(g_p) > 0.1 * std::abs(g_qc)) {
    std::ostringstream os;
    os << "parasitic coupling |g_p| = " << to_mhz(std::abs(g_p)) << " MHz is not much smaller than |g_qc| = "
       << to_mhz(std::abs(g_qc)) << " MHz";
    out.push_back(os.str());
  }
  return out;
}

std::string working_label(int n) { return "q" + std::to_string(n); }
std::string coupler_label(int n) { return "c" + std::to_string(n); }

SpacePtr build_space(const DeviceParams& params, int n_working) {
  if (n_working < 1 || n_working > 4) {
    throw CapabilityError("supported devices have 1 to 4 working qubits, got " + std::to_string(n_working));
  }
  std::vector<ModeSpec> modes;
  for (int n = 1; n <= n_working; ++n) modes.push_back(ModeSpec::two_level(working_label(n), ModeKind::WorkingQubit));
  for (int n = 1; n <= n_working; ++n) modes.push_back(ModeSpec::two_level(coupler_label(n), ModeKind::Coupler));
  modes.push_back(ModeSpec::two_level(kHeadLabel, ModeKind::HeadQubit));
  modes.push_back(ModeSpec::resonator(kResonatorLabel, params.fock_cutoff));
  return std::make_shared<const CompositeSpace>(std::move(modes));
}

SpacePtr build_reduced_space(const DeviceParams& params, int n_working) {
  if (n_working < 1 || n_working > 2) {
    throw CapabilityError("the dispersive model supports 1 or 2 working qubits, got " + std::to_string(n_working));
  }
  std::vector<ModeSpec> modes;
  for (int n = 1; n <= n_working; ++n) modes.push_back(ModeSpec::two_level(working_label(n), ModeKind::WorkingQubit));
  modes.push_back(ModeSpec::two_level(kHeadLabel, ModeKind::HeadQubit));
  modes.push_back(ModeSpec::resonator(kResonatorLabel, params.fock_cutoff));
  return std::make_shared<const CompositeSpace>(std::move(modes));
}

Operator build_bare(const DeviceParams& params, const SpacePtr& space) {
  const int n_working = count_working(*space);
  if (static_cast<int>(params.omega_q.size()) < n_working) {
    throw ConfigError("missing working-qubit frequency for " + working_label(n_working));
  }
  Operator h = Operator::zero(space);
  for (int n = 1; n <= n_working; ++n) h += params.omega_q[n - 1] * number_operator(working_label(n), space);
  if (has_couplers(*space)) {
    require_frequencies(params, n_working);
    for (int n = 1; n <= n_working; ++n) h += params.omega_c[n - 1] * number_operator(coupler_label(n), space);
  }
  h += params.omega_q0 * number_operator(kHeadLabel, space);
  h += params.omega_r * number_operator(kResonatorLabel, space);
  return h;
}

Operator build_head_coupling(const DeviceParams& params, const SpacePtr& space) {
  const Operator term = embed(sigma_plus(), kHeadLabel, space) * lower(kResonatorLabel, space);
  return params.g_r * (term + term.adjoint());
}

Operator build_qubit_coupler(const DeviceParams& params, const SpacePtr& space) {
  Operator h = Operator::zero(space);
  for (const Link& link : links(params, count_working(*space))) {
    const Operator c_minus = embed(sigma_minus(), link.coupler, space);
    const Operator hop = link.g * ((embed(sigma_plus(), link.qubit, space) + embed(sigma_plus(), link.partner, space)) * c_minus);
    const Operator parasitic = params.g_p * (embed(sigma_plus(), link.partner, space) * embed(sigma_minus(), link.qubit, space));
    h += hop + parasitic;
  }
  return h + h.adjoint();
}

HamiltonianSet build_hamiltonians(const DeviceParams& params, const SpacePtr& space) {
  Operator bare = build_bare(params, space);
  Operator head = build_head_coupling(params, space);
  Operator qc = build_qubit_coupler(params, space);
  Operator total = bare + head + qc;
  return HamiltonianSet{space, std::move(bare), std::move(head), std::move(qc), std::move(total)};
}

double idle_detuning(const DeviceParams& params) {
  if (params.g_p == 0.0) {
    throw DivisionByZeroError("idling point undefined for g_p = 0: delta_idle = omega_r - omega_c_idle = -g_qc^2 / g_p");
  }
  return -params.g_qc * params.g_qc / params.g_p;
}

double idle_frequency(const DeviceParams& params) { return params.omega_r - idle_detuning(params); }

double effective_coupling(double delta, const DeviceParams& params) {
  if (delta == 0.0) {
    throw ResonantRegimeError("effective coupling g_p + g_qc^2/delta is undefined at zero coupler detuning");
  }
  return params.g_p + params.g_qc * params.g_qc / delta;
}

// ---------------------------------------------------------------------------

TimeDependentHamiltonian::TimeDependentHamiltonian(SparseMatrix constant, std::vector<ModulatedTerm> terms)
    : constant_(std::move(constant)), terms_(std::move(terms)) {
  if (constant_.rows() != constant_.cols()) throw ShapeError("Hamiltonian must be square");
  for (const auto& term : terms_) {
    if (term.op.rows() != constant_.rows() || term.op.cols() != constant_.cols()) {
      throw ShapeError("modulated term does not match the constant part");
    }
  }
}

SparseMatrix TimeDependentHamiltonian::at(double t) const {
  SparseMatrix h = constant_;
  for (const auto& term : terms_) {
    const cplx phase = std::polar(1.0, term.detuning * t);
    h += phase * term.op + std::conj(phase) * SparseMatrix(term.op.adjoint());
  }
  return h;
}

TimeDependentHamiltonian TimeDependentHamiltonian::restricted(const ExcitationSector& sector) const {
  std::vector<ModulatedTerm> terms;
  terms.reserve(terms_.size());
  for (const auto& term : terms_) terms.push_back({sector.restrict(term.op), term.detuning});
  return TimeDependentHamiltonian(sector.restrict(constant_), std::move(terms));
}

TimeDependentHamiltonian rotating_frame_hamiltonian(const DeviceParams& params, const SpacePtr& space,
                                                    double frame_frequency) {
  const Operator h = build_hamiltonians(params, space).total - frame_frequency * total_excitation_operator(space);
  return TimeDependentHamiltonian(h.matrix());
}

namespace {

void require_resonant(const DeviceParams& params, int n_working) {
  const double tol = 1e-12 * std::max(1.0, std::abs(params.omega_r));
  auto check = [&](double w, const std::string& label) {
    if (std::abs(w - params.omega_r) > tol) {
      throw PreconditionError("interaction picture assumes every qubit resonant with the resonator; " + label +
                              " is at " + std::to_string(to_ghz(w)) + " GHz, resonator at " +
                              std::to_string(to_ghz(params.omega_r)) + " GHz");
    }
  };
  for (int n = 1; n <= n_working; ++n) check(params.omega_q.at(static_cast<std::size_t>(n - 1)), working_label(n));
  check(params.omega_q0, kHeadLabel);
}

}  // namespace

TimeDependentHamiltonian interaction_picture(const DeviceParams& params, const SpacePtr& space) {
  const int n_working = count_working(*space);
  require_frequencies(params, n_working);
  require_resonant(params, n_working);

  Operator statics = Operator::zero(space);
  std::vector<ModulatedTerm> terms;
  for (const Link& link : links(params, n_working)) {
    const Operator c_minus = embed(sigma_minus(), link.coupler, space);
    const Operator hop = link.g * ((embed(sigma_plus(), link.qubit, space) + embed(sigma_plus(), link.partner, space)) * c_minus);
    terms.push_back({hop.matrix(), params.omega_r - params.omega_c[static_cast<std::size_t>(link.coupler_index)]});
    statics += params.g_p * (embed(sigma_plus(), link.qubit, space) * embed(sigma_minus(), link.partner, space));
  }
  statics += params.g_r * (embed(sigma_plus(), kHeadLabel, space) * lower(kResonatorLabel, space));
  statics += statics.adjoint();
  return TimeDependentHamiltonian(statics.matrix(), std::move(terms));
}

Operator interaction_hamiltonian(const DeviceParams& params, const SpacePtr& space, double t) {
  return Operator(space, interaction_picture(params, space).at(t));
}

EffectiveModel effective_model(const DeviceParams& params) {
  const int n_working = params.n_working();
  if (n_working < 1 || n_working > 2) {
    throw CapabilityError("the dispersive model supports 1 or 2 working qubits, got " + std::to_string(n_working));
  }
  require_frequencies(params, n_working);
  EffectiveModel m;
  double head_shift = 0.0;
  for (int n = 0; n < n_working; ++n) {
    const double delta = params.omega_r - params.omega_c[static_cast<std::size_t>(n)];
    if (delta == 0.0) {
      throw ResonantRegimeError("coupler " + coupler_label(n + 1) + " is resonant; the dispersive model needs delta != 0");
    }
    if (std::abs(delta) < 5.0 * std::abs(params.g_qc)) {
      std::ostringstream os;
      os << "coupler " << coupler_label(n + 1) << " detuning |delta| = " << to_mhz(std::abs(delta))
         << " MHz is below 5 g_qc = " << to_mhz(5.0 * std::abs(params.g_qc)) << " MHz (not dispersive)";
      m.warnings.push_back(os.str());
    }
    const double shift = params.g_qc * params.g_qc / delta;
    m.delta.push_back(delta);
    m.g_eff.push_back(effective_coupling(delta, params));
    m.delta_phase.push_back(shift);
    m.omega_shifted.push_back(params.omega_r + shift);
    head_shift += shift;
  }
  m.omega_shifted.push_back(params.omega_r + head_shift);
  m.symmetric = n_working == 2 && m.delta[0] == m.delta[1];
  return m;
}

TimeDependentHamiltonian effective_hamiltonian(const DeviceParams& params, const SpacePtr& reduced_space) {
  const EffectiveModel m = effective_model(params);
  if (count_working(*reduced_space) != params.n_working() || has_couplers(*reduced_space)) {
    throw ShapeError("effective Hamiltonian lives on the reduced space without couplers");
  }
  std::vector<ModulatedTerm> terms;
  const Operator head_minus = embed(sigma_minus(), kHeadLabel, reduced_space);
  for (int n = 1; n <= params.n_working(); ++n) {
    const Operator hop = m.g_eff[static_cast<std::size_t>(n - 1)] * (embed(sigma_plus(), working_label(n), reduced_space) * head_minus);
    terms.push_back({hop.matrix(), m.delta_phase[static_cast<std::size_t>(n - 1)]});
  }
  Operator statics = params.g_r * (head_minus * embed(raising_operator(params.fock_cutoff + 1), kResonatorLabel, reduced_space));
  statics += statics.adjoint();
  return TimeDependentHamiltonian(statics.matrix(), std::move(terms));
}

Operator effective_hamiltonian(const DeviceParams& params, const SpacePtr& reduced_space, double t) {
  return Operator(reduced_space, effective_hamiltonian(params, reduced_space).at(t));
}

TimeDependentHamiltonian symmetric_effective_hamiltonian(const DeviceParams& params, const SpacePtr& reduced_space) {
  const EffectiveModel m = effective_model(params);
  if (!m.symmetric) throw PreconditionError("symmetric effective form needs equal coupler detunings");
  const Operator head_minus = embed(sigma_minus(), kHeadLabel, reduced_space);
  Operator exchange = Operator::zero(reduced_space);
  for (int n = 1; n <= 2; ++n) exchange += m.g_eff[0] * (embed(sigma_plus(), working_label(n), reduced_space) * head_minus);
  exchange += exchange.adjoint();
  const Operator decay_hop =
      params.g_r * (head_minus * embed(raising_operator(params.fock_cutoff + 1), kResonatorLabel, reduced_space));
  return TimeDependentHamiltonian(exchange.matrix(), {{decay_hop.matrix(), -m.delta_phase[0]}});
}

}  // namespace erasehead
