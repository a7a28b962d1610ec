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

// Device Hamiltonians of the erase head: working qubits q1..qN, one tunable
// coupler per link c1..cN, the head qubit q0 and the lossy resonator r.
//
// Units: hbar = 1, time in ns, every frequency and coupling in rad/ns.
//
// Topology (mode order q1..qN, c1..cN, q0, r):
//   cn (n = 1, 2) couples qn and q0, with a parasitic qn-q0 exchange g_p;
//   c3 couples q1 and q3, c4 couples q2 and q4 (strength g_qc_add), each
//   with a parasitic exchange g_p on the same pair.

#pragma once

#include <numbers>
#include <string>
#include <vector>

#include "erasehead/hilbert.hpp"

namespace erasehead {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// GHz -> rad/ns.
constexpr double from_ghz(double ghz) { return kTwoPi * ghz; }
/// MHz -> rad/ns.
constexpr double from_mhz(double mhz) { return kTwoPi * mhz * 1e-3; }
constexpr double to_ghz(double rad_per_ns) { return rad_per_ns / kTwoPi; }
constexpr double to_mhz(double rad_per_ns) { return rad_per_ns / kTwoPi * 1e3; }

struct DeviceParams {
  std::vector<double> omega_q;  // working qubits, one per qn
  double omega_q0 = 0.0;
  std::vector<double> omega_c;  // couplers, one per cn
  double omega_r = 0.0;
  double g_qc = 0.0;
  double g_p = 0.0;
  double g_r = 0.0;
  double kappa = 0.0;
  double g_qc_add = 0.0;
  int fock_cutoff = 3;

  int n_working() const { return static_cast<int>(omega_q.size()); }

  /// Two working qubits, resonant at 3 GHz, g_qc = g_r = 100 MHz, g_p = 3 MHz,
  /// kappa = 30 MHz. Couplers are left at the idling point.
  static DeviceParams two_qubit_reference();
  /// Same device with g_r = 120 MHz and kappa = 150 MHz.
  static DeviceParams dark_state_reference();
  /// Chain device with 3 or 4 working qubits, g_r = 120 MHz, kappa = 150 MHz,
  /// g_qc_add = 90 MHz; couplers at 3.1 / 2.9 / 2.9 (/ 3.1) GHz.
  static DeviceParams chain_reference(int n_working);

  /// Warnings for soft violations (|g_p| not much smaller than |g_qc|).
  std::vector<std::string> soft_warnings() const;
};

/// Labels used throughout: "q1".."qN", "c1".."cN", "q0", "r".
std::string working_label(int n);
std::string coupler_label(int n);
inline constexpr const char* kHeadLabel = "q0";
inline constexpr const char* kResonatorLabel = "r";

/// Mode order q1..qN, c1..cN, q0, r. Throws CapabilityError outside N in 1..4.
SpacePtr build_space(const DeviceParams& params, int n_working);
/// Working qubits, head qubit and resonator only (couplers eliminated).
SpacePtr build_reduced_space(const DeviceParams& params, int n_working);

struct HamiltonianSet {
  SpacePtr space;
  Operator bare;           // H0
  Operator head_coupling;  // Hr0
  Operator qubit_coupler;  // Hqc
  Operator total;          // H0 + Hr0 + Hqc
};

Operator build_bare(const DeviceParams& params, const SpacePtr& space);
Operator build_head_coupling(const DeviceParams& params, const SpacePtr& space);
Operator build_qubit_coupler(const DeviceParams& params, const SpacePtr& space);
HamiltonianSet build_hamiltonians(const DeviceParams& params, const SpacePtr& space);

/// Coupler detuning that cancels the effective qubit-head exchange: -g_qc^2 / g_p.
/// Throws DivisionByZeroError when g_p = 0.
double idle_detuning(const DeviceParams& params);
/// omega_r - idle_detuning.
double idle_frequency(const DeviceParams& params);

/// g_p + g_qc^2 / delta. Throws ResonantRegimeError when delta = 0.
double effective_coupling(double delta, const DeviceParams& params);

/// Hamiltonian of the form constant + sum_k (op_k e^{i detuning_k t} + h.c.).
struct ModulatedTerm {
  SparseMatrix op;
  double detuning = 0.0;
};

class TimeDependentHamiltonian {
 public:
  TimeDependentHamiltonian() = default;
  explicit TimeDependentHamiltonian(SparseMatrix constant, std::vector<ModulatedTerm> terms = {});

  const SparseMatrix& constant() const { return constant_; }
  const std::vector<ModulatedTerm>& terms() const { return terms_; }
  bool is_static() const { return terms_.empty(); }
  Index dimension() const { return constant_.rows(); }

  SparseMatrix at(double t) const;
  TimeDependentHamiltonian restricted(const ExcitationSector& sector) const;

 private:
  SparseMatrix constant_;
  std::vector<ModulatedTerm> terms_;
};

/// H - frame * N_total. Equivalent to H for every number-operator expectation.
TimeDependentHamiltonian rotating_frame_hamiltonian(const DeviceParams& params, const SpacePtr& space,
                                                    double frame_frequency);

/// Interaction picture with respect to H0 for a device whose qubits and
/// resonator all sit at omega_r: coupler terms carry e^{i (omega_r - omega_cn) t},
/// parasitic and head-resonator terms are static.
/// Throws PreconditionError for non-resonant qubits or resonator.
TimeDependentHamiltonian interaction_picture(const DeviceParams& params, const SpacePtr& space);
Operator interaction_hamiltonian(const DeviceParams& params, const SpacePtr& space, double t);

struct EffectiveModel {
  std::vector<double> delta;        // omega_r - omega_cn
  std::vector<double> g_eff;        // g_p + g_qc^2 / delta_n
  std::vector<double> delta_phase;  // g_qc^2 / delta_n
  std::vector<double> omega_shifted;  // Omega_q1..Omega_qN, then Omega_q0
  bool symmetric = false;
  std::vector<std::string> warnings;
};

/// Dispersive parameters for N <= 2 working qubits. Throws ResonantRegimeError
/// for a zero detuning; warns when |delta_n| < 5 g_qc.
EffectiveModel effective_model(const DeviceParams& params);

/// Dispersive Hamiltonian on build_reduced_space:
///   sum_n g_eff_n sigma+_qn sigma-_q0 e^{i (g_qc^2/delta_n) t} + g_r sigma-_q0 a^dagger + h.c.
TimeDependentHamiltonian effective_hamiltonian(const DeviceParams& params, const SpacePtr& reduced_space);
Operator effective_hamiltonian(const DeviceParams& params, const SpacePtr& reduced_space, double t);

/// Symmetric-device form: g_eff sum_n sigma+_qn sigma-_q0 + g_r sigma-_q0 a^dagger e^{-i delta t} + h.c.
/// Throws PreconditionError unless delta_1 = delta_2.
TimeDependentHamiltonian symmetric_effective_hamiltonian(const DeviceParams& params, const SpacePtr& reduced_space);

}  // namespace erasehead
