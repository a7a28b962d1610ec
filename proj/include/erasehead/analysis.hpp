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

#include <optional>
#include <string>
#include <vector>

#include "erasehead/dynamics.hpp"
#include "erasehead/hilbert.hpp"
#include "erasehead/model.hpp"

namespace erasehead {

inline constexpr double kDefaultThreshold = 0.995;

double expectation(const DensityMatrix& rho, const Operator& op);
double expectation(const StateVector& psi, const Operator& op);

/// 1 - <n>, clamped to [0, 1]. Throws IntegrityError for <n> outside [-1e-6, 1 + 1e-6].
double reset_fidelity(double occupation);

enum class CrossingMode { Sustained, FirstCrossing };

struct QubitReset {
  std::string label;
  std::optional<double> sustained;  // ns
  std::optional<double> first_crossing;
  double final_fidelity = 0.0;
};

struct ResetReport {
  double threshold = kDefaultThreshold;
  CrossingMode mode = CrossingMode::Sustained;
  std::vector<QubitReset> qubits;
  /// Max over targets in `mode`; empty when any target never reaches the threshold.
  std::optional<double> tau_res;
  /// Same reduction with the other crossing mode.
  std::optional<double> tau_res_alternate;
  std::string worst_qubit;

  bool reached() const { return tau_res.has_value(); }
  const QubitReset& qubit(const std::string& label) const;
};

/// Reset time of every target from its occupation trace. Sustained mode: the
/// earliest time after which the fidelity never drops below `threshold`
/// again, linearly interpolated across the final crossing. First-crossing
/// mode: the first interpolated upward crossing.
ResetReport reset_time(const TraceSet& traces, const std::vector<std::string>& targets,
                       double threshold = kDefaultThreshold, CrossingMode mode = CrossingMode::Sustained);

/// (|10> + e^{i phi} |01>)/sqrt(2) on q1, q2 with every other mode in its ground state.
StateVector phi_state(const CompositeSpace& space, double phi);

struct TransferAmplitude {
  cplx closed_form;  // (1 + e^{i phi}) g_p / sqrt(2)
  cplx numeric;      // <1_q0, 0_rest| H_qc |Psi_phi>
};

/// Both routes to the q0 transfer amplitude; throws IntegrityError if they
/// disagree by more than 1e-10.
TransferAmplitude transfer_amplitude(double phi, const DeviceParams& params);

struct DarkStateEntry {
  double phi = 0.0;
  double transfer = 0.0;  // |<1_q0, 0_rest| H_qc |psi>|
  double residual = 0.0;  // || H_qc^2 psi - g_qc^2 psi ||
  bool is_dark = false;
  bool trivially_stationary = false;  // H_qc psi = 0
};

/// Dark-state test of `psi` against the qubit-coupler Hamiltonian.
DarkStateEntry darkstate_eigencheck(const Operator& qubit_coupler, const StateVector& psi, double g_qc);

struct DarkStateReport {
  std::vector<DarkStateEntry> entries;
  std::vector<TransferAmplitude> amplitudes;
};

/// Scans phi over n_points uniformly spaced values in [0, 2 pi).
DarkStateReport dark_state_scan(const DeviceParams& params, int n_points);

}  // namespace erasehead
