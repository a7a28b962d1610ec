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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "erasehead/hilbert.hpp"
#include "erasehead/model.hpp"
#include "erasehead/ode.hpp"

namespace erasehead {

/// Lindblad channel rate * D[L]; the rate is in 1/ns.
struct CollapseChannel {
  SparseMatrix op;
  double rate = 0.0;

  CollapseChannel(SparseMatrix op, double rate);
  CollapseChannel restricted(const ExcitationSector& sector) const;
};

struct Observable {
  std::string label;
  SparseMatrix op;
};

struct EvolutionConfig {
  double t_start = 0.0;
  double t_end = 1.0;
  /// Uniform output step; ignored when `points` is non-empty.
  double grid_step = 0.1;
  std::vector<double> points;
  double rtol = 1e-8;
  double atol = 1e-10;
  double max_step = 0.0;  // 0: unbounded

  void validate() const;
  /// t_start + k * grid_step up to t_end (t_end always included), or `points`.
  std::vector<double> grid() const;
};

struct TraceSet {
  std::vector<double> times;
  std::vector<std::string> labels;
  std::vector<std::vector<double>> series;  // one per label, same length as times
  std::vector<double> trace_deviation;      // |tr rho - 1| (or |norm^2 - 1|)
  std::vector<double> purity;               // tr rho^2 (1 for pure states)

  double max_trace_deviation = 0.0;
  double max_hermiticity_correction = 0.0;
  double final_min_eigenvalue = 0.0;
  bool flagged = false;  // trace deviation above 1e-8 somewhere
  ode::Stats stats;
  /// Sizes of the independent diagonal blocks the density matrix was evolved in.
  std::vector<Index> block_dimensions;
  /// Density matrix at the last output time (empty for pure-state runs).
  DenseMatrix final_state;

  bool has(const std::string& label) const;
  const std::vector<double>& operator[](const std::string& label) const;
  std::size_t size() const { return times.size(); }
};

/// -i[H, rho] + sum_k rate_k (L rho L^dagger - {L^dagger L, rho} / 2), hbar = 1.
DenseMatrix lindblad_rhs(const DenseMatrix& rho, const SparseMatrix& hamiltonian,
                         const std::vector<CollapseChannel>& channels);
DenseMatrix lindblad_rhs(const DensityMatrix& rho, const Operator& hamiltonian,
                         const std::vector<CollapseChannel>& channels);

/// Expectation tr(rho op) for a Hermitian op; throws IntegrityError when the
/// imaginary part exceeds 1e-8.
double trace_expectation(const DenseMatrix& rho, const SparseMatrix& op);
double state_expectation(const Vector& psi, const SparseMatrix& op);

/// Adaptive integration of the master equation. rho is re-symmetrized after
/// every accepted step. Throws StiffnessError on step underflow and
/// IntegrityError when the trace drifts by more than 1e-6.
TraceSet evolve_master(const DensityMatrix& rho0, const TimeDependentHamiltonian& hamiltonian,
                       const std::vector<CollapseChannel>& channels, const EvolutionConfig& config,
                       const std::vector<Observable>& observables);

/// Closed-system Schrodinger evolution. Throws IntegrityError when the norm
/// drifts by more than 1e-6.
TraceSet evolve_state(const StateVector& psi0, const TimeDependentHamiltonian& hamiltonian,
                      const EvolutionConfig& config, const std::vector<Observable>& observables);

struct ConvergenceReport {
  int cutoff = 0;
  std::vector<std::string> labels;
  std::vector<double> max_difference;  // per label
  double worst = 0.0;
  double tolerance = 1e-4;
  bool passed = false;
};

/// Runs `scenario` at `cutoff` and `cutoff + 1` concurrently and compares
/// every shared trace on the common time grid.
ConvergenceReport convergence_probe(const std::function<TraceSet(int cutoff)>& scenario, int cutoff,
                                    double tolerance = 1e-4);

}  // namespace erasehead
