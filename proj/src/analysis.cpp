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

#include "erasehead/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "erasehead/errors.hpp"

namespace erasehead {
namespace {

constexpr double kOccupationSlack = 1e-6;
constexpr double kDarkTolerance = 1e-10;

double interpolate_crossing(double t0, double f0, double t1, double f1, double threshold) {
  if (f1 == f0) return t1;
  const double s = std::clamp((threshold - f0) / (f1 - f0), 0.0, 1.0);
  return t0 + s * (t1 - t0);
}

std::optional<double> sustained_time(const std::vector<double>& times, const std::vector<double>& fid, double threshold) {
  std::size_t last_bad = fid.size();
  for (std::size_t i = fid.size(); i-- > 0;) {
    if (fid[i] < threshold) {
      last_bad = i;
      break;
    }
  }
  if (last_bad == fid.size()) return times.front();
  if (last_bad + 1 == fid.size()) return std::nullopt;
  return interpolate_crossing(times[last_bad], fid[last_bad], times[last_bad + 1], fid[last_bad + 1], threshold);
}

std::optional<double> first_time(const std::vector<double>& times, const std::vector<double>& fid, double threshold) {
  for (std::size_t i = 0; i < fid.size(); ++i) {
    if (fid[i] >= threshold) {
      if (i == 0) return times.front();
      return interpolate_crossing(times[i - 1], fid[i - 1], times[i], fid[i], threshold);
    }
  }
  return std::nullopt;
}

std::optional<double> max_over(const std::vector<QubitReset>& qubits, bool sustained) {
  double worst = 0.0;
  for (const auto& q : qubits) {
    const auto& t = sustained ? q.sustained : q.first_crossing;
    if (!t) return std::nullopt;
    worst = std::max(worst, *t);
  }
  return worst;
}

}  // namespace

double expectation(const DensityMatrix& rho, const Operator& op) { return trace_expectation(rho.matrix(), op.matrix()); }

double expectation(const StateVector& psi, const Operator& op) { return state_expectation(psi.amplitudes(), op.matrix()); }

double reset_fidelity(double occupation) {
  if (occupation < -kOccupationSlack || occupation > 1.0 + kOccupationSlack) {
    std::ostringstream os;
    os << "qubit occupation " << occupation << " is outside [0, 1]";
    throw IntegrityError(os.str());
  }
  return std::clamp(1.0 - occupation, 0.0, 1.0);
}

const QubitReset& ResetReport::qubit(const std::string& label) const {
  for (const auto& q : qubits) {
    if (q.label == label) return q;
  }
  throw LookupError("reset report has no qubit '" + label + "'");
}

ResetReport reset_time(const TraceSet& traces, const std::vector<std::string>& targets, double threshold,
                       CrossingMode mode) {
  if (traces.times.empty()) throw ShapeError("reset_time needs a non-empty trace set");
  ResetReport report;
  report.threshold = threshold;
  report.mode = mode;
  for (const auto& label : targets) {
    const auto& series = traces[label];
    std::vector<double> fid(series.size());
    std::transform(series.begin(), series.end(), fid.begin(), reset_fidelity);
    QubitReset q;
    q.label = label;
    q.sustained = sustained_time(traces.times, fid, threshold);
    q.first_crossing = first_time(traces.times, fid, threshold);
    q.final_fidelity = fid.back();
    report.qubits.push_back(std::move(q));
  }
  // Worst qubit: unreached first, otherwise the latest sustained time.
  double latest = -1.0;
  for (const auto& q : report.qubits) {
    const double key = q.sustained ? *q.sustained : std::numeric_limits<double>::infinity();
    if (key > latest) {
      latest = key;
      report.worst_qubit = q.label;
    }
  }
  const bool sustained = mode == CrossingMode::Sustained;
  report.tau_res = max_over(report.qubits, sustained);
  report.tau_res_alternate = max_over(report.qubits, !sustained);
  return report;
}

StateVector phi_state(const CompositeSpace& space, double phi) {
  Vector v = Vector::Zero(space.total_dimension());
  v(space.basis_index(std::map<std::string, int>{{working_label(1), 1}})) = 1.0 / std::sqrt(2.0);
  v(space.basis_index(std::map<std::string, int>{{working_label(2), 1}})) = std::polar(1.0 / std::sqrt(2.0), phi);
  return StateVector(std::move(v));
}

TransferAmplitude transfer_amplitude(double phi, const DeviceParams& params) {
  const SpacePtr space = build_space(params, 2);
  const Operator hqc = build_qubit_coupler(params, space);
  const Vector image = hqc.apply(phi_state(*space, phi).amplitudes());
  TransferAmplitude out;
  out.closed_form = (1.0 + std::polar(1.0, phi)) * params.g_p / std::sqrt(2.0);
  out.numeric = image(space->basis_index(std::map<std::string, int>{{kHeadLabel, 1}}));
  if (std::abs(out.closed_form - out.numeric) > 1e-10) {
    std::ostringstream os;
    os << "transfer amplitude mismatch at phi = " << phi << ": closed form " << out.closed_form << ", numeric "
       << out.numeric;
    throw IntegrityError(os.str());
  }
  return out;
}

DarkStateEntry darkstate_eigencheck(const Operator& qubit_coupler, const StateVector& psi, double g_qc) {
  const CompositeSpace& space = qubit_coupler.composite();
  const Vector image = qubit_coupler.apply(psi.amplitudes());
  const Vector image2 = qubit_coupler.apply(image);
  DarkStateEntry e;
  e.transfer = std::abs(image(space.basis_index(std::map<std::string, int>{{kHeadLabel, 1}})));
  e.residual = (image2 - g_qc * g_qc * psi.amplitudes()).norm();
  e.trivially_stationary = image.norm() < kDarkTolerance;
  e.is_dark = e.transfer < kDarkTolerance && e.residual < kDarkTolerance;
  return e;
}

DarkStateReport dark_state_scan(const DeviceParams& params, int n_points) {
  if (n_points < 1) throw PreconditionError("phi grid needs at least one point");
  const SpacePtr space = build_space(params, 2);
  const Operator hqc = build_qubit_coupler(params, space);
  DarkStateReport report;
  for (int k = 0; k < n_points; ++k) {
    const double phi = kTwoPi * k / n_points;
    DarkStateEntry e = darkstate_eigencheck(hqc, phi_state(*space, phi), params.g_qc);
    e.phi = phi;
    report.entries.push_back(e);
    report.amplitudes.push_back(transfer_amplitude(phi, params));
  }
  return report;
}

}  // namespace erasehead
