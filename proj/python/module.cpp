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

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "erasehead/cli.hpp"
#include "erasehead/errors.hpp"
#include "erasehead/scenarios.hpp"

namespace py = pybind11;
namespace eh = erasehead;

namespace {

py::dict traces_dict(const eh::TraceSet& t) {
  py::dict d;
  d["t_ns"] = t.times;
  for (std::size_t k = 0; k < t.labels.size(); ++k) d[py::str("n_" + t.labels[k])] = t.series[k];
  d["trace_dev"] = t.trace_deviation;
  d["purity"] = t.purity;
  return d;
}

template <class Derived, class Base>
void exception(py::module_& m, const char* name, py::handle base) {
  py::register_exception<Derived>(m, name, base);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Open-system simulator for qubit reset through a dissipative erase head";
  m.attr("__version__") = ERASEHEAD_VERSION;

  auto error = py::register_exception<eh::Error>(m, "Error", PyExc_RuntimeError);
  exception<eh::InvalidModeError, eh::Error>(m, "InvalidModeError", error);
  exception<eh::LookupError, eh::Error>(m, "LookupError", error);
  exception<eh::ShapeError, eh::Error>(m, "ShapeError", error);
  auto config_error = py::register_exception<eh::ConfigError>(m, "ConfigError", error);
  exception<eh::SchemaError, eh::ConfigError>(m, "SchemaError", config_error);
  exception<eh::RangeError, eh::ConfigError>(m, "RangeError", config_error);
  exception<eh::CapabilityError, eh::Error>(m, "CapabilityError", error);
  auto precondition = py::register_exception<eh::PreconditionError>(m, "PreconditionError", error);
  exception<eh::UnreachedResetError, eh::PreconditionError>(m, "UnreachedResetError", precondition);
  exception<eh::DivisionByZeroError, eh::Error>(m, "DivisionByZeroError", error);
  exception<eh::ResonantRegimeError, eh::Error>(m, "ResonantRegimeError", error);
  exception<eh::IntegrityError, eh::Error>(m, "IntegrityError", error);
  exception<eh::StiffnessError, eh::Error>(m, "StiffnessError", error);

  m.def("from_ghz", &eh::from_ghz);
  m.def("from_mhz", &eh::from_mhz);
  m.def("to_ghz", &eh::to_ghz);
  m.def("to_mhz", &eh::to_mhz);

  py::class_<eh::DeviceParams>(m, "DeviceParams")
      .def(py::init<>())
      .def_readwrite("omega_q", &eh::DeviceParams::omega_q)
      .def_readwrite("omega_q0", &eh::DeviceParams::omega_q0)
      .def_readwrite("omega_c", &eh::DeviceParams::omega_c)
      .def_readwrite("omega_r", &eh::DeviceParams::omega_r)
      .def_readwrite("g_qc", &eh::DeviceParams::g_qc)
      .def_readwrite("g_p", &eh::DeviceParams::g_p)
      .def_readwrite("g_r", &eh::DeviceParams::g_r)
      .def_readwrite("kappa", &eh::DeviceParams::kappa)
      .def_readwrite("g_qc_add", &eh::DeviceParams::g_qc_add)
      .def_readwrite("fock_cutoff", &eh::DeviceParams::fock_cutoff)
      .def_property_readonly("n_working", &eh::DeviceParams::n_working)
      .def_static("two_qubit_reference", &eh::DeviceParams::two_qubit_reference)
      .def_static("dark_state_reference", &eh::DeviceParams::dark_state_reference)
      .def_static("chain_reference", &eh::DeviceParams::chain_reference, py::arg("n_working"))
      .def("soft_warnings", &eh::DeviceParams::soft_warnings);

  m.def("idle_detuning", &eh::idle_detuning, py::arg("params"));
  m.def("idle_frequency", &eh::idle_frequency, py::arg("params"));
  m.def("effective_coupling", &eh::effective_coupling, py::arg("delta"), py::arg("params"));
  m.def(
      "hamiltonian",
      [](const eh::DeviceParams& p) { return eh::build_hamiltonians(p, eh::build_space(p, p.n_working())).total.dense(); },
      py::arg("params"), "Dense device Hamiltonian in rad/ns, mode order q1..qN, c1..cN, q0, r.");

  py::class_<eh::ScenarioConfig>(m, "ScenarioConfig")
      .def_readwrite("id", &eh::ScenarioConfig::id)
      .def_readwrite("params", &eh::ScenarioConfig::params)
      .def_readwrite("threshold", &eh::ScenarioConfig::threshold)
      .def_readwrite("reset_mandatory", &eh::ScenarioConfig::reset_mandatory)
      .def("resolved_params", &eh::ScenarioConfig::resolved_params)
      .def("to_json", [](const eh::ScenarioConfig& c) { return eh::cli::emit_config(c); })
      .def("with_parameter", &eh::cli::with_parameter, py::arg("path"), py::arg("value"));

  py::class_<eh::QubitReset>(m, "QubitReset")
      .def_readonly("label", &eh::QubitReset::label)
      .def_readonly("sustained", &eh::QubitReset::sustained)
      .def_readonly("first_crossing", &eh::QubitReset::first_crossing)
      .def_readonly("final_fidelity", &eh::QubitReset::final_fidelity);

  py::class_<eh::ResetReport>(m, "ResetReport")
      .def_readonly("threshold", &eh::ResetReport::threshold)
      .def_readonly("qubits", &eh::ResetReport::qubits)
      .def_readonly("tau_res", &eh::ResetReport::tau_res)
      .def_readonly("tau_res_alternate", &eh::ResetReport::tau_res_alternate)
      .def_readonly("worst_qubit", &eh::ResetReport::worst_qubit)
      .def_property_readonly("reached", &eh::ResetReport::reached);

  py::class_<eh::ScenarioResult>(m, "ScenarioResult")
      .def_readonly("config", &eh::ScenarioResult::config)
      .def_readonly("params", &eh::ScenarioResult::params)
      .def_readonly("report", &eh::ScenarioResult::report)
      .def_readonly("full_dimension", &eh::ScenarioResult::full_dimension)
      .def_readonly("evolved_dimension", &eh::ScenarioResult::evolved_dimension)
      .def_readonly("wall_seconds", &eh::ScenarioResult::wall_seconds)
      .def_property_readonly("traces", [](const eh::ScenarioResult& r) { return traces_dict(r.traces); })
      .def_property_readonly("protection",
                             [](const eh::ScenarioResult& r) {
                               py::dict d;
                               for (const auto& e : r.protection) d[py::str(e.label)] = e.min_fidelity;
                               return d;
                             })
      .def("summary_json", [](const eh::ScenarioResult& r) { return eh::cli::summary_json(r).dump(2); });

  py::class_<eh::RatioReport>(m, "RatioReport")
      .def_readonly("selective", &eh::RatioReport::selective)
      .def_readonly("simultaneous", &eh::RatioReport::simultaneous)
      .def_readonly("ratio", &eh::RatioReport::ratio)
      .def_readonly("ratio_alternate", &eh::RatioReport::ratio_alternate);

  py::class_<eh::DarkStateEntry>(m, "DarkStateEntry")
      .def_readonly("phi", &eh::DarkStateEntry::phi)
      .def_readonly("transfer", &eh::DarkStateEntry::transfer)
      .def_readonly("residual", &eh::DarkStateEntry::residual)
      .def_readonly("is_dark", &eh::DarkStateEntry::is_dark)
      .def_readonly("trivially_stationary", &eh::DarkStateEntry::trivially_stationary);

  py::class_<eh::EffectiveComparison>(m, "EffectiveComparison")
      .def_readonly("delta", &eh::EffectiveComparison::delta)
      .def_readonly("labels", &eh::EffectiveComparison::labels)
      .def_readonly("max_deviation", &eh::EffectiveComparison::max_deviation)
      .def_readonly("worst", &eh::EffectiveComparison::worst);

  py::class_<eh::cli::Diagnostics>(m, "Diagnostics")
      .def_readonly("errors", &eh::cli::Diagnostics::errors)
      .def_readonly("warnings", &eh::cli::Diagnostics::warnings)
      .def_readonly("hermiticity_defect", &eh::cli::Diagnostics::hermiticity_defect)
      .def_readonly("excitation_commutator", &eh::cli::Diagnostics::excitation_commutator);

  // The heavy entry points release the GIL.
  const auto release = py::call_guard<py::gil_scoped_release>();
  m.def("parse_config", &eh::cli::parse_config, py::arg("text"));
  m.def("load_config", [](const std::string& path) { return eh::cli::load_config(path); }, py::arg("path"));
  m.def("validate", &eh::cli::validate, py::arg("text"));
  m.def("run_scenario", &eh::run_scenario, py::arg("config"), release);
  m.def("selective_reset", &eh::selective_reset, py::arg("params"), py::arg("target"),
        py::arg("reset_frequency") = eh::from_ghz(3.1), release);
  m.def("simultaneous_reset", &eh::simultaneous_reset, py::arg("params"),
        py::arg("reset_frequency") = eh::from_ghz(3.1), release);
  m.def("ratio_experiment", &eh::ratio_experiment, py::arg("params"), py::arg("reset_frequency") = eh::from_ghz(3.1),
        py::arg("threshold") = eh::kDefaultThreshold, release);
  m.def("scaling_demo", &eh::scaling_demo, py::arg("params"), py::arg("t_end") = 3000.0, release);
  m.def(
      "dark_state_run",
      [](const eh::DeviceParams& p, double phi, double w1, double w2) {
        return eh::run_scenario(eh::dark_state_config(p, phi, w1, w2));
      },
      py::arg("params"), py::arg("phi"), py::arg("omega_c1"), py::arg("omega_c2"), release);
  m.def(
      "dark_state_scan", [](const eh::DeviceParams& p, int n) { return eh::dark_state_scan(p, n).entries; },
      py::arg("params"), py::arg("n_points") = 16);
  m.def(
      "transfer_amplitude",
      [](double phi, const eh::DeviceParams& p) {
        const auto a = eh::transfer_amplitude(phi, p);
        return std::make_pair(a.closed_form, a.numeric);
      },
      py::arg("phi"), py::arg("params"), "(closed form, numeric) transfer amplitudes.");
  m.def(
      "effective_vs_full",
      [](const eh::DeviceParams& p, double delta, const std::vector<std::string>& excited, double t_end) {
        return eh::effective_vs_full(p, delta, eh::InitialState::excited(excited), t_end);
      },
      py::arg("params"), py::arg("delta"), py::arg("excited") = std::vector<std::string>{"q1"},
      py::arg("t_end") = 300.0, release);
}
