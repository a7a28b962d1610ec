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

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "erasehead/cli.hpp"
#include "erasehead/errors.hpp"

namespace eh = erasehead;
namespace cli = erasehead::cli;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw eh::ConfigError("cannot open configuration file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const eh::ScenarioConfig& pick(const std::vector<eh::ScenarioConfig>& configs, const std::string& id) {
  if (id.empty()) return configs.front();
  for (const auto& c : configs) {
    if (c.id == id) return c;
  }
  throw eh::LookupError("no scenario with id '" + id + "'");
}

int simulate(const std::string& path, const std::optional<std::string>& out, bool csv, bool json) {
  cli::RunManifest m;
  m.config_path = path;
  m.scenarios = cli::parse_config(read_file(path));
  m.output_dir = cli::resolve_output_dir(out);
  m.write_csv = csv;
  m.write_json = json;
  return cli::combined_exit_code(cli::run(m, std::cout));
}

int sweep(const std::string& path, const std::string& id, const std::string& param, const std::vector<double>& grid,
          const std::string& reduce, const std::optional<std::string>& out) {
  const auto configs = cli::parse_config(read_file(path));
  cli::SweepSpec spec{param, grid, cli::parse_reduction(reduce)};
  const auto rows = cli::sweep(pick(configs, id), spec);
  const auto dir = cli::resolve_output_dir(out);
  std::filesystem::create_directories(dir);
  const std::string csv = cli::sweep_csv(rows);
  cli::atomic_write(dir / "sweep.csv", csv);
  std::cout << csv;
  return cli::kSuccess;
}

int validate(const std::string& path) {
  const auto d = cli::validate(read_file(path));
  for (const auto& e : d.errors) std::cout << "error: " << e << "\n";
  for (const auto& w : d.warnings) std::cout << "warning: " << w << "\n";
  std::cout << "hermiticity defect: " << cli::format_number(d.hermiticity_defect) << "\n";
  std::cout << "excitation commutator: " << cli::format_number(d.excitation_commutator) << "\n";
  return d.errors.empty() ? cli::kSuccess : cli::kFailure;
}

int darkcheck(const std::string& path, const std::string& id, int n_points) {
  const auto configs = cli::parse_config(read_file(path));
  const eh::DeviceParams p = pick(configs, id).resolved_params();
  if (p.n_working() != 2) throw eh::CapabilityError("darkcheck needs a two-qubit device");
  const auto report = eh::dark_state_scan(p, n_points);
  std::cout << "phi,transfer,closed_form_abs,eigen_residual,is_dark\n";
  for (std::size_t k = 0; k < report.entries.size(); ++k) {
    const auto& e = report.entries[k];
    std::cout << cli::format_number(e.phi) << "," << cli::format_number(e.transfer) << ","
              << cli::format_number(std::abs(report.amplitudes[k].closed_form)) << "," << cli::format_number(e.residual)
              << "," << (e.is_dark ? "true" : "false") << "\n";
  }
  return cli::kSuccess;
}

int converge(const std::string& path, const std::string& id, int cutoff, double tol) {
  const auto configs = cli::parse_config(read_file(path));
  const eh::ScenarioConfig base = pick(configs, id);
  const auto report = eh::convergence_probe(
      [&](int k) {
        eh::ScenarioConfig c = base;
        c.params.fock_cutoff = k;
        return eh::run_scenario(c).traces;
      },
      cutoff, tol);
  for (std::size_t i = 0; i < report.labels.size(); ++i) {
    std::cout << report.labels[i] << ": max difference " << cli::format_number(report.max_difference[i]) << "\n";
  }
  std::cout << "cutoff " << report.cutoff << " vs " << report.cutoff + 1 << ": worst "
            << cli::format_number(report.worst) << (report.passed ? " (converged)" : " (not converged)") << "\n";
  return report.passed ? cli::kSuccess : cli::kNotReached;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Open-system simulator for qubit reset through a dissipative erase head"};
  app.set_version_flag("--version", std::string(ERASEHEAD_VERSION));
  app.require_subcommand(1);

  std::string config;
  std::string id;
  std::optional<std::string> out;

  auto* sim = app.add_subcommand("simulate", "Run every scenario in a configuration file");
  sim->add_option("config", config, "Configuration file")->required();
  sim->add_option("--out", out, "Output directory (overrides ERASEHEAD_OUTPUT_DIR)");
  bool no_csv = false;
  bool no_json = false;
  sim->add_flag("--no-csv", no_csv, "Skip the trace CSV");
  sim->add_flag("--no-json", no_json, "Skip the JSON summary");

  auto* sw = app.add_subcommand("sweep", "Scan one parameter and reduce each run to a number");
  sw->add_option("config", config, "Configuration file")->required();
  std::string param;
  std::vector<double> grid;
  std::string reduce = "tau_res";
  sw->add_option("--param", param, "Parameter path, e.g. device.kappa_mhz or couplers[1]")->required();
  sw->add_option("--grid", grid, "Comma-separated values")->required()->delimiter(',');
  sw->add_option("--reduce", reduce, "tau_res, tau_res_first, final_fidelity or ratio");
  sw->add_option("--scenario", id, "Scenario id (default: the first)");
  sw->add_option("--out", out, "Output directory (overrides ERASEHEAD_OUTPUT_DIR)");

  auto* val = app.add_subcommand("validate", "Check a configuration without running it");
  val->add_option("config", config, "Configuration file")->required();

  auto* dark = app.add_subcommand("darkcheck", "Transfer amplitude and eigencheck over a phase grid");
  dark->add_option("config", config, "Configuration file")->required();
  int phi_grid = 16;
  dark->add_option("--phi-grid", phi_grid, "Number of phase points")->check(CLI::PositiveNumber);
  dark->add_option("--scenario", id, "Scenario id (default: the first)");

  auto* conv = app.add_subcommand("converge", "Compare traces at a Fock cutoff and the next one");
  conv->add_option("config", config, "Configuration file")->required();
  int cutoff = 3;
  double tol = 1e-4;
  conv->add_option("--cutoff", cutoff, "Fock cutoff")->required();
  conv->add_option("--tol", tol, "Maximum population difference");
  conv->add_option("--scenario", id, "Scenario id (default: the first)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) return simulate(config, out, !no_csv, !no_json);
    if (*sw) return sweep(config, id, param, grid, reduce, out);
    if (*val) return validate(config);
    if (*dark) return darkcheck(config, id, phi_grid);
    if (*conv) return converge(config, id, cutoff, tol);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kFailure;
  }
  return cli::kFailure;
}
