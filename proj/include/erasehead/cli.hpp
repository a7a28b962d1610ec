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

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "erasehead/scenarios.hpp"

namespace erasehead::cli {

inline constexpr const char* kOutputDirEnv = "ERASEHEAD_OUTPUT_DIR";

enum ExitCode : int { kSuccess = 0, kFailure = 1, kNotReached = 2 };

/// Parses a configuration document: either one scenario object or
/// {"scenarios": [...]}. Unknown keys raise SchemaError naming the key; a
/// non-positive cutoff raises RangeError. Idle couplers resolve through the
/// idling point, so a vanishing g_p surfaces DivisionByZeroError here.
std::vector<ScenarioConfig> parse_config(const std::string& text);
std::vector<ScenarioConfig> load_config(const std::filesystem::path& path);

/// Inverse of parse_config for one scenario, in natural units. Every number
/// is chosen so that parsing it back reproduces the internal value exactly.
nlohmann::ordered_json config_json(const ScenarioConfig& config);
std::string emit_config(const ScenarioConfig& config);

struct RunManifest {
  std::filesystem::path config_path;
  std::vector<ScenarioConfig> scenarios;
  std::filesystem::path output_dir;
  bool write_csv = true;
  bool write_json = true;
};

/// --out, then ERASEHEAD_OUTPUT_DIR, then the working directory.
std::filesystem::path resolve_output_dir(const std::optional<std::string>& flag);

/// Writes to a sibling temporary file and renames it over `path`.
void atomic_write(const std::filesystem::path& path, const std::string& contents);

/// t_ns, one n_<label> column per observable, trace_dev, purity; 17 significant digits.
std::string trace_csv(const TraceSet& traces);
nlohmann::ordered_json summary_json(const ScenarioResult& result);

struct RunOutcome {
  std::string id;
  std::optional<ScenarioResult> result;
  std::string error;  // non-empty on failure
  int exit_code = kSuccess;
};

/// Runs every scenario of the manifest on a worker pool and writes
/// `<id>_trace.csv` and `<id>_summary.json`. Errors are reported per
/// scenario with its id.
std::vector<RunOutcome> run(const RunManifest& manifest, std::ostream& log);
/// Highest-priority exit code over the outcomes: failure, then not-reached.
int combined_exit_code(const std::vector<RunOutcome>& outcomes);

enum class Reduction { TauRes, TauResFirst, FinalFidelity, Ratio };
Reduction parse_reduction(const std::string& name);
std::string to_string(Reduction reduction);

struct SweepSpec {
  std::string path;  // e.g. device.kappa_mhz, couplers[1], device.omega_c[0]
  std::vector<double> grid;
  Reduction reduction = Reduction::TauRes;

  void validate() const;
};

struct SweepRow {
  double value = 0.0;
  std::optional<double> reduction;
  bool reached = false;
};

/// Copy of `config` with the natural-unit field at `path` set to `value`.
/// Throws ConfigError for an unresolvable path.
ScenarioConfig with_parameter(const ScenarioConfig& config, const std::string& path, double value);

/// Evaluates the reduction at every grid value concurrently; rows sorted by value.
std::vector<SweepRow> sweep(const ScenarioConfig& config, const SweepSpec& spec);
std::string sweep_csv(const std::vector<SweepRow>& rows);

struct Diagnostics {
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  double hermiticity_defect = 0.0;
  double excitation_commutator = 0.0;  // max |[H, N_total]| entry
};

/// Dry run: schema, Hamiltonian Hermiticity and excitation conservation,
/// dispersive-regime and coupling-ordering warnings. Never throws for
/// configuration problems; they land in `errors`.
Diagnostics validate(const std::string& text);

/// Text form of a number with 17 significant digits.
std::string format_number(double value);

}  // namespace erasehead::cli
