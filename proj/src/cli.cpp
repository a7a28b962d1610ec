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

#include "erasehead/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "erasehead/errors.hpp"
#include "erasehead/parallel.hpp"

namespace erasehead::cli {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

double from_natural_ghz(double v) { return from_ghz(v); }
double from_natural_mhz(double v) { return from_mhz(v); }

/// Natural-unit value that maps back onto `internal` exactly under `forward`.
double natural_value(double internal, double (*forward)(double), double guess) {
  if (forward(guess) == internal) return guess;
  double up = guess;
  double down = guess;
  for (int i = 0; i < 16; ++i) {
    up = std::nextafter(up, std::numeric_limits<double>::infinity());
    if (forward(up) == internal) return up;
    down = std::nextafter(down, -std::numeric_limits<double>::infinity());
    if (forward(down) == internal) return down;
  }
  return guess;
}

double ghz_of(double w) { return natural_value(w, from_natural_ghz, to_ghz(w)); }
double mhz_of(double w) { return natural_value(w, from_natural_mhz, to_mhz(w)); }

void check_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!obj.is_object()) throw SchemaError("section '" + where + "' must be an object");
  for (const auto& item : obj.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* a) { return item.key() == a; });
    if (!known) {
      std::string list;
      for (const char* a : allowed) list += std::string(list.empty() ? "" : ", ") + a;
      throw SchemaError("unknown key '" + (where.empty() ? "" : where + ".") + item.key() + "' (allowed: " + list + ")");
    }
  }
}

const json& require(const json& obj, const std::string& where, const char* key) {
  if (!obj.contains(key)) throw SchemaError("missing required field '" + where + "." + key + "'");
  return obj.at(key);
}

double number(const json& v, const std::string& name) {
  if (!v.is_number()) throw SchemaError("field '" + name + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw RangeError("field '" + name + "' must be finite");
  return x;
}

double number_field(const json& obj, const std::string& where, const char* key) {
  return number(require(obj, where, key), where + "." + key);
}

double optional_number(const json& obj, const std::string& where, const char* key, double fallback) {
  return obj.contains(key) ? number(obj.at(key), where + "." + key) : fallback;
}

std::vector<std::string> string_list(const json& v, const std::string& name) {
  if (!v.is_array()) throw SchemaError("field '" + name + "' must be a list of strings");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) throw SchemaError("field '" + name + "' must be a list of strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

CrossingMode parse_mode(const std::string& s) {
  if (s == "sustained") return CrossingMode::Sustained;
  if (s == "first_crossing") return CrossingMode::FirstCrossing;
  throw RangeError("scenario.mode must be 'sustained' or 'first_crossing', got '" + s + "'");
}

const char* mode_name(CrossingMode m) { return m == CrossingMode::Sustained ? "sustained" : "first_crossing"; }

void check_id(const std::string& id) {
  const bool ok = !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
  if (!ok) throw RangeError("scenario.id '" + id + "' must be non-empty and use only letters, digits, '_', '-', '.'");
}

ScenarioConfig parse_scenario(const json& doc) {
  check_keys(doc, "", {"scenario", "device", "couplers", "initial", "evolution", "observables"});
  if (!doc.contains("device")) throw SchemaError("missing required section 'device'");
  ScenarioConfig c;

  const json& dev = doc.at("device");
  check_keys(dev, "device",
             {"qubit_ghz", "head_qubit_ghz", "resonator_ghz", "g_qc_mhz", "g_p_mhz", "g_r_mhz", "kappa_mhz",
              "g_qc_add_mhz", "fock_cutoff"});
  const json& qubits = require(dev, "device", "qubit_ghz");
  if (!qubits.is_array() || qubits.empty()) throw SchemaError("field 'device.qubit_ghz' must be a non-empty list");
  if (qubits.size() > 4) throw RangeError("device.qubit_ghz lists " + std::to_string(qubits.size()) + " qubits; at most 4 are supported");
  DeviceParams& p = c.params;
  for (std::size_t k = 0; k < qubits.size(); ++k) {
    p.omega_q.push_back(from_ghz(number(qubits[k], "device.qubit_ghz[" + std::to_string(k) + "]")));
  }
  p.omega_q0 = from_ghz(number_field(dev, "device", "head_qubit_ghz"));
  p.omega_r = from_ghz(number_field(dev, "device", "resonator_ghz"));
  p.g_qc = from_mhz(number_field(dev, "device", "g_qc_mhz"));
  p.g_p = from_mhz(number_field(dev, "device", "g_p_mhz"));
  p.g_r = from_mhz(number_field(dev, "device", "g_r_mhz"));
  p.kappa = from_mhz(number_field(dev, "device", "kappa_mhz"));
  if (p.kappa < 0.0) throw RangeError("device.kappa_mhz must be non-negative");
  p.g_qc_add = from_mhz(optional_number(dev, "device", "g_qc_add_mhz", 0.0));
  if (dev.contains("fock_cutoff")) {
    const json& k = dev.at("fock_cutoff");
    if (!k.is_number_integer()) throw SchemaError("field 'device.fock_cutoff' must be an integer");
    p.fock_cutoff = k.get<int>();
  }
  if (p.fock_cutoff <= 0) throw RangeError("device.fock_cutoff must be positive, got " + std::to_string(p.fock_cutoff));
  const auto n = p.omega_q.size();

  if (doc.contains("couplers")) {
    const json& cs = doc.at("couplers");
    if (!cs.is_array()) throw SchemaError("field 'couplers' must be a list");
    if (cs.size() != n) {
      throw SchemaError("'couplers' lists " + std::to_string(cs.size()) + " entries for " + std::to_string(n) +
                        " working qubits");
    }
    for (std::size_t k = 0; k < cs.size(); ++k) {
      if (cs[k].is_string()) {
        if (cs[k].get<std::string>() != "idle") throw SchemaError("couplers[" + std::to_string(k) + "] must be \"idle\" or a frequency in GHz");
        c.couplers.push_back(CouplerSetting::at_idle());
      } else {
        c.couplers.push_back(CouplerSetting::at(from_ghz(number(cs[k], "couplers[" + std::to_string(k) + "]"))));
      }
    }
  } else {
    c.couplers.assign(n, CouplerSetting::at_idle());
  }
  p.omega_c = c.resolved_params().omega_c;

  if (doc.contains("initial")) {
    const json& init = doc.at("initial");
    check_keys(init, "initial", {"occupations", "bell_phi"});
    if (init.contains("occupations") == init.contains("bell_phi")) {
      throw SchemaError("section 'initial' needs exactly one of 'occupations' or 'bell_phi'");
    }
    if (init.contains("bell_phi")) {
      c.initial = InitialState::bell(number(init.at("bell_phi"), "initial.bell_phi"));
    } else {
      const json& occ = init.at("occupations");
      if (!occ.is_object()) throw SchemaError("field 'initial.occupations' must map mode labels to integers");
      for (const auto& item : occ.items()) {
        if (!item.value().is_number_integer()) throw SchemaError("initial.occupations." + item.key() + " must be an integer");
        c.initial.occupations[item.key()] = item.value().get<int>();
      }
    }
  } else {
    std::vector<std::string> labels;
    for (std::size_t k = 1; k <= n; ++k) labels.push_back(working_label(static_cast<int>(k)));
    c.initial = InitialState::excited(labels);
  }

  const json& evo = [&]() -> const json& {
    if (!doc.contains("evolution")) throw SchemaError("missing required section 'evolution'");
    return doc.at("evolution");
  }();
  check_keys(evo, "evolution", {"t_start_ns", "t_end_ns", "grid_step_ns", "rtol", "atol", "max_step_ns"});
  c.evolution.t_start = optional_number(evo, "evolution", "t_start_ns", 0.0);
  c.evolution.t_end = number_field(evo, "evolution", "t_end_ns");
  c.evolution.grid_step = optional_number(evo, "evolution", "grid_step_ns", c.evolution.grid_step);
  c.evolution.rtol = optional_number(evo, "evolution", "rtol", c.evolution.rtol);
  c.evolution.atol = optional_number(evo, "evolution", "atol", c.evolution.atol);
  c.evolution.max_step = optional_number(evo, "evolution", "max_step_ns", 0.0);
  try {
    c.evolution.validate();
  } catch (const Error& e) {
    throw RangeError(std::string("evolution: ") + e.what());
  }

  if (doc.contains("observables")) c.observables = string_list(doc.at("observables"), "observables");

  if (doc.contains("scenario")) {
    const json& sc = doc.at("scenario");
    check_keys(sc, "scenario", {"id", "targets", "threshold", "mode", "reset_mandatory", "sector_n_max", "use_sector"});
    if (sc.contains("id")) {
      if (!sc.at("id").is_string()) throw SchemaError("field 'scenario.id' must be a string");
      c.id = sc.at("id").get<std::string>();
    }
    if (sc.contains("targets")) c.targets = string_list(sc.at("targets"), "scenario.targets");
    c.threshold = optional_number(sc, "scenario", "threshold", c.threshold);
    if (!(c.threshold > 0.0 && c.threshold <= 1.0)) throw RangeError("scenario.threshold must lie in (0, 1]");
    if (sc.contains("mode")) {
      if (!sc.at("mode").is_string()) throw SchemaError("field 'scenario.mode' must be a string");
      c.mode = parse_mode(sc.at("mode").get<std::string>());
    }
    if (sc.contains("reset_mandatory")) {
      if (!sc.at("reset_mandatory").is_boolean()) throw SchemaError("field 'scenario.reset_mandatory' must be a boolean");
      c.reset_mandatory = sc.at("reset_mandatory").get<bool>();
    }
    if (sc.contains("use_sector")) {
      if (!sc.at("use_sector").is_boolean()) throw SchemaError("field 'scenario.use_sector' must be a boolean");
      c.use_sector = sc.at("use_sector").get<bool>();
    }
    if (sc.contains("sector_n_max")) {
      if (!sc.at("sector_n_max").is_number_integer()) throw SchemaError("field 'scenario.sector_n_max' must be an integer");
      c.sector_n_max = sc.at("sector_n_max").get<int>();
      if (*c.sector_n_max < 0) throw RangeError("scenario.sector_n_max must be non-negative");
    }
  }
  check_id(c.id);
  c.resolved_targets();
  return c;
}

ordered_json optional_json(const std::optional<double>& v) { return v ? ordered_json(*v) : ordered_json(nullptr); }

ordered_json params_json(const DeviceParams& p, bool natural) {
  ordered_json j;
  auto f = [&](double w) { return natural ? ghz_of(w) : w; };
  auto g = [&](double w) { return natural ? mhz_of(w) : w; };
  const std::string fs = natural ? "_ghz" : "";
  const std::string gs = natural ? "_mhz" : "";
  ordered_json qs = ordered_json::array();
  for (double w : p.omega_q) qs.push_back(f(w));
  j["qubit" + fs] = qs;
  j["head_qubit" + fs] = f(p.omega_q0);
  j["resonator" + fs] = f(p.omega_r);
  ordered_json cs = ordered_json::array();
  for (double w : p.omega_c) cs.push_back(f(w));
  j["coupler" + fs] = cs;
  j["g_qc" + gs] = g(p.g_qc);
  j["g_p" + gs] = g(p.g_p);
  j["g_r" + gs] = g(p.g_r);
  j["kappa" + gs] = g(p.kappa);
  j["g_qc_add" + gs] = g(p.g_qc_add);
  j["fock_cutoff"] = p.fock_cutoff;
  return j;
}

ordered_json report_json(const ResetReport& r) {
  ordered_json j;
  j["threshold"] = r.threshold;
  j["mode"] = mode_name(r.mode);
  j["reached"] = r.reached();
  j["tau_res_ns"] = optional_json(r.tau_res);
  const bool sustained = r.mode == CrossingMode::Sustained;
  j["tau_res_sustained_ns"] = optional_json(sustained ? r.tau_res : r.tau_res_alternate);
  j["tau_res_first_crossing_ns"] = optional_json(sustained ? r.tau_res_alternate : r.tau_res);
  j["worst_qubit"] = r.worst_qubit;
  ordered_json qs = ordered_json::array();
  for (const auto& q : r.qubits) {
    ordered_json e;
    e["label"] = q.label;
    e["sustained_ns"] = optional_json(q.sustained);
    e["first_crossing_ns"] = optional_json(q.first_crossing);
    e["final_fidelity"] = q.final_fidelity;
    qs.push_back(e);
  }
  j["qubits"] = qs;
  return j;
}

struct PathToken {
  std::string key;
  std::optional<std::size_t> index;
};

std::vector<PathToken> tokenize(const std::string& path) {
  std::vector<PathToken> out;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    PathToken t;
    const auto open = part.find('[');
    t.key = part.substr(0, open);
    if (open != std::string::npos) {
      const auto close = part.find(']', open);
      if (close == std::string::npos || close + 1 != part.size()) throw ConfigError("malformed parameter path '" + path + "'");
      try {
        std::size_t used = 0;
        const std::string digits = part.substr(open + 1, close - open - 1);
        t.index = std::stoul(digits, &used);
        if (used != digits.size()) throw std::invalid_argument(digits);
      } catch (const std::exception&) {
        throw ConfigError("malformed index in parameter path '" + path + "'");
      }
    }
    if (t.key.empty()) throw ConfigError("malformed parameter path '" + path + "'");
    out.push_back(t);
  }
  if (out.empty()) throw ConfigError("empty parameter path");
  return out;
}

}  // namespace

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::vector<ScenarioConfig> parse_config(const std::string& text) {
  json doc;
  const bool blank = std::all_of(text.begin(), text.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); });
  if (blank) {
    doc = json::object();
  } else {
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw SchemaError(std::string("malformed configuration document: ") + e.what());
    }
  }
  if (!doc.is_object()) throw SchemaError("configuration document must be an object");
  std::vector<ScenarioConfig> out;
  if (doc.contains("scenarios")) {
    check_keys(doc, "", {"scenarios"});
    const json& list = doc.at("scenarios");
    if (!list.is_array() || list.empty()) throw SchemaError("field 'scenarios' must be a non-empty list");
    for (const auto& s : list) out.push_back(parse_scenario(s));
  } else {
    out.push_back(parse_scenario(doc));
  }
  std::set<std::string> ids;
  for (const auto& c : out) {
    if (!ids.insert(c.id).second) throw ConfigError("duplicate scenario id '" + c.id + "'");
  }
  return out;
}

std::vector<ScenarioConfig> load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open configuration file '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ordered_json config_json(const ScenarioConfig& c) {
  const DeviceParams& p = c.params;
  ordered_json j;
  ordered_json sc;
  sc["id"] = c.id;
  sc["targets"] = c.targets;
  sc["threshold"] = c.threshold;
  sc["mode"] = mode_name(c.mode);
  sc["reset_mandatory"] = c.reset_mandatory;
  if (c.sector_n_max) sc["sector_n_max"] = *c.sector_n_max;
  sc["use_sector"] = c.use_sector;
  j["scenario"] = sc;

  ordered_json dev;
  ordered_json qs = ordered_json::array();
  for (double w : p.omega_q) qs.push_back(ghz_of(w));
  dev["qubit_ghz"] = qs;
  dev["head_qubit_ghz"] = ghz_of(p.omega_q0);
  dev["resonator_ghz"] = ghz_of(p.omega_r);
  dev["g_qc_mhz"] = mhz_of(p.g_qc);
  dev["g_p_mhz"] = mhz_of(p.g_p);
  dev["g_r_mhz"] = mhz_of(p.g_r);
  dev["kappa_mhz"] = mhz_of(p.kappa);
  dev["g_qc_add_mhz"] = mhz_of(p.g_qc_add);
  dev["fock_cutoff"] = p.fock_cutoff;
  j["device"] = dev;

  ordered_json cs = ordered_json::array();
  const std::size_t n = static_cast<std::size_t>(p.n_working());
  for (std::size_t k = 0; k < n; ++k) {
    if (k < c.couplers.size()) {
      if (c.couplers[k].idle) {
        cs.push_back("idle");
      } else {
        cs.push_back(ghz_of(c.couplers[k].frequency));
      }
    } else {
      cs.push_back(ghz_of(p.omega_c.at(k)));
    }
  }
  j["couplers"] = cs;

  ordered_json init;
  if (c.initial.bell_phi) {
    init["bell_phi"] = *c.initial.bell_phi;
  } else {
    init["occupations"] = ordered_json::object();
    for (const auto& [label, occ] : c.initial.occupations) init["occupations"][label] = occ;
  }
  j["initial"] = init;

  ordered_json evo;
  evo["t_start_ns"] = c.evolution.t_start;
  evo["t_end_ns"] = c.evolution.t_end;
  evo["grid_step_ns"] = c.evolution.grid_step;
  evo["rtol"] = c.evolution.rtol;
  evo["atol"] = c.evolution.atol;
  evo["max_step_ns"] = c.evolution.max_step;
  j["evolution"] = evo;
  j["observables"] = c.observables;
  return j;
}

std::string emit_config(const ScenarioConfig& config) { return config_json(config).dump(2) + "\n"; }

std::filesystem::path resolve_output_dir(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return ".";
}

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IntegrityError("cannot write '" + tmp.string() + "'");
    out << contents;
    out.flush();
    if (!out) throw IntegrityError("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw IntegrityError("cannot move '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
  }
}

std::string trace_csv(const TraceSet& traces) {
  std::string out = "t_ns";
  for (const auto& l : traces.labels) out += ",n_" + l;
  out += ",trace_dev,purity\n";
  for (std::size_t i = 0; i < traces.size(); ++i) {
    out += format_number(traces.times[i]);
    for (const auto& s : traces.series) out += "," + format_number(s[i]);
    out += "," + format_number(traces.trace_deviation[i]) + "," + format_number(traces.purity[i]) + "\n";
  }
  return out;
}

ordered_json summary_json(const ScenarioResult& r) {
  const ScenarioConfig& c = r.config;
  const DeviceParams& p = r.params;
  ordered_json j;
  j["id"] = c.id;
  j["version"] = ERASEHEAD_VERSION;
  j["status"] = r.report.reached() ? "reached" : "not_reached";
  j["reset_mandatory"] = c.reset_mandatory;
  j["device"] = {{"natural", params_json(p, true)}, {"rad_per_ns", params_json(p, false)}};

  ordered_json cs = ordered_json::array();
  for (std::size_t k = 0; k < p.omega_c.size(); ++k) {
    ordered_json e;
    e["label"] = coupler_label(static_cast<int>(k + 1));
    e["setting"] = (k < c.couplers.size() && c.couplers[k].idle) ? "idle" : "explicit";
    e["ghz"] = ghz_of(p.omega_c[k]);
    e["rad_per_ns"] = p.omega_c[k];
    e["detuning_mhz"] = to_mhz(p.omega_r - p.omega_c[k]);
    cs.push_back(e);
  }
  j["couplers"] = cs;
  if (p.g_p != 0.0) {
    j["idle_frequency_ghz"] = to_ghz(idle_frequency(p));
    j["idle_frequency_rad_per_ns"] = idle_frequency(p);
  }
  j["configuration"] = config_json(c);
  j["hilbert"] = {{"full_dimension", r.full_dimension}, {"evolved_dimension", r.evolved_dimension}};
  j["reset"] = report_json(r.report);

  ordered_json prot = ordered_json::array();
  for (const auto& e : r.protection) prot.push_back({{"label", e.label}, {"min_fidelity", e.min_fidelity}});
  j["protection"] = prot;
  if (r.trapping) {
    j["trapping"] = {{"max_head_population", r.trapping->max_head},
                     {"max_resonator_population", r.trapping->max_resonator},
                     {"max_budget_error", r.trapping->max_budget_error}};
  }
  if (r.initial_dark_check) {
    const auto& d = *r.initial_dark_check;
    j["dark_state"] = {{"phi", d.phi},
                       {"transfer_amplitude", d.transfer},
                       {"eigen_residual", d.residual},
                       {"is_dark", d.is_dark},
                       {"trivially_stationary", d.trivially_stationary}};
  }
  const TraceSet& t = r.traces;
  j["integrity"] = {{"max_trace_deviation", t.max_trace_deviation},
                    {"max_hermiticity_correction", t.max_hermiticity_correction},
                    {"final_min_eigenvalue", t.final_min_eigenvalue},
                    {"flagged", t.flagged}};
  j["integrator"] = {{"accepted_steps", t.stats.accepted},
                     {"rejected_steps", t.stats.rejected},
                     {"rhs_evaluations", t.stats.rhs_evaluations}};
  j["warnings"] = p.soft_warnings();
  j["wall_seconds"] = r.wall_seconds;
  return j;
}

std::vector<RunOutcome> run(const RunManifest& manifest, std::ostream& log) {
  std::filesystem::create_directories(manifest.output_dir);
  auto outcomes = parallel_map(manifest.scenarios.size(), [&](std::size_t i) {
    const ScenarioConfig& c = manifest.scenarios[i];
    RunOutcome o;
    o.id = c.id;
    try {
      ScenarioResult r = run_scenario(c);
      if (manifest.write_csv) atomic_write(manifest.output_dir / (c.id + "_trace.csv"), trace_csv(r.traces));
      if (manifest.write_json) atomic_write(manifest.output_dir / (c.id + "_summary.json"), summary_json(r).dump(2) + "\n");
      o.exit_code = (!r.report.reached() && c.reset_mandatory) ? kNotReached : kSuccess;
      o.result = std::move(r);
    } catch (const std::exception& e) {
      std::ostringstream os;
      os << "scenario '" << c.id << "'";
      if (!manifest.config_path.empty()) os << " from " << manifest.config_path.string();
      os << ": " << e.what();
      o.error = os.str();
      o.exit_code = kFailure;
    }
    return o;
  });
  for (const auto& o : outcomes) {
    if (!o.error.empty()) {
      log << "error: " << o.error << "\n";
      continue;
    }
    const ResetReport& rep = o.result->report;
    log << o.id << ": ";
    if (rep.reached()) {
      log << "tau_res = " << format_number(*rep.tau_res) << " ns";
    } else {
      log << "reset threshold not reached";
    }
    log << " (" << o.result->wall_seconds << " s)\n";
  }
  return outcomes;
}

int combined_exit_code(const std::vector<RunOutcome>& outcomes) {
  int code = kSuccess;
  for (const auto& o : outcomes) {
    if (o.exit_code == kFailure) return kFailure;
    if (o.exit_code == kNotReached) code = kNotReached;
  }
  return code;
}

Reduction parse_reduction(const std::string& name) {
  if (name == "tau_res") return Reduction::TauRes;
  if (name == "tau_res_first") return Reduction::TauResFirst;
  if (name == "final_fidelity") return Reduction::FinalFidelity;
  if (name == "ratio") return Reduction::Ratio;
  throw ConfigError("unknown reduction '" + name + "' (expected tau_res, tau_res_first, final_fidelity or ratio)");
}

std::string to_string(Reduction r) {
  switch (r) {
    case Reduction::TauRes:
      return "tau_res";
    case Reduction::TauResFirst:
      return "tau_res_first";
    case Reduction::FinalFidelity:
      return "final_fidelity";
    case Reduction::Ratio:
      return "ratio";
  }
  return "unknown";
}

void SweepSpec::validate() const {
  if (grid.empty()) throw ConfigError("sweep grid is empty");
  for (double v : grid) {
    if (!std::isfinite(v)) throw ConfigError("sweep grid values must be finite");
  }
  tokenize(path);
}

ScenarioConfig with_parameter(const ScenarioConfig& config, const std::string& path, double value) {
  auto tokens = tokenize(path);
  if (tokens.size() == 2 && tokens[0].key == "device" && tokens[1].key == "omega_c") {
    tokens = {PathToken{"couplers", tokens[1].index}};
  }
  json doc = json::parse(emit_config(config));
  json* node = &doc;
  for (const auto& t : tokens) {
    if (!node->is_object() || !node->contains(t.key)) throw ConfigError("cannot resolve parameter path '" + path + "'");
    node = &(*node)[t.key];
    if (t.index) {
      if (!node->is_array() || *t.index >= node->size()) throw ConfigError("cannot resolve parameter path '" + path + "'");
      node = &(*node)[*t.index];
    }
  }
  const bool idle_coupler = node->is_string() && node->get<std::string>() == "idle";
  if (!node->is_number() && !idle_coupler) throw ConfigError("parameter path '" + path + "' does not name a number");
  if (node->is_number_integer()) {
    if (value != std::floor(value)) throw ConfigError("parameter '" + path + "' takes integer values");
    *node = static_cast<long long>(value);
  } else {
    *node = value;
  }
  return parse_config(doc.dump()).front();
}

std::vector<SweepRow> sweep(const ScenarioConfig& config, const SweepSpec& spec) {
  spec.validate();
  std::vector<ScenarioConfig> points;
  for (double v : spec.grid) points.push_back(with_parameter(config, spec.path, v));

  auto rows = parallel_map(points.size(), [&](std::size_t i) {
    SweepRow row;
    row.value = spec.grid[i];
    const ScenarioConfig& c = points[i];
    if (spec.reduction == Reduction::Ratio) {
      const DeviceParams p = c.resolved_params();
      double reset = from_ghz(3.1);
      for (const auto& s : c.couplers) {
        if (!s.idle) {
          reset = s.frequency;
          break;
        }
      }
      try {
        const RatioReport r = ratio_experiment(p, reset, c.threshold);
        row.reduction = r.ratio;
        row.reached = true;
      } catch (const UnreachedResetError&) {
        row.reached = false;
      }
      return row;
    }
    const ScenarioResult r = run_scenario(c);
    switch (spec.reduction) {
      case Reduction::TauRes:
        row.reduction = r.report.tau_res;
        row.reached = r.report.reached();
        break;
      case Reduction::TauResFirst: {
        double worst = 0.0;
        row.reached = true;
        for (const auto& q : r.report.qubits) {
          if (!q.first_crossing) row.reached = false;
          else worst = std::max(worst, *q.first_crossing);
        }
        if (row.reached) row.reduction = worst;
        break;
      }
      case Reduction::FinalFidelity: {
        double worst = 1.0;
        for (const auto& q : r.report.qubits) worst = std::min(worst, q.final_fidelity);
        row.reduction = worst;
        row.reached = r.report.reached();
        break;
      }
      case Reduction::Ratio:
        break;
    }
    return row;
  });
  std::stable_sort(rows.begin(), rows.end(), [](const SweepRow& a, const SweepRow& b) { return a.value < b.value; });
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "value,reduction,reached\n";
  for (const auto& r : rows) {
    out += format_number(r.value) + "," + (r.reduction ? format_number(*r.reduction) : std::string("nan")) + "," +
           (r.reached ? "true" : "false") + "\n";
  }
  return out;
}

Diagnostics validate(const std::string& text) {
  Diagnostics d;
  std::vector<ScenarioConfig> configs;
  try {
    configs = parse_config(text);
  } catch (const std::exception& e) {
    d.errors.push_back(e.what());
    return d;
  }
  for (const auto& c : configs) {
    const std::string tag = "scenario '" + c.id + "': ";
    try {
      const DeviceParams p = c.resolved_params();
      const SpacePtr space = build_space(p, p.n_working());
      const Operator h = build_hamiltonians(p, space).total;
      const Operator n_total = total_excitation_operator(space);
      d.hermiticity_defect = std::max(d.hermiticity_defect, h.hermiticity_defect());
      d.excitation_commutator = std::max(d.excitation_commutator, max_abs(commutator(h, n_total).matrix()));
      const double scale = std::max(1.0, max_abs(h.matrix()));
      if (h.hermiticity_defect() > 1e-12 * scale) {
        d.errors.push_back(tag + "Hamiltonian is not Hermitian (defect " + format_number(h.hermiticity_defect()) + ")");
      }
      if (max_abs(commutator(h, n_total).matrix()) > 1e-12 * scale) {
        d.errors.push_back(tag + "Hamiltonian does not conserve the total excitation number");
      }
      for (std::size_t k = 0; k < p.omega_c.size(); ++k) {
        const double delta = p.omega_r - p.omega_c[k];
        if (std::abs(delta) < 5.0 * std::abs(p.g_qc)) {
          std::ostringstream os;
          os << tag << "coupler " << coupler_label(static_cast<int>(k + 1)) << " at " << to_ghz(p.omega_c[k])
             << " GHz: |delta| = " << to_mhz(std::abs(delta)) << " MHz < 5 g_qc = " << to_mhz(5.0 * std::abs(p.g_qc))
             << " MHz, outside the dispersive regime";
          d.warnings.push_back(os.str());
        }
      }
      if (!(p.g_qc < p.g_r)) {
        std::ostringstream os;
        os << tag << "g_qc = " << to_mhz(p.g_qc) << " MHz >= g_r = " << to_mhz(p.g_r)
           << " MHz violates the g_qc < g_r ordering";
        d.warnings.push_back(os.str());
      }
      if (!(p.g_r < p.kappa)) {
        std::ostringstream os;
        os << tag << "kappa = " << to_mhz(p.kappa) << " MHz <= g_r = " << to_mhz(p.g_r)
           << " MHz violates the g_r < kappa ordering";
        d.warnings.push_back(os.str());
      }
      for (const auto& w : p.soft_warnings()) d.warnings.push_back(tag + w);
    } catch (const std::exception& e) {
      d.errors.push_back(tag + e.what());
    }
  }
  return d;
}

}  // namespace erasehead::cli
