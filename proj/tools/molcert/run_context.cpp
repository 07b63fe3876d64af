#include "run_context.hpp"

#include "io.hpp"

#include "molcert/certificates.hpp"
#include "molcert/error.hpp"

#include <algorithm>

#ifndef MOLCERT_VERSION
#define MOLCERT_VERSION "unknown"
#endif

namespace molcert::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kPathKeys{"structure", "params",    "torsions",   "ensemble", "values",
                                         "reference", "receptor",  "ligand",     "poses",    "known_site",
                                         "bound_spec", "out"};
const std::vector<std::string> kPathListKeys{"grids"};

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"sample", "qoi",      "certify", "saturate",
                                              "bound",  "bindsite", "volmap",  "modes"};
  return names;
}

json default_config(const std::string& command) {
  json c = {{"seed", 1}, {"workers", 1}, {"out", "."}};
  const json t_values = default_t_values();
  if (command == "sample") {
    c.update({{"structure", nullptr},
              {"params", nullptr},
              {"samples", 100},
              {"mode", "cartesian"},
              {"sequence", "lds"},
              {"torsions", nullptr},
              {"window", nullptr},
              {"root", 0},
              {"clash_factor", 0.6}});
  } else if (command == "qoi") {
    c.update({{"structure", nullptr},
              {"params", nullptr},
              {"ensemble", nullptr},
              {"qoi", {"area", "volume", "lj", "coulomb", "gb"}},
              {"probe", 1.4},
              {"n_points", 960},
              {"spacing", 0.5},
              {"dielectric", {{"mode", "constant"}, {"value", 1.0}}},
              {"solvent_dielectric", 80.0},
              {"receptor_chains", ""}});
  } else if (command == "certify") {
    c.update({{"values", nullptr}, {"reference", nullptr}, {"qoi", json::array()}, {"t_values", t_values}});
  } else if (command == "saturate") {
    c.update({{"values", nullptr},
              {"qoi", json::array()},
              {"t_values", t_values},
              {"tau", 0.05},
              {"saturation_mode", "both"},
              {"subsets", "random"},
              {"stopping", "persistent"},
              {"increment", 10}});
  } else if (command == "bound") {
    c.update({{"bound_spec", nullptr}, {"bound", nullptr}, {"t_values", nullptr}, {"mc_draws", 0}});
  } else if (command == "bindsite") {
    c.update({{"receptor", nullptr},
              {"ligand", nullptr},
              {"poses", nullptr},
              {"cutoff", 5.0},
              {"known_site", nullptr},
              {"palette", "rainbow"},
              {"object", "all"}});
  } else if (command == "volmap") {
    c.update({{"structure", nullptr},
              {"params", nullptr},
              {"ensemble", nullptr},
              {"grids", json::array()},
              {"grid_spacing", 0.5},
              {"radius_mode", "vdw"},
              {"fixed_radius", 1.5}});
  } else if (command == "modes") {
    c.update({{"structure", nullptr}, {"ensemble", nullptr}, {"rmsd", "fixed"}, {"root", 0}});
  } else {
    throw UsageError("unknown command '" + command + "'");
  }
  return c;
}

void absolutize_paths(json& config, const fs::path& base) {
  auto fix = [&](json& v) {
    if (!v.is_string()) return;
    const fs::path p(v.get<std::string>());
    v = (p.is_absolute() ? p : base / p).lexically_normal().string();
  };
  for (const auto& k : kPathKeys) {
    if (config.contains(k)) fix(config[k]);
  }
  for (const auto& k : kPathListKeys) {
    if (config.contains(k) && config[k].is_array()) {
      for (auto& v : config[k]) fix(v);
    }
  }
}

json resolve_config(const std::string& command, const std::optional<fs::path>& config_file, const json& overrides) {
  const json defaults = default_config(command);
  json config = defaults;
  if (config_file) {
    json file = read_json(*config_file);
    if (!file.is_object()) throw ParseError(config_file->string() + ": config must be a JSON object");
    // A sidecar from an earlier run carries its settings under "config".
    if (file.contains("command") && file.contains("config")) {
      if (file["command"] != command) {
        throw UsageError(config_file->string() + " records a '" + file["command"].get<std::string>() +
                         "' run, not '" + command + "'");
      }
      file = file["config"];
    }
    absolutize_paths(file, fs::absolute(*config_file).parent_path());
    config.merge_patch(file);
  }
  json o = overrides;
  absolutize_paths(o, fs::current_path());
  config.merge_patch(o);
  // merge_patch treats null as removal; restore unset optional keys.
  for (const auto& [k, v] : defaults.items()) {
    if (!config.contains(k)) config[k] = v;
  }

  RunContext probe(command, config);
  if (probe.workers() == 0) throw UsageError("--workers must be at least 1");
  if (config.contains("samples") && probe.count("samples") == 0) throw UsageError("--samples must be at least 1");
  return config;
}

RunContext::RunContext(std::string command, json config) : command_(std::move(command)), config_(std::move(config)) {
  out_ = fs::path(config_.value("out", "."));
}

const json& RunContext::at(std::string_view key) const {
  const std::string k(key);
  if (!config_.contains(k) || config_[k].is_null()) throw UsageError("missing setting '" + k + "'");
  return config_[k];
}

bool RunContext::has(std::string_view key) const {
  const std::string k(key);
  return config_.contains(k) && !config_[k].is_null();
}

std::uint64_t RunContext::seed() const { return at("seed").get<std::uint64_t>(); }

std::size_t RunContext::workers() const { return count("workers"); }

double RunContext::number(std::string_view key) const {
  const auto& v = at(key);
  if (!v.is_number()) throw UsageError("setting '" + std::string(key) + "' must be a number");
  return v.get<double>();
}

std::size_t RunContext::count(std::string_view key) const {
  const auto& v = at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw UsageError("setting '" + std::string(key) + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

std::string RunContext::text(std::string_view key) const {
  const auto& v = at(key);
  if (!v.is_string()) throw UsageError("setting '" + std::string(key) + "' must be a string");
  return v.get<std::string>();
}

std::vector<double> RunContext::numbers(std::string_view key) const {
  const auto& v = at(key);
  if (!v.is_array()) throw UsageError("setting '" + std::string(key) + "' must be a list of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw UsageError("setting '" + std::string(key) + "' must be a list of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<std::string> RunContext::texts(std::string_view key) const {
  const auto& v = at(key);
  if (!v.is_array()) throw UsageError("setting '" + std::string(key) + "' must be a list of strings");
  std::vector<std::string> out;
  for (const auto& x : v) {
    if (!x.is_string()) throw UsageError("setting '" + std::string(key) + "' must be a list of strings");
    out.push_back(x.get<std::string>());
  }
  return out;
}

std::string RunContext::record_input(const std::string& label, const std::string& path) {
  std::string bytes = read_file(path);
  inputs_[label] = {{"path", path}, {"bytes", bytes.size()}, {"fnv1a64", fingerprint(bytes)}};
  return bytes;
}

std::string RunContext::input(std::string_view key) {
  if (!has(key)) throw UsageError("missing required input '" + std::string(key) + "'");
  return record_input(std::string(key), text(key));
}

std::optional<std::string> RunContext::optional_input(std::string_view key) {
  if (!has(key)) return std::nullopt;
  return record_input(std::string(key), text(key));
}

std::string RunContext::input_from_list(std::string_view key, std::size_t index) {
  const auto paths = texts(key);
  return record_input(std::string(key) + "[" + std::to_string(index) + "]", paths.at(index));
}

void RunContext::write(const std::string& name, std::string_view content) {
  fs::create_directories(out_);
  write_file(out_ / name, content);
  outputs_.push_back(name);
}

void RunContext::result(const std::string& key, json value) { results_[key] = std::move(value); }

void RunContext::finish() const {
  json meta = {{"command", command_},
               {"versions", {{"molcert", MOLCERT_VERSION}, {"sidecar", 1}}},
               {"seed", config_.value("seed", json())},
               {"config", config_},
               {"inputs", inputs_},
               {"outputs", outputs_},
               {"results", results_}};
  fs::create_directories(out_);
  write_file(out_ / (command_ + ".meta.json"), meta.dump(2) + "\n");
}

}  // namespace molcert::cli
