#include "commands.hpp"
#include "io.hpp"
#include "run_context.hpp"

#include "molcert/error.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <list>
#include <optional>
#include <string>

namespace {

using molcert::cli::UsageError;
using nlohmann::json;

enum class Kind { kText, kNumber, kInteger, kTextList, kNumberList };

/// A command-line flag that overrides one config key (a JSON pointer).
struct Flag {
  std::string pointer;
  Kind kind = Kind::kText;
  std::string value;
  CLI::Option* option = nullptr;
};

json convert(const Flag& f) {
  auto to_number = [&](const std::string& s) {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::logic_error&) {
      throw UsageError(f.option->get_name() + ": not a number: '" + s + "'");
    }
  };
  switch (f.kind) {
    case Kind::kText:
      return f.value;
    case Kind::kNumber:
      return to_number(f.value);
    case Kind::kInteger: {
      const double v = to_number(f.value);
      if (v < 0 || v != static_cast<double>(static_cast<unsigned long long>(v))) {
        throw UsageError(f.option->get_name() + ": expected a non-negative integer");
      }
      return static_cast<unsigned long long>(v);
    }
    case Kind::kTextList: {
      json out = json::array();
      if (!f.value.empty()) {
        for (auto& s : molcert::cli::split(f.value, ',')) out.push_back(s);
      }
      return out;
    }
    case Kind::kNumberList: {
      json out = json::array();
      for (auto& s : molcert::cli::split(f.value, ',')) out.push_back(to_number(s));
      return out;
    }
  }
  return nullptr;
}

json overrides_from(const std::list<Flag>& flags) {
  json o = json::object();
  for (const auto& f : flags) {
    if (f.option->count() > 0) o[json::json_pointer(f.pointer)] = convert(f);
  }
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"molcert: sample structural uncertainty and certify derived molecular quantities"};
  app.require_subcommand(1);
  app.fallthrough();

  std::list<Flag> global_flags;
  auto add = [](std::list<Flag>& list, CLI::App* app, const std::string& name, const std::string& pointer, Kind kind,
                const std::string& help) {
    auto& f = list.emplace_back();
    f.pointer = pointer;
    f.kind = kind;
    f.option = app->add_option(name, f.value, help);
  };

  std::string config_path;
  app.add_option("--config", config_path, "JSON run config, or the .meta.json of an earlier run");
  add(global_flags, &app, "--seed", "/seed", Kind::kInteger, "Random seed");
  add(global_flags, &app, "--samples", "/samples", Kind::kInteger, "Number of conformers to draw");
  add(global_flags, &app, "--workers", "/workers", Kind::kInteger, "Worker threads (outputs do not depend on it)");
  add(global_flags, &app, "--out", "/out", Kind::kText, "Output directory");

  std::map<std::string, std::list<Flag>> sub_flags;
  std::map<std::string, CLI::App*> subs;
  auto sub = [&](const std::string& name, const std::string& help) {
    subs[name] = app.add_subcommand(name, help);
    return subs[name];
  };
  auto flag = [&](const std::string& cmd, const std::string& name, const std::string& key, Kind kind,
                  const std::string& help) { add(sub_flags[cmd], subs.at(cmd), name, key, kind, help); };

  sub("sample", "Draw a conformer ensemble from B-factor or torsion uncertainty");
  flag("sample", "--structure", "/structure", Kind::kText, "Input PDB");
  flag("sample", "--params", "/params", Kind::kText, "Parameter table JSON (built-in table when omitted)");
  flag("sample", "--mode", "/mode", Kind::kText, "cartesian or torsion");
  flag("sample", "--sequence", "/sequence", Kind::kText, "lds or random");
  flag("sample", "--torsions", "/torsions", Kind::kText, "Dihedral override JSON");
  flag("sample", "--window", "/window", Kind::kNumber, "Torsion range: current angle +- window (radians)");
  flag("sample", "--root", "/root", Kind::kInteger, "Atom index that stays fixed in torsion mode");
  flag("sample", "--clash-factor", "/clash_factor", Kind::kNumber, "Reject pairs closer than factor * (r_i + r_j)");

  sub("qoi", "Evaluate quantities of interest over an ensemble");
  flag("qoi", "--structure", "/structure", Kind::kText, "Reference PDB (topology and parameters)");
  flag("qoi", "--params", "/params", Kind::kText, "Parameter table JSON");
  flag("qoi", "--ensemble", "/ensemble", Kind::kText, "Multi-model PDB");
  flag("qoi", "--qoi", "/qoi", Kind::kTextList, "Comma-separated quantities (area, volume, lj, coulomb, gb, delta_*)");
  flag("qoi", "--probe", "/probe", Kind::kNumber, "Probe radius (A)");
  flag("qoi", "--n-points", "/n_points", Kind::kInteger, "Sphere points per atom");
  flag("qoi", "--spacing", "/spacing", Kind::kNumber, "Volume grid spacing (A)");
  flag("qoi", "--dielectric-mode", "/dielectric/mode", Kind::kText, "constant or distance");
  flag("qoi", "--dielectric", "/dielectric/value", Kind::kNumber, "eps0, or k for eps(r) = k r");
  flag("qoi", "--solvent-dielectric", "/solvent_dielectric", Kind::kNumber, "Solvent dielectric for GB");
  flag("qoi", "--receptor-chains", "/receptor_chains", Kind::kText, "Chains of partner A for delta quantities");

  sub("certify", "Certificate tables and z-scores from a QOI stream");
  flag("certify", "--values", "/values", Kind::kText, "qoi.csv");
  flag("certify", "--reference", "/reference", Kind::kText, "reference.csv for z-scores");
  flag("certify", "--qoi", "/qoi", Kind::kTextList, "Columns to use (all when omitted)");
  flag("certify", "--t-values", "/t_values", Kind::kNumberList, "Comma-separated relative thresholds");

  sub("saturate", "Sample-count saturation of the certificate tables");
  flag("saturate", "--values", "/values", Kind::kText, "qoi.csv");
  flag("saturate", "--qoi", "/qoi", Kind::kTextList, "Columns to use (all when omitted)");
  flag("saturate", "--t-values", "/t_values", Kind::kNumberList, "Comma-separated relative thresholds");
  flag("saturate", "--tau", "/tau", Kind::kNumber, "Saturation threshold");
  flag("saturate", "--saturation-mode", "/saturation_mode", Kind::kText, "full, incremental or both");
  flag("saturate", "--subsets", "/subsets", Kind::kText, "random or prefix");
  flag("saturate", "--stopping", "/stopping", Kind::kText, "persistent or first");
  flag("saturate", "--increment", "/increment", Kind::kInteger, "Comparison offset in incremental mode");

  sub("bound", "Theoretical tail bounds for decaying-kernel sums");
  flag("bound", "--spec", "/bound_spec", Kind::kText, "Kernel/box description JSON");
  flag("bound", "--t-values", "/t_values", Kind::kNumberList, "Comma-separated deviations t");
  flag("bound", "--mc-draws", "/mc_draws", Kind::kInteger, "Monte-Carlo draws for an empirical tail column");

  sub("bindsite", "Binding-site probability maps from docked poses");
  flag("bindsite", "--receptor", "/receptor", Kind::kText, "Receptor PDB");
  flag("bindsite", "--ligand", "/ligand", Kind::kText, "Ligand PDB (one model per conformer)");
  flag("bindsite", "--poses", "/poses", Kind::kText, "Pose JSON");
  flag("bindsite", "--cutoff", "/cutoff", Kind::kNumber, "Contact cutoff (A)");
  flag("bindsite", "--known-site", "/known_site", Kind::kText, "bindsite_atoms.csv of a known inhibitor");
  flag("bindsite", "--palette", "/palette", Kind::kText, "rainbow or green_white_red");
  flag("bindsite", "--object", "/object", Kind::kText, "Viewer object name used in the color script");

  sub("volmap", "Occupancy and grid statistics in OpenDX format");
  flag("volmap", "--structure", "/structure", Kind::kText, "Reference PDB");
  flag("volmap", "--params", "/params", Kind::kText, "Parameter table JSON");
  flag("volmap", "--ensemble", "/ensemble", Kind::kText, "Multi-model PDB");
  flag("volmap", "--grids", "/grids", Kind::kTextList, "Comma-separated .dx files for mean/std");
  flag("volmap", "--grid-spacing", "/grid_spacing", Kind::kNumber, "Grid spacing (A)");
  flag("volmap", "--radius-mode", "/radius_mode", Kind::kText, "vdw or fixed");
  flag("volmap", "--fixed-radius", "/fixed_radius", Kind::kNumber, "Radius for fixed mode (A)");

  sub("modes", "Per-atom motion modes, RMSD matrix and torsion spread");
  flag("modes", "--structure", "/structure", Kind::kText, "Reference PDB");
  flag("modes", "--ensemble", "/ensemble", Kind::kText, "Multi-model PDB");
  flag("modes", "--rmsd", "/rmsd", Kind::kText, "fixed or superposed");
  flag("modes", "--root", "/root", Kind::kInteger, "Atom index that stays fixed for torsion detection");

  std::string replay_meta;
  auto* replay = app.add_subcommand("replay", "Repeat a run from its .meta.json sidecar");
  replay->add_option("meta", replay_meta, "Sidecar written by an earlier run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  std::string command = "molcert";
  try {
    std::optional<std::filesystem::path> file;
    json overrides = overrides_from(global_flags);
    if (replay->parsed()) {
      const json meta = molcert::cli::read_json(replay_meta);
      if (!meta.contains("command") || !meta["command"].is_string()) {
        throw molcert::ParseError(replay_meta + ": not a molcert sidecar");
      }
      command = meta["command"].get<std::string>();
      file = replay_meta;
    } else {
      for (const auto& [name, s] : subs) {
        if (s->parsed()) command = name;
      }
      overrides.merge_patch(overrides_from(sub_flags[command]));
      if (!config_path.empty()) file = config_path;
    }
    molcert::cli::RunContext ctx(command, molcert::cli::resolve_config(command, file, overrides));
    molcert::cli::run_command(ctx);
    return 0;
  } catch (const UsageError& e) {
    std::cerr << "molcert " << command << ": usage error: " << e.what() << "\n";
    return 1;
  } catch (const molcert::DomainError& e) {
    std::cerr << "molcert " << command << ": " << e.what() << "\n";
    return 3;
  } catch (const molcert::Error& e) {
    std::cerr << "molcert " << command << ": " << e.what() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "molcert " << command << ": invalid JSON content: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "molcert " << command << ": " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "molcert " << command << ": " << e.what() << "\n";
    return 3;
  }
}
