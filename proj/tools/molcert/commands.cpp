#include "commands.hpp"

#include "io.hpp"

#include "molcert/binding_site.hpp"
#include "molcert/certificates.hpp"
#include "molcert/conformers.hpp"
#include "molcert/error.hpp"
#include "molcert/parallel.hpp"
#include "molcert/params.hpp"
#include "molcert/pdb.hpp"
#include "molcert/qoi.hpp"
#include "molcert/sampling.hpp"
#include "molcert/theory_bounds.hpp"
#include "molcert/viz_export.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>

namespace molcert::cli {

using nlohmann::json;

namespace {

json parse_json_text(const std::string& text, const std::string& label) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(label + ": " + e.what());
  }
}

Structure load_structure(RunContext& ctx, const std::string& key, bool with_params) {
  Structure s = parse_pdb(ctx.input(key));
  if (s.empty()) throw ParseError(key + " contains no atoms");
  if (with_params) {
    const auto params = ctx.optional_input("params");
    const ParamTable table = params ? ParamTable::from_json(parse_json_text(*params, "params")) : ParamTable::builtin();
    s = assign_params(std::move(s), table);
  }
  return s;
}

std::vector<Positions> load_models(RunContext& ctx, const std::string& key, std::size_t atoms) {
  std::vector<Positions> out;
  for (const auto& m : parse_pdb_models(ctx.input(key))) {
    if (m.size() != atoms) {
      throw ParseError(key + " model " + std::to_string(out.size() + 1) + " has " + std::to_string(m.size()) +
                       " atoms, the structure has " + std::to_string(atoms));
    }
    out.push_back(m.positions());
  }
  return out;
}

std::string csv_char(char c) { return c == ' ' ? std::string() : std::string(1, c); }

template <typename T>
T pick(const std::string& setting, const std::string& value, const std::map<std::string, T>& choices) {
  const auto it = choices.find(value);
  if (it != choices.end()) return it->second;
  std::string allowed;
  for (const auto& [k, v] : choices) allowed += (allowed.empty() ? "" : ", ") + k;
  throw UsageError("setting '" + setting + "' must be one of: " + allowed + " (got '" + value + "')");
}

std::vector<QoiKind> qoi_kinds(const std::vector<std::string>& names) {
  std::vector<QoiKind> kinds;
  for (const auto& n : names) {
    try {
      kinds.push_back(parse_qoi_kind(n));
    } catch (const DomainError&) {
      throw UsageError("unknown quantity '" + n + "'");
    }
  }
  if (kinds.empty()) throw UsageError("no quantities selected");
  return kinds;
}

/// QOI columns of a values table, optionally restricted to `wanted`.
std::vector<std::size_t> value_columns(const CsvTable& t, const std::vector<std::string>& wanted) {
  std::vector<std::size_t> cols;
  if (wanted.empty()) {
    for (std::size_t c = 0; c < t.header.size(); ++c) {
      if (t.header[c] != "model") cols.push_back(c);
    }
  } else {
    for (const auto& w : wanted) cols.push_back(t.column(w));
  }
  if (cols.empty()) throw ParseError("values table has no quantity columns", 1);
  if (t.rows.empty()) throw ParseError("values table has no rows");
  return cols;
}

std::vector<double> column_values(const CsvTable& t, std::size_t col) {
  std::vector<double> v;
  v.reserve(t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r) v.push_back(t.number(r, col));
  return v;
}

std::string fixed4(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", x);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

}  // namespace

void cmd_sample(RunContext& ctx) {
  const Structure s = load_structure(ctx, "structure", true);
  SamplingOptions opt;
  opt.samples = ctx.count("samples");
  opt.seed = ctx.seed();
  opt.workers = ctx.workers();
  opt.clash_factor = ctx.number("clash_factor");
  const std::string sequence = ctx.text("sequence");
  opt.sequence = pick<SequenceKind>(
      "sequence", sequence, {{"lds", SequenceKind::kLowDiscrepancy}, {"random", SequenceKind::kPseudoRandom}});
  const std::string mode = ctx.text("mode");

  Ensemble e;
  json extra = json::object();
  if (mode == "cartesian") {
    e = sample_cartesian(s, opt);
  } else if (mode == "torsion") {
    const std::size_t root = ctx.count("root");
    const auto override_doc = ctx.optional_input("torsions");
    TorsionGraph g = override_doc ? TorsionGraph::from_json(s, parse_json_text(*override_doc, "torsions"), root)
                                  : TorsionGraph::detect(s, root);
    if (g.size() == 0) throw DomainError("structure has no rotatable bonds");
    if (ctx.has("window")) g.set_windows(g.angles(s.positions()), ctx.number("window"));
    json dihedrals = json::array();
    for (const auto& d : g.dihedrals()) {
      dihedrals.push_back({{"atoms", d.atoms}, {"lower", d.lower}, {"upper", d.upper}});
    }
    extra["dihedrals"] = dihedrals;
    e = sample_torsions(s, g, opt);
  } else {
    throw UsageError("setting 'mode' must be cartesian or torsion (got '" + mode + "')");
  }

  std::vector<Positions> models;
  std::vector<std::size_t> numbers;
  json rejections = json::array();
  json accepted = json::array();
  for (const auto& c : e.conformers) {
    if (c.accepted) {
      models.push_back(c.positions);
      numbers.push_back(c.sample_index + 1);
      accepted.push_back(c.sample_index);
    } else {
      rejections.push_back({{"sample", c.sample_index}, {"reason", c.rejection_reason.value_or("")}});
    }
  }
  json manifest = {{"seed", opt.seed},
                   {"samples", opt.samples},
                   {"sequence", sequence},
                   {"mode", mode},
                   {"accepted", models.size()},
                   {"rejected", rejections.size()},
                   {"accepted_samples", accepted},
                   {"rejections", rejections}};
  manifest.update(extra);
  ctx.write("manifest.json", manifest.dump(2) + "\n");
  ctx.result("accepted", models.size());
  ctx.result("rejected", rejections.size());
  ctx.result("sequence", sequence);
  if (models.empty()) {
    ctx.finish();
    throw DomainError("all " + std::to_string(opt.samples) + " samples were rejected (first: " +
                      rejections.front()["reason"].get<std::string>() + ")");
  }
  ctx.write("ensemble.pdb", write_pdb_models(s, models, numbers));
}

void cmd_qoi(RunContext& ctx) {
  const Structure s = load_structure(ctx, "structure", true);
  const auto models = load_models(ctx, "ensemble", s.size());
  const auto names = ctx.texts("qoi");
  const auto kinds = qoi_kinds(names);

  QoiConfig cfg;
  cfg.probe = ctx.number("probe");
  cfg.n_points = ctx.count("n_points");
  cfg.spacing = ctx.number("spacing");
  cfg.solvent_dielectric = ctx.number("solvent_dielectric");
  cfg.receptor_chains = ctx.text("receptor_chains");
  const json& diel = ctx.config()["dielectric"];
  if (!diel.is_object() || !diel.contains("mode") || !diel.contains("value")) {
    throw UsageError("setting 'dielectric' must be {\"mode\": ..., \"value\": ...}");
  }
  const double value = diel["value"].get<double>();
  cfg.coulomb = pick<CoulombModel>("dielectric.mode", diel["mode"].get<std::string>(),
                                   {{"constant", CoulombModel::constant(value)},
                                    {"distance", CoulombModel::distance_dependent(value)}});

  std::vector<double> table(models.size() * kinds.size());
  parallel_for(models.size(), ctx.workers(), [&](std::size_t m) {
    for (std::size_t k = 0; k < kinds.size(); ++k) table[m * kinds.size() + k] = evaluate_qoi(kinds[k], s, models[m], cfg);
  });

  std::string csv = "model";
  for (auto k : kinds) csv += "," + std::string(to_string(k));
  csv += "\n";
  for (std::size_t m = 0; m < models.size(); ++m) {
    csv += std::to_string(m + 1);
    for (std::size_t k = 0; k < kinds.size(); ++k) csv += "," + num(table[m * kinds.size() + k]);
    csv += "\n";
  }
  ctx.write("qoi.csv", csv);

  std::string ref = "qoi,value\n";
  const Positions x0 = s.positions();
  for (auto k : kinds) ref += std::string(to_string(k)) + "," + num(evaluate_qoi(k, s, x0, cfg)) + "\n";
  ctx.write("reference.csv", ref);
  ctx.result("models", models.size());
}

void cmd_certify(RunContext& ctx) {
  const CsvTable values = parse_csv(ctx.input("values"));
  const auto cols = value_columns(values, ctx.texts("qoi"));
  const auto t = ctx.numbers("t_values");

  std::map<std::string, double> reference;
  if (const auto ref_text = ctx.optional_input("reference")) {
    const CsvTable ref = parse_csv(*ref_text);
    const std::size_t q = ref.column("qoi"), v = ref.column("value");
    for (std::size_t r = 0; r < ref.rows.size(); ++r) reference[ref.rows[r][q]] = ref.number(r, v);
  }

  std::string csv = "qoi,t,epsilon\n";
  std::string z = "qoi,reference,mean,std,zscore\n";
  std::vector<std::string> names;
  std::vector<CertificateTable> tables;
  std::vector<EmpiricalDistribution> dists;
  for (std::size_t c : cols) {
    const std::string& name = values.header[c];
    auto d = EmpiricalDistribution::from(column_values(values, c));
    auto table = chernoff_table(d, t);
    for (std::size_t k = 0; k < t.size(); ++k) csv += name + "," + num(t[k]) + "," + num(table.epsilons[k]) + "\n";
    if (const auto it = reference.find(name); it != reference.end()) {
      z += name + "," + num(it->second) + "," + num(d.mean) + "," + num(d.std) + ",";
      if (d.std > 0.0) z += num(zscore(it->second, d));
      z += "\n";
    }
    names.push_back(name);
    tables.push_back(std::move(table));
    dists.push_back(std::move(d));
  }
  ctx.write("certificates.csv", csv);

  // Rows are quantities, columns are thresholds.
  std::size_t name_w = 4;
  for (const auto& n : names) name_w = std::max(name_w, n.size() + 2);
  std::vector<std::string> heads;
  std::size_t col_w = 8;
  for (double x : t) {
    heads.push_back("t=" + num(x));
    col_w = std::max(col_w, heads.back().size() + 2);
  }
  std::string txt = pad("QOI", name_w);
  for (const auto& h : heads) txt += pad(h, col_w);
  txt += "mean  std  N\n";
  for (std::size_t i = 0; i < names.size(); ++i) {
    txt += pad(names[i], name_w);
    for (double e : tables[i].epsilons) txt += pad(fixed4(e), col_w);
    txt += num(dists[i].mean) + "  " + num(dists[i].std) + "  " + std::to_string(dists[i].count()) + "\n";
  }
  ctx.write("certificates.txt", txt);
  if (!reference.empty()) ctx.write("zscores.csv", z);
  ctx.result("values", values.rows.size());
}

void cmd_saturate(RunContext& ctx) {
  const CsvTable values = parse_csv(ctx.input("values"));
  const auto cols = value_columns(values, ctx.texts("qoi"));

  SaturationOptions base;
  base.tau = ctx.number("tau");
  base.t_values = ctx.numbers("t_values");
  base.increment = ctx.count("increment");
  base.seed = ctx.seed();
  base.subsets = pick<SubsetRule>("subsets", ctx.text("subsets"),
                                  {{"random", SubsetRule::kRandom}, {"prefix", SubsetRule::kPrefix}});
  base.stopping = pick<StoppingRule>("stopping", ctx.text("stopping"),
                                     {{"persistent", StoppingRule::kPersistent}, {"first", StoppingRule::kFirstCrossing}});
  const std::string which = ctx.text("saturation_mode");
  std::vector<SaturationMode> modes;
  if (which == "both" || which == "full") modes.push_back(SaturationMode::kFull);
  if (which == "both" || which == "incremental") modes.push_back(SaturationMode::kIncremental);
  if (modes.empty()) throw UsageError("setting 'saturation_mode' must be full, incremental or both");

  std::string curve = "qoi,mode,r,error\n";
  std::string summary = "qoi,mode,tau,r_star,saturated\n";
  for (std::size_t c : cols) {
    const auto v = column_values(values, c);
    for (auto mode : modes) {
      SaturationOptions opt = base;
      opt.mode = mode;
      const auto rep = saturation(v, opt, values.header[c]);
      const std::string prefix = rep.qoi + "," + to_string(mode) + ",";
      for (const auto& p : rep.error_curve) curve += prefix + std::to_string(p.r) + "," + num(p.error) + "\n";
      summary += prefix + num(rep.tau) + "," + std::to_string(rep.r_star) + "," + (rep.saturated ? "true" : "false") +
                 "\n";
    }
  }
  ctx.write("saturation.csv", curve);
  ctx.write("saturation_summary.csv", summary);
}

namespace {

KernelSpec kernel_of(const json& spec) {
  if (!spec.contains("terms")) throw UsageError("bound description needs 'terms'");
  KernelSpec k;
  for (const auto& t : spec["terms"]) k.terms.push_back({t.at("a").get<double>(), t.at("b").get<double>()});
  k.validate();
  return k;
}

BoxDomain box_of(const json& j) {
  BoxDomain b;
  for (const auto& iv : j) {
    if (!iv.is_array() || iv.size() != 2) throw UsageError("box intervals are [lower, upper] pairs");
    b.intervals.push_back({iv[0].get<double>(), iv[1].get<double>()});
  }
  return b;
}

std::vector<BoxDomain> boxes_of(const json& j) {
  std::vector<BoxDomain> out;
  for (const auto& b : j) out.push_back(box_of(b));
  return out;
}

double draw(const Interval& iv, double u) { return iv.lower + u * (iv.upper - iv.lower); }

double norm_of(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::sqrt(s);
}

/// Fraction of draws with |f - centre| >= t, for each t.
std::vector<double> empirical_tail(const std::vector<double>& f, double centre, std::span<const double> t) {
  std::vector<double> dev(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) dev[i] = std::abs(f[i] - centre);
  std::sort(dev.begin(), dev.end());
  std::vector<double> out;
  for (double x : t) {
    const auto below = std::lower_bound(dev.begin(), dev.end(), x) - dev.begin();
    out.push_back(static_cast<double>(dev.size() - static_cast<std::size_t>(below)) / static_cast<double>(dev.size()));
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

void cmd_bound(RunContext& ctx) {
  json spec;
  if (const auto file = ctx.optional_input("bound_spec")) {
    spec = parse_json_text(*file, "bound_spec");
  } else if (ctx.has("bound")) {
    spec = ctx.config()["bound"];
  } else {
    throw UsageError("missing required input 'bound_spec' (or an inline 'bound' object)");
  }
  if (!spec.is_object() || !spec.contains("kind")) throw UsageError("bound description needs a 'kind'");

  std::vector<double> t;
  if (ctx.has("t_values")) {
    t = ctx.numbers("t_values");
  } else if (spec.contains("t")) {
    t = spec["t"].get<std::vector<double>>();
  } else {
    for (int k = 1; k <= 20; ++k) t.push_back(0.05 * k);
  }
  if (t.empty()) throw UsageError("empty t grid");

  const std::size_t draws = ctx.count("mc_draws");
  const std::uint64_t seed = ctx.seed();
  const std::string kind = spec["kind"].get<std::string>();

  std::vector<double> bound;
  std::vector<double> mc;
  std::vector<std::pair<std::string, double>> constants;

  if (kind == "kernel") {
    const KernelSpec k = kernel_of(spec);
    const BoxDomain box = box_of(spec.at("box"));
    const auto dev = d3_bounds(k, box);
    double sum = 0.0;
    for (std::size_t i = 0; i < dev.size(); ++i) {
      constants.emplace_back("D_" + std::to_string(i + 1), dev[i]);
      sum += dev[i] * dev[i];
    }
    constants.emplace_back("sum_D2", sum);
    for (double x : t) bound.push_back(mcdiarmid_tail(dev, x));
    if (draws > 0) {
      PseudoRandomSequence rng(box.dimension(), seed);
      std::vector<double> u(box.dimension()), x(box.dimension()), f(draws);
      for (std::size_t n = 0; n < draws; ++n) {
        rng.point_at(n, u);
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = draw(box.intervals[i], u[i]);
        f[n] = k.evaluate(norm_of(x));
      }
      mc = empirical_tail(f, mean_of(f), t);
    }
  } else if (kind == "pairwise") {
    const KernelSpec k = kernel_of(spec);
    const auto a = boxes_of(spec.at("boxes_a"));
    const auto b = boxes_of(spec.at("boxes_b"));
    constants.emplace_back("variance", pairwise_sum_variance(k, a, b));
    for (double x : t) bound.push_back(pairwise_sum_tail(k, a, b, x));
    if (draws > 0) {
      const std::size_t d = a.front().dimension();
      const std::size_t dim = (a.size() + b.size()) * d;
      PseudoRandomSequence rng(dim, seed);
      std::vector<double> u(dim), f(draws), diff(d);
      for (std::size_t n = 0; n < draws; ++n) {
        rng.point_at(n, u);
        double sum = 0.0;
        for (std::size_t p = 0; p < a.size(); ++p) {
          for (std::size_t q = 0; q < b.size(); ++q) {
            for (std::size_t i = 0; i < d; ++i) {
              diff[i] = draw(b[q].intervals[i], u[(a.size() + q) * d + i]) - draw(a[p].intervals[i], u[p * d + i]);
            }
            sum += k.evaluate(norm_of(diff));
          }
        }
        f[n] = sum;
      }
      mc = empirical_tail(f, mean_of(f), t);
    }
  } else if (kind == "azuma") {
    const AzumaSpec az{spec.at("c").get<std::vector<double>>()};
    double sum = 0.0;
    for (double c : az.c) sum += c * c;
    constants.emplace_back("sum_c2", sum);
    for (double x : t) bound.push_back(azuma_tail(az, x));
    if (draws > 0) {
      PseudoRandomSequence rng(az.c.size(), seed);
      std::vector<double> u(az.c.size()), f(draws);
      for (std::size_t n = 0; n < draws; ++n) {
        rng.point_at(n, u);
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) s += u[i] < 0.5 ? -az.c[i] : az.c[i];
        f[n] = s;
      }
      mc = empirical_tail(f, 0.0, t);
    }
  } else if (kind == "dependent") {
    const KernelSpec k = kernel_of(spec);
    const json& j = spec.at("joint");
    DiscreteJoint joint;
    if (j.contains("gaussian")) {
      const json& g = j["gaussian"];
      const auto mean = g.at("mean").get<std::vector<double>>();
      const auto sigma = g.at("sigma").get<std::vector<double>>();
      if (mean.size() != 2 || sigma.size() != 2) throw UsageError("gaussian joint needs 2-element mean and sigma");
      joint = discretize_gaussian(mean[0], mean[1], sigma[0], sigma[1], g.value("rho", 0.0), g.value("n", 64),
                                  g.value("span", 3.0));
    } else {
      joint.x = j.at("x").get<std::vector<double>>();
      joint.y = j.at("y").get<std::vector<double>>();
      joint.weights = j.at("weights").get<std::vector<double>>();
    }
    joint.normalize();
    auto f = [&](double x, double y) { return k.evaluate(std::hypot(x, y)); };
    const ConditionalBound c = estimate_conditional_c(f, joint);
    constants.emplace_back("conditional", c.conditional);
    constants.emplace_back("martingale", c.martingale);
    constants.emplace_back("c", c.c);
    for (double x : t) bound.push_back(dependent_tail(c, x));
    if (draws > 0) {
      std::vector<double> cdf(joint.weights.size());
      double acc = 0.0, centre = 0.0;
      for (std::size_t i = 0; i < cdf.size(); ++i) {
        acc += joint.weights[i];
        cdf[i] = acc;
        if (joint.weights[i] > 0.0) centre += joint.weights[i] * f(joint.x[i / joint.y.size()], joint.y[i % joint.y.size()]);
      }
      PseudoRandomSequence rng(1, seed);
      std::vector<double> u(1), vals(draws);
      for (std::size_t n = 0; n < draws; ++n) {
        rng.point_at(n, u);
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u[0] * acc);
        const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), cdf.size() - 1);
        vals[n] = f(joint.x[i / joint.y.size()], joint.y[i % joint.y.size()]);
      }
      mc = empirical_tail(vals, centre, t);
    }
  } else {
    throw UsageError("bound kind must be kernel, pairwise, azuma or dependent (got '" + kind + "')");
  }

  std::string csv = mc.empty() ? "t,bound\n" : "t,bound,mc_estimate\n";
  for (std::size_t i = 0; i < t.size(); ++i) {
    csv += num(t[i]) + "," + num(bound[i]);
    if (!mc.empty()) csv += "," + num(mc[i]);
    csv += "\n";
  }
  ctx.write("bound.csv", csv);
  std::string cs = "name,value\n";
  for (const auto& [name, v] : constants) cs += name + "," + num(v) + "\n";
  ctx.write("bound_constants.csv", cs);
  ctx.result("kind", kind);
}

void cmd_bindsite(RunContext& ctx) {
  const Structure receptor = parse_pdb(ctx.input("receptor"));
  if (receptor.empty()) throw ParseError("receptor contains no atoms");
  const auto ligands = parse_pdb_models(ctx.input("ligand"));
  const auto poses = poses_from_json(parse_json_text(ctx.input("poses"), "poses"));
  const ContactModel m{ctx.number("cutoff")};
  m.validate();

  const Positions rec = receptor.positions();
  std::vector<Positions> lig;
  for (const auto& l : ligands) {
    if (l.empty()) throw ParseError("ligand model " + std::to_string(lig.size() + 1) + " contains no atoms");
    lig.push_back(l.positions());
  }
  const bool multi =
      lig.size() > 1 || std::any_of(poses.begin(), poses.end(), [](const Pose& p) { return p.source_conformer.value_or(0) > 0; });
  const BindingSiteMap map = multi ? binding_site_prob_multi(rec, lig, group_poses(poses, lig.size()), m)
                                   : binding_site_prob(rec, lig.front(), poses, m);

  std::string atoms = "serial,atom_name,chain,residue_name,residue_seq,insertion_code,p_bs\n";
  std::vector<int> serials;
  for (std::size_t i = 0; i < receptor.size(); ++i) {
    const Atom& a = receptor.atoms[i];
    atoms += std::to_string(a.serial) + "," + a.name + "," + csv_char(a.chain_id) + "," + a.residue_name + "," +
             std::to_string(a.residue_seq) + "," + csv_char(a.insertion_code) + "," + num(map.probability[i]) + "\n";
    serials.push_back(a.serial);
  }
  ctx.write("bindsite_atoms.csv", atoms);

  std::string residues = "chain,residue_name,residue_seq,insertion_code,p_bs\n";
  for (const auto& r : residue_probabilities(receptor, map)) {
    residues += csv_char(r.chain_id) + "," + r.residue_name + "," + std::to_string(r.residue_seq) + "," +
                csv_char(r.insertion_code) + "," + num(r.probability) + "\n";
  }
  ctx.write("bindsite_residues.csv", residues);

  std::string scores = "pose,rank,conformer,binding_score\n";
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const std::size_t c = poses[i].source_conformer.value_or(0);
    if (c >= lig.size()) throw DomainError("pose " + std::to_string(i) + " refers to missing conformer " + std::to_string(c));
    scores += std::to_string(i) + "," + std::to_string(poses[i].rank) + "," + std::to_string(c) + "," +
              num(binding_score(lig[c], poses[i], map, rec, m)) + "\n";
  }
  ctx.write("pose_scores.csv", scores);

  const auto colors = colormap_export(serials, map.probability, parse_palette(ctx.text("palette")), ctx.text("object"));
  ctx.write("colormap.csv", colors.csv);
  ctx.write("colormap.pml", colors.script);

  std::string summary = "cutoff,poses,configurations,inhibit_score\n";
  summary += num(map.cutoff) + "," + std::to_string(map.poses) + "," + std::to_string(map.configurations) + ",";
  if (const auto known_text = ctx.optional_input("known_site")) {
    const CsvTable known = parse_csv(*known_text);
    const std::size_t col = known.column("p_bs");
    std::vector<double> p;
    for (std::size_t r = 0; r < known.rows.size(); ++r) p.push_back(known.number(r, col));
    const double score = inhibit_score(p, map);
    summary += num(score);
    ctx.result("inhibit_score", score);
  }
  summary += "\n";
  ctx.write("bindsite_summary.csv", summary);
  ctx.result("cutoff", map.cutoff);
  ctx.result("poses", map.poses);
  ctx.result("configurations", map.configurations);
}

void cmd_volmap(RunContext& ctx) {
  const bool have_grids = !ctx.texts("grids").empty();
  if (!ctx.has("ensemble") && !have_grids) throw UsageError("volmap needs an 'ensemble' and/or 'grids'");
  if (ctx.has("ensemble")) {
    const auto mode = pick<RadiusMode>("radius_mode", ctx.text("radius_mode"),
                                       {{"vdw", RadiusMode::kVdw}, {"fixed", RadiusMode::kFixed}});
    const Structure s = load_structure(ctx, "structure", mode == RadiusMode::kVdw);
    const auto models = load_models(ctx, "ensemble", s.size());
    const auto grid = occupancy_map(models, s.radii(), ctx.number("grid_spacing"), mode, ctx.number("fixed_radius"));
    ctx.write("occupancy.dx", write_grid(grid));
    ctx.result("conformers", models.size());
  }
  if (have_grids) {
    std::vector<ScalarGrid> grids;
    for (std::size_t i = 0; i < ctx.texts("grids").size(); ++i) grids.push_back(read_grid(ctx.input_from_list("grids", i)));
    const auto stats = grid_statistics(grids);
    ctx.write("grid_mean.dx", write_grid(stats.mean));
    ctx.write("grid_std.dx", write_grid(stats.std));
    ctx.result("grids", grids.size());
  }
}

void cmd_modes(RunContext& ctx) {
  const Structure s = load_structure(ctx, "structure", false);
  const auto models = load_models(ctx, "ensemble", s.size());
  Ensemble e;
  e.source = s;
  for (std::size_t m = 0; m < models.size(); ++m) e.conformers.push_back(Conformer{models[m], m, true, {}});

  std::string csv = "serial,atom_name,chain,residue_seq,variance_1,variance_2,variance_3";
  for (int k = 1; k <= 3; ++k) {
    for (const char* axis : {"x", "y", "z"}) csv += ",mode_" + std::to_string(k) + "_" + axis;
  }
  csv += "\n";
  const auto modes = atom_motion_modes(e);
  for (std::size_t i = 0; i < s.size(); ++i) {
    const Atom& a = s.atoms[i];
    csv += std::to_string(a.serial) + "," + a.name + "," + csv_char(a.chain_id) + "," + std::to_string(a.residue_seq);
    for (int k = 0; k < 3; ++k) csv += "," + num(modes[i].variances[k]);
    for (int k = 0; k < 3; ++k) {
      for (int r = 0; r < 3; ++r) csv += "," + num(modes[i].directions(r, k));
    }
    csv += "\n";
  }
  ctx.write("modes.csv", csv);

  const auto rmode =
      pick<RmsdMode>("rmsd", ctx.text("rmsd"), {{"fixed", RmsdMode::kFixedFrame}, {"superposed", RmsdMode::kSuperposed}});
  const auto mat = rmsd_matrix(e, rmode);
  const std::size_t n = models.size();
  std::string rm = "model";
  for (std::size_t j = 0; j < n; ++j) rm += "," + std::to_string(j + 1);
  rm += "\n";
  for (std::size_t i = 0; i < n; ++i) {
    rm += std::to_string(i + 1);
    for (std::size_t j = 0; j < n; ++j) rm += "," + num(mat[i * n + j]);
    rm += "\n";
  }
  ctx.write("rmsd_matrix.csv", rm);

  const TorsionGraph g = TorsionGraph::detect(s, ctx.count("root"));
  if (g.size() > 0) {
    const auto spread = torsion_variability(e, g);
    std::string tv = "dihedral,atom_1,atom_2,atom_3,atom_4,mean_resultant,circular_std\n";
    for (std::size_t k = 0; k < g.size(); ++k) {
      tv += std::to_string(k);
      for (std::size_t a : g.dihedrals()[k].atoms) tv += "," + std::to_string(s.atoms[a].serial);
      tv += "," + num(spread[k].mean_resultant) + "," + num(spread[k].circular_std) + "\n";
    }
    ctx.write("torsions.csv", tv);
  }
  ctx.result("conformers", n);
  ctx.result("dihedrals", g.size());
}

void run_command(RunContext& ctx) {
  static const std::map<std::string, std::function<void(RunContext&)>> table{
      {"sample", cmd_sample},     {"qoi", cmd_qoi},           {"certify", cmd_certify}, {"saturate", cmd_saturate},
      {"bound", cmd_bound},       {"bindsite", cmd_bindsite}, {"volmap", cmd_volmap},   {"modes", cmd_modes}};
  const auto it = table.find(ctx.command());
  if (it == table.end()) throw UsageError("unknown command '" + ctx.command() + "'");
  it->second(ctx);
  ctx.finish();
}

}  // namespace molcert::cli
