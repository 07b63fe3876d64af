#include "molcert/params.hpp"

#include "molcert/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace molcert {
namespace {

struct ElementDefaults {
  const char* element;
  double radius;
  double epsilon;
  double r_min;
};

// Bondi radii; 12-6 well depths and minima in the style of Amber atom types.
constexpr ElementDefaults kElements[] = {
    {"C", 1.70, 0.0860, 3.816},  {"N", 1.55, 0.1700, 3.648},  {"O", 1.52, 0.2100, 3.3224},
    {"S", 1.80, 0.2500, 4.000},  {"H", 1.20, 0.0157, 1.200},  {"P", 1.80, 0.2000, 4.200},
    {"F", 1.47, 0.0610, 3.500},  {"CL", 1.75, 0.2650, 3.896}, {"BR", 1.85, 0.3200, 4.440},
    {"I", 1.98, 0.4000, 4.700},  {"SE", 1.90, 0.2500, 4.000}, {"FE", 1.40, 0.0500, 2.400},
    {"ZN", 1.39, 0.0125, 2.200}, {"MG", 1.73, 0.8947, 1.585}, {"NA", 2.27, 0.0028, 3.736},
    {"CA", 2.00, 0.4598, 3.426}, {"K", 2.75, 0.0003, 5.316},
};

struct ChargeOverride {
  const char* residue;
  const char* atom;
  double charge;
};

// Backbone charges with hydrogens folded into their heavy atoms; formal
// charges spread over the titratable side-chain groups.
constexpr ChargeOverride kCharges[] = {
    {"*", "N", -0.1438},   {"*", "CA", 0.1160},    {"*", "C", 0.5973},     {"*", "O", -0.5679},
    {"*", "OXT", -0.5000}, {"LYS", "NZ", 1.0000},  {"ARG", "NH1", 0.5000}, {"ARG", "NH2", 0.5000},
    {"ASP", "OD1", -0.5000}, {"ASP", "OD2", -0.5000}, {"GLU", "OE1", -0.5000}, {"GLU", "OE2", -0.5000},
    {"CA", "CA", 2.0000},  {"ZN", "ZN", 2.0000},   {"MG", "MG", 2.0000},   {"NA", "NA", 1.0000},
    {"K", "K", 1.0000},    {"CL", "CL", -1.0000},
};

ParamRow row_from_json(const nlohmann::json& j, const ParamRow& base) {
  ParamRow r = base;
  if (j.contains("radius")) r.radius = j.at("radius").get<double>();
  if (j.contains("charge")) r.charge = j.at("charge").get<double>();
  if (j.contains("lj_a")) r.lj_a = j.at("lj_a").get<double>();
  if (j.contains("lj_b")) r.lj_b = j.at("lj_b").get<double>();
  return r;
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

}  // namespace

std::pair<double, double> lj_coefficients(double epsilon, double r_min) {
  const double r6 = std::pow(r_min, 6);
  return {epsilon * r6 * r6, 2.0 * epsilon * r6};
}

ParamTable ParamTable::builtin() {
  ParamTable t;
  for (const auto& e : kElements) {
    const auto [a, b] = lj_coefficients(e.epsilon, e.r_min);
    t.set_element(e.element, ParamRow{e.radius, 0.0, a, b});
  }
  for (const auto& c : kCharges) t.set_override(c.residue, c.atom, nlohmann::json{{"charge", c.charge}});
  return t;
}

ParamTable ParamTable::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ParseError("parameter table must be a JSON object");
  ParamTable t;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "overrides") continue;
      t.set_element(upper(key), row_from_json(value, ParamRow{}));
    }
    if (j.contains("overrides")) {
      for (const auto& o : j.at("overrides")) {
        nlohmann::json fields = o;
        const std::string residue = fields.at("residue").get<std::string>();
        const std::string atom = fields.at("atom").get<std::string>();
        fields.erase("residue");
        fields.erase("atom");
        t.set_override(residue, atom, fields);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("parameter table: ") + e.what());
  }
  return t;
}

nlohmann::json ParamTable::to_json() const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [element, r] : elements_) {
    j[element] = {{"radius", r.radius}, {"charge", r.charge}, {"lj_a", r.lj_a}, {"lj_b", r.lj_b}};
  }
  nlohmann::json overrides = nlohmann::json::array();
  for (const auto& [key, fields] : overrides_) {
    nlohmann::json o = fields;
    o["residue"] = key.first;
    o["atom"] = key.second;
    overrides.push_back(o);
  }
  j["overrides"] = overrides;
  return j;
}

void ParamTable::set_element(const std::string& element, const ParamRow& row) { elements_[upper(element)] = row; }

void ParamTable::set_override(const std::string& residue, const std::string& atom, const nlohmann::json& fields) {
  overrides_[{residue, atom}] = fields;
}

std::optional<ParamRow> ParamTable::lookup(const std::string& residue, const std::string& atom,
                                           const std::string& element) const {
  const auto e = elements_.find(upper(element));
  const ParamRow* base = e == elements_.end() ? nullptr : &e->second;
  auto o = overrides_.find({residue, atom});
  if (o == overrides_.end()) o = overrides_.find({"*", atom});
  if (o != overrides_.end()) {
    // An override that sets every field does not need an element row.
    const bool complete = o->second.contains("radius") && o->second.contains("charge") &&
                          o->second.contains("lj_a") && o->second.contains("lj_b");
    if (base || complete) return row_from_json(o->second, base ? *base : ParamRow{});
  }
  if (base) return *base;
  return std::nullopt;
}

void ParamTable::validate() const {
  for (const char* e : {"C", "N", "O", "S", "H", "P"}) {
    if (!elements_.count(e)) throw DomainError(std::string("parameter table lacks a fallback row for element ") + e);
  }
  for (const auto& [element, r] : elements_) {
    if (!(r.radius > 0.0)) throw DomainError("non-positive radius for element " + element);
  }
  for (const auto& [key, fields] : overrides_) {
    if (fields.contains("radius") && !(fields.at("radius").get<double>() > 0.0)) {
      throw DomainError("non-positive radius for " + key.first + " " + key.second);
    }
  }
}

Structure assign_params(Structure s, const ParamTable& table) {
  table.validate();
  std::vector<int> missing;
  for (auto& a : s.atoms) {
    const auto row = table.lookup(a.residue_name, a.name, a.element);
    if (!row) {
      missing.push_back(a.serial);
      continue;
    }
    a.charge = row->charge;
    a.vdw_radius = row->radius;
    a.lj_a = row->lj_a;
    a.lj_b = row->lj_b;
  }
  if (!missing.empty()) {
    std::ostringstream os;
    os << "no parameters for atom serial(s):";
    for (std::size_t k = 0; k < std::min<std::size_t>(missing.size(), 20); ++k) os << ' ' << missing[k];
    if (missing.size() > 20) os << " ... (" << missing.size() << " total)";
    throw DomainError(os.str());
  }
  return s;
}

}  // namespace molcert
