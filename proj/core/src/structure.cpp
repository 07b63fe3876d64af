#include "molcert/structure.hpp"

#include "molcert/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <cctype>
#include <sstream>
#include <tuple>
#include <unordered_set>

namespace molcert {

std::vector<Chain> Structure::chains() const {
  std::vector<Chain> out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    auto it = std::find_if(out.begin(), out.end(), [&](const Chain& c) { return c.id == atoms[i].chain_id; });
    if (it == out.end()) {
      out.push_back({atoms[i].chain_id, {}});
      it = out.end() - 1;
    }
    it->atoms.push_back(i);
  }
  return out;
}

Positions Structure::positions() const {
  Positions p;
  p.reserve(atoms.size());
  for (const auto& a : atoms) p.push_back(a.position);
  return p;
}

std::vector<double> Structure::radii() const {
  std::vector<double> r;
  r.reserve(atoms.size());
  for (const auto& a : atoms) r.push_back(a.vdw_radius);
  return r;
}

std::vector<double> Structure::charges() const {
  std::vector<double> q;
  q.reserve(atoms.size());
  for (const auto& a : atoms) q.push_back(a.charge);
  return q;
}

bool Structure::has_params() const {
  return std::all_of(atoms.begin(), atoms.end(), [](const Atom& a) { return a.vdw_radius > 0.0; });
}

void Structure::validate() const {
  std::unordered_set<int> serials;
  for (const auto& a : atoms) {
    if (!serials.insert(a.serial).second) {
      throw DomainError("duplicate atom serial " + std::to_string(a.serial));
    }
    if (!a.position.allFinite()) throw DomainError("non-finite position for atom " + std::to_string(a.serial));
    if (a.b_iso < 0.0) throw DomainError("negative B-factor for atom " + std::to_string(a.serial));
    if (a.b_aniso && (a.b_aniso->array() < 0.0).any()) {
      throw DomainError("negative anisotropic B-factor for atom " + std::to_string(a.serial));
    }
    if (a.vdw_radius < 0.0) throw DomainError("negative radius for atom " + std::to_string(a.serial));
  }
  for (const auto& b : bonds) {
    if (b.i >= b.j || b.j >= atoms.size()) {
      throw DomainError("invalid bond " + std::to_string(b.i) + "-" + std::to_string(b.j));
    }
  }
}

double covalent_radius(const std::string& element) {
  static const std::map<std::string, double> table = {
      {"H", 0.31}, {"C", 0.76}, {"N", 0.71}, {"O", 0.66}, {"S", 1.05}, {"P", 1.07}, {"F", 0.57},
      {"CL", 1.02}, {"BR", 1.20}, {"I", 1.39}, {"SE", 1.20}, {"FE", 1.32}, {"ZN", 1.22}, {"MG", 1.41},
      {"CA", 1.76}, {"NA", 1.66}, {"K", 2.03}, {"MN", 1.39}, {"CU", 1.32}, {"B", 0.84},
  };
  std::string key = element;
  std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::toupper(c); });
  const auto it = table.find(key);
  return it == table.end() ? 0.77 : it->second;
}

std::vector<Bond> infer_bonds(const Structure& s, double tolerance) {
  const Positions pos = s.positions();
  std::vector<double> rc(s.size());
  double max_rc = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    rc[i] = covalent_radius(s.atoms[i].element);
    max_rc = std::max(max_rc, rc[i]);
  }
  std::vector<Bond> bonds;
  if (s.empty()) return bonds;
  const CellList cells(pos, 2.0 * max_rc + tolerance);
  for (std::size_t i = 0; i < s.size(); ++i) {
    cells.for_each_candidate(pos[i], [&](std::size_t j) {
      if (j <= i) return;
      if (s.atoms[i].element == "H" && s.atoms[j].element == "H") return;
      const double d = (pos[i] - pos[j]).norm();
      if (d > 0.4 && d < rc[i] + rc[j] + tolerance) bonds.push_back({i, j});
    });
  }
  std::sort(bonds.begin(), bonds.end(), [](const Bond& a, const Bond& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  return bonds;
}

void set_bonds(Structure& s, std::vector<Bond> bonds) {
  for (auto& b : bonds) {
    if (b.i == b.j || b.i >= s.size() || b.j >= s.size()) {
      throw DomainError("bond references invalid atom index " + std::to_string(b.i) + "-" + std::to_string(b.j));
    }
    if (b.i > b.j) std::swap(b.i, b.j);
  }
  bonds.insert(bonds.end(), s.bonds.begin(), s.bonds.end());
  std::sort(bonds.begin(), bonds.end(), [](const Bond& a, const Bond& b) { return std::tie(a.i, a.j) < std::tie(b.i, b.j); });
  bonds.erase(std::unique(bonds.begin(), bonds.end()), bonds.end());
  s.bonds = std::move(bonds);
}

Exclusions::Exclusions(const Structure& s) : Exclusions(s.size(), s.bonds) {}

Exclusions::Exclusions(std::size_t n, const std::vector<Bond>& bonds) : partners_(n) {
  std::vector<std::vector<std::size_t>> nbr(n);
  for (const auto& b : bonds) {
    nbr[b.i].push_back(b.j);
    nbr[b.j].push_back(b.i);
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto& p = partners_[i];
    for (std::size_t j : nbr[i]) {
      p.push_back(j);
      for (std::size_t k : nbr[j]) {
        if (k != i) p.push_back(k);
      }
    }
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
  }
}

bool Exclusions::excluded(std::size_t i, std::size_t j) const {
  if (i >= partners_.size()) return false;
  const auto& p = partners_[i];
  return std::binary_search(p.begin(), p.end(), j);
}

Structure merge(const Structure& a, const Structure& b) {
  std::unordered_set<int> serials;
  for (const auto& x : a.atoms) serials.insert(x.serial);
  std::vector<int> clash;
  for (const auto& x : b.atoms) {
    if (serials.count(x.serial)) clash.push_back(x.serial);
  }
  if (!clash.empty()) {
    std::ostringstream os;
    os << "partners share atom serials:";
    for (std::size_t k = 0; k < std::min<std::size_t>(clash.size(), 10); ++k) os << ' ' << clash[k];
    if (clash.size() > 10) os << " ...";
    throw DomainError(os.str());
  }
  Structure out = a;
  out.atoms.insert(out.atoms.end(), b.atoms.begin(), b.atoms.end());
  for (const auto& bond : b.bonds) out.bonds.push_back({bond.i + a.size(), bond.j + a.size()});
  return out;
}

Structure select(const Structure& s, const std::vector<std::size_t>& indices) {
  Structure out;
  std::vector<long> remap(s.size(), -1);
  for (std::size_t k = 0; k < indices.size(); ++k) {
    out.atoms.push_back(s.atoms.at(indices[k]));
    remap[indices[k]] = static_cast<long>(k);
  }
  for (const auto& b : s.bonds) {
    if (remap[b.i] >= 0 && remap[b.j] >= 0) {
      auto i = static_cast<std::size_t>(remap[b.i]);
      auto j = static_cast<std::size_t>(remap[b.j]);
      out.bonds.push_back({std::min(i, j), std::max(i, j)});
    }
  }
  return out;
}

}  // namespace molcert
