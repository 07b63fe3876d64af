#include "fixtures.hpp"

#include "molcert/params.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace molcert::fixture {

Atom carbon(int serial, const Vec3& pos, double b_iso, char chain) {
  Atom a;
  a.serial = serial;
  a.name = "C";
  a.element = "C";
  a.residue_name = "LIG";
  a.residue_seq = 1;
  a.chain_id = chain;
  a.position = pos;
  a.b_iso = b_iso;
  return a;
}

Structure zigzag_chain(std::size_t atoms, std::span<const double> dihedrals, double bond, double angle_deg) {
  if (atoms < 3 || dihedrals.size() + 3 != atoms) throw std::invalid_argument("zigzag_chain: need atoms - 3 dihedrals");
  const double theta = angle_deg * kPi / 180.0;
  Positions p;
  p.push_back(Vec3::Zero());
  p.push_back(Vec3(bond, 0, 0));
  p.push_back(p[1] + bond * Vec3(-std::cos(theta), std::sin(theta), 0));
  // Natural extension reference frame placement.
  for (std::size_t k = 0; k < dihedrals.size(); ++k) {
    const Vec3& a = p[k];
    const Vec3& b = p[k + 1];
    const Vec3& c = p[k + 2];
    const Vec3 bc = (c - b).normalized();
    const Vec3 n = (b - a).cross(bc).normalized();
    const Vec3 m = n.cross(bc);
    const double phi = dihedrals[k];
    const Vec3 d2(-bond * std::cos(theta), bond * std::sin(theta) * std::cos(phi), bond * std::sin(theta) * std::sin(phi));
    p.push_back(c + d2.x() * bc + d2.y() * m + d2.z() * n);
  }
  Structure s;
  for (std::size_t i = 0; i < atoms; ++i) {
    Atom a = carbon(static_cast<int>(i + 1), p[i]);
    a.residue_seq = static_cast<int>(i + 1);
    s.atoms.push_back(a);
  }
  std::vector<Bond> bonds;
  for (std::size_t i = 0; i + 1 < atoms; ++i) bonds.push_back({i, i + 1});
  set_bonds(s, bonds);
  return assign_params(s, ParamTable::builtin());
}

Structure random_structure(std::size_t n, std::uint64_t seed, double box, double min_dist, char chain,
                           int first_serial) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(0.0, box);
  std::uniform_real_distribution<double> q(-0.8, 0.8);
  const char* elements[] = {"C", "N", "O"};
  Structure s;
  while (s.size() < n) {
    const Vec3 x(pos(rng), pos(rng), pos(rng));
    bool ok = true;
    for (const auto& a : s.atoms) ok = ok && (a.position - x).norm() >= min_dist;
    if (!ok) continue;
    Atom a = carbon(first_serial + static_cast<int>(s.size()), x, 15.0, chain);
    a.element = elements[s.size() % 3];
    a.name = a.element + std::to_string(s.size());
    a.residue_name = "UNK";
    s.atoms.push_back(a);
  }
  s = assign_params(s, ParamTable::builtin());
  for (auto& a : s.atoms) a.charge = q(rng);
  return s;
}

Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Eigen::Quaterniond quat(g(rng), g(rng), g(rng), g(rng));
  quat.normalize();
  return quat.toRotationMatrix();
}

Positions transform(std::span<const Vec3> p, const Mat3& r, const Vec3& t) {
  Positions out;
  out.reserve(p.size());
  for (const auto& x : p) out.push_back(r * x + t);
  return out;
}

std::string read_data(const std::string& name) {
  std::ifstream in(std::string(MOLCERT_TEST_DATA_DIR) + "/" + name, std::ios::binary);
  if (!in) throw std::runtime_error("missing test data file " + name);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace molcert::fixture
