#include "molcert/qoi.hpp"

#include "molcert/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

namespace molcert {
namespace {

constexpr std::array<std::pair<QoiKind, std::string_view>, 10> kNames{{
    {QoiKind::kArea, "area"},
    {QoiKind::kVolume, "volume"},
    {QoiKind::kLJ, "lj"},
    {QoiKind::kCoulomb, "coulomb"},
    {QoiKind::kGB, "gb"},
    {QoiKind::kDeltaArea, "delta_area"},
    {QoiKind::kDeltaVolume, "delta_volume"},
    {QoiKind::kDeltaLJ, "delta_lj"},
    {QoiKind::kDeltaCoulomb, "delta_coulomb"},
    {QoiKind::kDeltaGB, "delta_gb"},
}};

[[noreturn]] void coincident(std::size_t i, std::size_t j) {
  throw DomainError("atoms " + std::to_string(i) + " and " + std::to_string(j) + " are coincident (r = 0)");
}

void check_index(std::size_t i, std::size_t n) {
  if (i >= n) throw DomainError("pair domain index " + std::to_string(i) + " out of range");
}

// Visits the pairs of `domain` in a fixed order.
template <typename Fn>
void for_each_pair(std::size_t n, const PairDomain& domain, Fn&& fn) {
  if (domain.is_cross) {
    for (std::size_t i : domain.group_a) check_index(i, n);
    for (std::size_t j : domain.group_b) check_index(j, n);
    for (std::size_t i : domain.group_a) {
      for (std::size_t j : domain.group_b) fn(i, j);
    }
    return;
  }
  if (domain.exclusions && domain.exclusions->size() != n && domain.exclusions->size() != 0) {
    throw DomainError("exclusion list does not match the atom count");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (domain.exclusions && domain.exclusions->excluded(i, j)) continue;
      fn(i, j);
    }
  }
}

struct LJAtom {
  double eps = 0.0;
  double r_min = 0.0;
  bool active = false;
};

LJAtom lj_atom(double a, double b) {
  if (!(a > 0.0 && b > 0.0)) return {};
  return {b * b / (4.0 * a), std::pow(2.0 * a / b, 1.0 / 6.0), true};
}

Exclusions exclusions_of(const Structure& s) {
  return s.bonds.empty() ? Exclusions(s.size(), infer_bonds(s)) : Exclusions(s);
}

void check_positions(const Structure& s, std::span<const Vec3> positions) {
  if (positions.size() != s.size()) {
    throw DomainError("expected " + std::to_string(s.size()) + " positions, got " + std::to_string(positions.size()));
  }
}

// Uniform grid over a point cloud for nearest-point queries.
class NearestGrid {
 public:
  NearestGrid(std::span<const Vec3> points, double cell) : points_(points), cell_(cell) {
    for (const auto& p : points) bounds_.extend(p);
    for (int a = 0; a < 3; ++a) {
      dims_[a] = std::max<long>(1, static_cast<long>(std::floor((bounds_.max[a] - bounds_.min[a]) / cell_)) + 1);
    }
    const auto cells = static_cast<std::size_t>(dims_[0] * dims_[1] * dims_[2]);
    start_.assign(cells + 1, 0);
    std::vector<std::size_t> cell_of_point(points.size());
    for (std::size_t k = 0; k < points.size(); ++k) {
      cell_of_point[k] = flat(clamped(points[k]));
      ++start_[cell_of_point[k] + 1];
    }
    for (std::size_t c = 0; c < cells; ++c) start_[c + 1] += start_[c];
    order_.resize(points.size());
    auto fill = start_;
    for (std::size_t k = 0; k < points.size(); ++k) order_[fill[cell_of_point[k]]++] = k;
  }

  double nearest(const Vec3& q) const {
    const auto c = clamped(q);
    double best = std::numeric_limits<double>::infinity();
    // Points in shell s sit at least (s - 1) cells away.
    const long max_shell = std::max({dims_[0], dims_[1], dims_[2]});
    for (long shell = 0; shell <= max_shell; ++shell) {
      if (std::isfinite(best) && (static_cast<double>(shell) - 1.0) * cell_ > best) break;
      for (long dx = -shell; dx <= shell; ++dx) {
        for (long dy = -shell; dy <= shell; ++dy) {
          for (long dz = -shell; dz <= shell; ++dz) {
            if (std::max({std::labs(dx), std::labs(dy), std::labs(dz)}) != shell) continue;
            const long x = c[0] + dx, y = c[1] + dy, z = c[2] + dz;
            if (x < 0 || y < 0 || z < 0 || x >= dims_[0] || y >= dims_[1] || z >= dims_[2]) continue;
            const std::size_t cell = flat({x, y, z});
            for (std::size_t k = start_[cell]; k < start_[cell + 1]; ++k) {
              best = std::min(best, (points_[order_[k]] - q).norm());
            }
          }
        }
      }
    }
    return best;
  }

 private:
  std::array<long, 3> clamped(const Vec3& p) const {
    std::array<long, 3> c{};
    for (int a = 0; a < 3; ++a) {
      const long v = static_cast<long>(std::floor((p[a] - bounds_.min[a]) / cell_));
      c[a] = std::clamp(v, 0L, dims_[a] - 1);
    }
    return c;
  }
  std::size_t flat(const std::array<long, 3>& c) const {
    return static_cast<std::size_t>(c[0] + dims_[0] * (c[1] + dims_[1] * c[2]));
  }

  std::span<const Vec3> points_;
  double cell_;
  Bounds bounds_;
  std::array<long, 3> dims_{1, 1, 1};
  std::vector<std::size_t> start_;
  std::vector<std::size_t> order_;
};

}  // namespace

std::string_view to_string(QoiKind k) {
  for (const auto& [kind, name] : kNames) {
    if (kind == k) return name;
  }
  return "unknown";
}

QoiKind parse_qoi_kind(std::string_view name) {
  for (const auto& [kind, n] : kNames) {
    if (n == name) return kind;
  }
  throw DomainError("unknown quantity of interest '" + std::string(name) + "'");
}

bool is_delta(QoiKind k) { return static_cast<int>(k) >= static_cast<int>(QoiKind::kDeltaArea); }

QoiKind base_kind(QoiKind k) {
  if (!is_delta(k)) return k;
  return static_cast<QoiKind>(static_cast<int>(k) - static_cast<int>(QoiKind::kDeltaArea));
}

LJPair combine_lj(double a_i, double b_i, double a_j, double b_j) {
  const auto p = lj_atom(a_i, b_i);
  const auto q = lj_atom(a_j, b_j);
  if (!p.active || !q.active) return {};
  const double eps = std::sqrt(p.eps * q.eps);
  const double r6 = std::pow(0.5 * (p.r_min + q.r_min), 6);
  return {eps * r6 * r6, 2.0 * eps * r6};
}

double lj_energy(std::span<const Vec3> positions, std::span<const double> lj_a, std::span<const double> lj_b,
                 const PairDomain& domain) {
  const std::size_t n = positions.size();
  if (lj_a.size() != n || lj_b.size() != n) throw DomainError("LJ parameters do not match the atom count");
  std::vector<LJAtom> atoms(n);
  for (std::size_t i = 0; i < n; ++i) atoms[i] = lj_atom(lj_a[i], lj_b[i]);
  CompensatedSum sum;
  for_each_pair(n, domain, [&](std::size_t i, std::size_t j) {
    const double r2 = (positions[i] - positions[j]).squaredNorm();
    if (r2 == 0.0) coincident(i, j);
    if (!atoms[i].active || !atoms[j].active) return;
    const double eps = std::sqrt(atoms[i].eps * atoms[j].eps);
    const double rm = 0.5 * (atoms[i].r_min + atoms[j].r_min);
    const double s6 = std::pow(rm * rm / r2, 3);
    // a/r^12 - b/r^6 with a = eps rm^12, b = 2 eps rm^6.
    sum += eps * s6 * s6 - 2.0 * eps * s6;
  });
  return sum.value();
}

double coulomb_energy(std::span<const Vec3> positions, std::span<const double> charges, const CoulombModel& model,
                      const PairDomain& domain) {
  const std::size_t n = positions.size();
  if (charges.size() != n) throw DomainError("charges do not match the atom count");
  if (!(model.value > 0.0)) throw DomainError("dielectric parameter must be positive");
  CompensatedSum sum;
  for_each_pair(n, domain, [&](std::size_t i, std::size_t j) {
    const double r = (positions[i] - positions[j]).norm();
    if (r == 0.0) coincident(i, j);
    sum += kCoulombConstant * charges[i] * charges[j] / (model.dielectric(r) * r);
  });
  return sum.value();
}

std::vector<double> born_radii(std::span<const Vec3> positions, std::span<const double> vdw_radii,
                               const BornRadiiOptions& opt) {
  const std::size_t n = positions.size();
  if (vdw_radii.size() != n) throw DomainError("radii do not match the atom count");
  if (!(opt.max_radius > 0.0)) throw DomainError("maximum Born radius must be positive");
  for (double r : vdw_radii) {
    if (!(r > 0.0)) throw DomainError("Born radii need positive van der Waals radii");
    if (r > opt.max_radius) throw DomainError("van der Waals radius exceeds the maximum Born radius");
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    CompensatedSum screen;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double r2 = (positions[i] - positions[j]).squaredNorm();
      if (r2 == 0.0) coincident(std::min(i, j), std::max(i, j));
      const double vol = 4.0 / 3.0 * kPi * std::pow(vdw_radii[j], 3);
      screen += vol / (4.0 * kPi * r2 * r2);
    }
    const double inv = std::max(1.0 / vdw_radii[i] - screen.value(), 1.0 / opt.max_radius);
    out[i] = std::max(1.0 / inv, 0.5 * vdw_radii[i]);
  }
  return out;
}

double gb_polarization(std::span<const Vec3> positions, std::span<const double> charges,
                       std::span<const double> born_radii, double solvent_dielectric) {
  const std::size_t n = positions.size();
  if (charges.size() != n || born_radii.size() != n) throw DomainError("GB inputs do not match the atom count");
  if (!(solvent_dielectric > 0.0)) throw DomainError("solvent dielectric must be positive");
  for (double r : born_radii) {
    if (!(r > 0.0)) throw DomainError("Born radii must be positive");
  }
  const double tau = 1.0 - 1.0 / solvent_dielectric;
  CompensatedSum sum;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double r2 = (positions[i] - positions[j]).squaredNorm();
      const double rr = born_radii[i] * born_radii[j];
      sum += charges[i] * charges[j] / std::sqrt(r2 + rr * std::exp(-r2 / (4.0 * rr)));
    }
  }
  return -0.5 * tau * kCoulombConstant * sum.value();
}

std::vector<Vec3> sphere_points(std::size_t n) {
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  std::vector<Vec3> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double z = 1.0 - (2.0 * static_cast<double>(k) + 1.0) / static_cast<double>(n);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    const double phi = golden * static_cast<double>(k);
    out[k] = Vec3(r * std::cos(phi), r * std::sin(phi), z);
  }
  return out;
}

SasaResult sasa(std::span<const Vec3> positions, std::span<const double> radii, double probe, std::size_t n_points,
                bool keep_points) {
  if (!(probe >= 0.0)) throw DomainError("probe radius must be >= 0");
  if (n_points < 32) throw DomainError("SASA needs at least 32 sphere points");
  const std::size_t n = positions.size();
  if (radii.size() != n) throw DomainError("radii do not match the atom count");
  SasaResult out;
  out.per_atom.assign(n, 0.0);
  if (n == 0) return out;

  std::vector<double> big(n);
  double r_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(radii[i] > 0.0)) throw DomainError("SASA needs positive atomic radii");
    big[i] = radii[i] + probe;
    r_max = std::max(r_max, big[i]);
  }
  const auto unit = sphere_points(n_points);
  const CellList cells(positions, 2.0 * r_max);
  std::vector<std::size_t> neighbours;
  CompensatedSum total;
  for (std::size_t i = 0; i < n; ++i) {
    neighbours.clear();
    cells.for_each_candidate(positions[i], [&](std::size_t j) {
      if (j != i && (positions[i] - positions[j]).norm() < big[i] + big[j]) neighbours.push_back(j);
    });
    std::size_t exposed = 0;
    std::size_t last = 0;
    for (const auto& u : unit) {
      const Vec3 p = positions[i] + big[i] * u;
      bool buried = false;
      // Try the neighbour that buried the previous point first.
      if (last < neighbours.size()) {
        const std::size_t j = neighbours[last];
        buried = (p - positions[j]).squaredNorm() < big[j] * big[j];
      }
      for (std::size_t k = 0; !buried && k < neighbours.size(); ++k) {
        const std::size_t j = neighbours[k];
        if ((p - positions[j]).squaredNorm() < big[j] * big[j]) {
          buried = true;
          last = k;
        }
      }
      if (!buried) {
        ++exposed;
        if (keep_points) {
          out.surface_points.push_back(p);
          out.surface_atoms.push_back(i);
        }
      }
    }
    out.per_atom[i] = 4.0 * kPi * big[i] * big[i] * static_cast<double>(exposed) / static_cast<double>(n_points);
    total += out.per_atom[i];
  }
  out.total = total.value();
  return out;
}

double volume(std::span<const Vec3> positions, std::span<const double> radii, double spacing) {
  if (!(spacing > 0.0)) throw DomainError("volume grid spacing must be positive");
  const std::size_t n = positions.size();
  if (radii.size() != n) throw DomainError("radii do not match the atom count");
  if (n == 0) return 0.0;
  Bounds box;
  double r_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(radii[i] > 0.0)) throw DomainError("volume needs positive atomic radii");
    box.extend(positions[i]);
    r_max = std::max(r_max, radii[i]);
  }
  const double pad = r_max + spacing;
  const Vec3 origin = box.min - Vec3::Constant(pad);
  std::array<long, 3> dims{};
  for (int a = 0; a < 3; ++a) {
    dims[a] = static_cast<long>(std::ceil((box.max[a] + pad - origin[a]) / spacing)) + 1;
  }
  const double cells = static_cast<double>(dims[0]) * static_cast<double>(dims[1]) * static_cast<double>(dims[2]);
  if (cells > 4e9) throw DomainError("volume grid too large; increase the spacing");
  std::vector<bool> inside(static_cast<std::size_t>(cells), false);
  for (std::size_t i = 0; i < n; ++i) {
    const double r2 = radii[i] * radii[i];
    std::array<long, 3> lo{}, hi{};
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::max(0L, static_cast<long>(std::floor((positions[i][a] - radii[i] - origin[a]) / spacing)));
      hi[a] = std::min(dims[a] - 1, static_cast<long>(std::ceil((positions[i][a] + radii[i] - origin[a]) / spacing)));
    }
    for (long z = lo[2]; z <= hi[2]; ++z) {
      for (long y = lo[1]; y <= hi[1]; ++y) {
        for (long x = lo[0]; x <= hi[0]; ++x) {
          const Vec3 p = origin + spacing * Vec3(static_cast<double>(x), static_cast<double>(y), static_cast<double>(z));
          if ((p - positions[i]).squaredNorm() < r2) {
            inside[static_cast<std::size_t>(x + dims[0] * (y + dims[1] * z))] = true;
          }
        }
      }
    }
  }
  const auto count = std::count(inside.begin(), inside.end(), true);
  return static_cast<double>(count) * spacing * spacing * spacing;
}

std::pair<std::vector<std::size_t>, std::vector<std::size_t>> partner_split(const Structure& s,
                                                                            const std::string& receptor_chains) {
  const auto chains = s.chains();
  if (chains.empty()) throw DomainError("structure has no atoms to split");
  std::string ids = receptor_chains;
  if (ids.empty()) ids.push_back(chains.front().id);
  std::vector<std::size_t> a, b;
  for (std::size_t i = 0; i < s.size(); ++i) {
    (ids.find(s.atoms[i].chain_id) != std::string::npos ? a : b).push_back(i);
  }
  if (a.empty() || b.empty()) {
    throw DomainError("interface quantities need two non-empty partners (receptor chains '" + ids + "')");
  }
  return {std::move(a), std::move(b)};
}

double evaluate_qoi(QoiKind kind, const Structure& s, std::span<const Vec3> positions, const QoiConfig& cfg) {
  check_positions(s, positions);
  if (is_delta(kind)) {
    const auto [ia, ib] = partner_split(s, cfg.receptor_chains);
    const Structure a = select(s, ia);
    const Structure b = select(s, ib);
    Positions pa, pb;
    for (std::size_t i : ia) pa.push_back(positions[i]);
    for (std::size_t i : ib) pb.push_back(positions[i]);
    return delta_qoi(base_kind(kind), a, pa, b, pb, cfg);
  }
  switch (kind) {
    case QoiKind::kArea:
      return sasa(positions, s.radii(), cfg.probe, cfg.n_points).total;
    case QoiKind::kVolume:
      return volume(positions, s.radii(), cfg.spacing);
    case QoiKind::kLJ: {
      const auto excl = exclusions_of(s);
      std::vector<double> a(s.size()), b(s.size());
      for (std::size_t i = 0; i < s.size(); ++i) {
        a[i] = s.atoms[i].lj_a;
        b[i] = s.atoms[i].lj_b;
      }
      return lj_energy(positions, a, b, PairDomain::intra(&excl));
    }
    case QoiKind::kCoulomb: {
      const auto excl = exclusions_of(s);
      return coulomb_energy(positions, s.charges(), cfg.coulomb, PairDomain::intra(&excl));
    }
    case QoiKind::kGB: {
      const auto radii = born_radii(positions, s.radii(), cfg.born);
      return gb_polarization(positions, s.charges(), radii, cfg.solvent_dielectric);
    }
    default:
      break;
  }
  throw DomainError("unhandled quantity of interest");
}

double delta_qoi(QoiKind kind, const Structure& a, std::span<const Vec3> pos_a, const Structure& b,
                 std::span<const Vec3> pos_b, const QoiConfig& cfg) {
  if (is_delta(kind)) throw DomainError("delta_qoi needs a single-structure quantity");
  check_positions(a, pos_a);
  check_positions(b, pos_b);
  const Structure ab = merge(a, b);
  Positions joint(pos_a.begin(), pos_a.end());
  joint.insert(joint.end(), pos_b.begin(), pos_b.end());
  // Empty partners contribute nothing.
  const double fa = a.empty() ? 0.0 : evaluate_qoi(kind, a, pos_a, cfg);
  const double fb = b.empty() ? 0.0 : evaluate_qoi(kind, b, pos_b, cfg);
  const double fab = ab.empty() ? 0.0 : evaluate_qoi(kind, ab, joint, cfg);
  return fab - fa - fb;
}

std::vector<double> surface_deviation(std::span<const Vec3> reference_points, std::span<const Positions> conformers,
                                      std::span<const double> radii, const QoiConfig& cfg) {
  if (conformers.empty()) throw DomainError("surface deviation needs at least one conformer");
  std::vector<CompensatedSum> sums(reference_points.size());
  for (std::size_t c = 0; c < conformers.size(); ++c) {
    const auto surf = sasa(conformers[c], radii, cfg.probe, cfg.n_points, true);
    if (surf.surface_points.empty()) {
      throw DomainError("conformer " + std::to_string(c) + " exposes no surface points");
    }
    const NearestGrid grid(surf.surface_points, 2.0);
    for (std::size_t k = 0; k < reference_points.size(); ++k) sums[k] += grid.nearest(reference_points[k]);
  }
  std::vector<double> out(reference_points.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = sums[k].value() / static_cast<double>(conformers.size());
  return out;
}

}  // namespace molcert
