#include "molcert/conformers.hpp"

#include "molcert/error.hpp"
#include "molcert/parallel.hpp"
#include "molcert/params.hpp"
#include "molcert/sampling.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <limits>
#include <string>
#include <utility>

namespace molcert {
namespace {

constexpr double kTwoPi = 2.0 * kPi;
constexpr double kRangeSlack = 1e-12;

std::vector<std::vector<std::size_t>> adjacency_of(const Structure& s) {
  const auto bonds = s.bonds.empty() ? infer_bonds(s) : s.bonds;
  std::vector<std::vector<std::size_t>> adj(s.size());
  for (const auto& b : bonds) {
    adj[b.i].push_back(b.j);
    adj[b.j].push_back(b.i);
  }
  for (auto& a : adj) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }
  return adj;
}

// Bridges of an undirected graph, each as (min, max). Iterative Tarjan.
std::vector<std::pair<std::size_t, std::size_t>> find_bridges(const std::vector<std::vector<std::size_t>>& adj) {
  const std::size_t n = adj.size();
  constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> disc(n, kUnset), low(n, 0), parent(n, kUnset), next_edge(n, 0);
  std::vector<std::pair<std::size_t, std::size_t>> bridges;
  std::size_t timer = 0;
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < n; ++start) {
    if (disc[start] != kUnset) continue;
    disc[start] = low[start] = timer++;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      if (next_edge[u] < adj[u].size()) {
        const std::size_t v = adj[u][next_edge[u]++];
        if (disc[v] == kUnset) {
          parent[v] = u;
          disc[v] = low[v] = timer++;
          stack.push_back(v);
        } else if (v != parent[u]) {
          low[u] = std::min(low[u], disc[v]);
        }
      } else {
        stack.pop_back();
        if (parent[u] != kUnset) {
          const std::size_t p = parent[u];
          low[p] = std::min(low[p], low[u]);
          if (low[u] > disc[p]) bridges.emplace_back(std::min(p, u), std::max(p, u));
        }
      }
    }
  }
  std::sort(bridges.begin(), bridges.end());
  return bridges;
}

// BFS depth from `root`; remaining components are rooted at their lowest index.
std::vector<std::size_t> bfs_depths(const std::vector<std::vector<std::size_t>>& adj, std::size_t root) {
  const std::size_t n = adj.size();
  constexpr std::size_t kUnset = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> depth(n, kUnset);
  auto run = [&](std::size_t s) {
    std::deque<std::size_t> queue{s};
    depth[s] = 0;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t v : adj[u]) {
        if (depth[v] == kUnset) {
          depth[v] = depth[u] + 1;
          queue.push_back(v);
        }
      }
    }
  };
  if (root < n) run(root);
  for (std::size_t s = 0; s < n; ++s) {
    if (depth[s] == kUnset) run(s);
  }
  return depth;
}

// Atoms reachable from `from` without crossing the bond (blocked, from).
std::vector<std::size_t> side_of(const std::vector<std::vector<std::size_t>>& adj, std::size_t blocked,
                                 std::size_t from) {
  std::vector<char> seen(adj.size(), 0);
  seen[blocked] = 1;
  seen[from] = 1;
  std::vector<std::size_t> out{from};
  for (std::size_t k = 0; k < out.size(); ++k) {
    for (std::size_t v : adj[out[k]]) {
      if (!seen[v]) {
        seen[v] = 1;
        out.push_back(v);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool has_bond(const std::vector<std::vector<std::size_t>>& adj, std::size_t i, std::size_t j) {
  return std::binary_search(adj[i].begin(), adj[i].end(), j);
}

}  // namespace

std::vector<std::size_t> Ensemble::accepted_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < conformers.size(); ++k) {
    if (conformers[k].accepted) out.push_back(k);
  }
  return out;
}

std::size_t Ensemble::accepted_count() const {
  return static_cast<std::size_t>(
      std::count_if(conformers.begin(), conformers.end(), [](const Conformer& c) { return c.accepted; }));
}

Vec3 axis_sigmas(const Atom& atom) {
  if (atom.b_aniso) {
    const Vec3& b = *atom.b_aniso;
    return {sigma_from_b(b.x()), sigma_from_b(b.y()), sigma_from_b(b.z())};
  }
  const double s = sigma_from_b(atom.b_iso);
  return {s, s, s};
}

Conformer perturb_cartesian(const Structure& s, std::span<const Vec3> z, std::size_t sample_index) {
  if (z.size() != s.size()) {
    throw DomainError("perturb_cartesian: expected " + std::to_string(s.size()) + " rows of normals, got " +
                      std::to_string(z.size()));
  }
  Conformer c;
  c.sample_index = sample_index;
  c.positions.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    c.positions[i] = s.atoms[i].position + axis_sigmas(s.atoms[i]).cwiseProduct(z[i]);
  }
  return c;
}

TorsionGraph TorsionGraph::detect(const Structure& s, std::size_t root) {
  if (!s.empty() && root >= s.size()) throw DomainError("torsion root index out of range");
  const auto adj = adjacency_of(s);
  std::vector<Dihedral> dihedrals;
  for (const auto& [i, j] : find_bridges(adj)) {
    if (adj[i].size() < 2 || adj[j].size() < 2) continue;
    Dihedral d;
    d.atoms = {0, i, j, 0};
    dihedrals.push_back(std::move(d));
  }
  return from_dihedrals(s, std::move(dihedrals), root);
}

TorsionGraph TorsionGraph::from_json(const Structure& s, const nlohmann::json& j, std::size_t root) {
  if (!j.is_object() || !j.contains("dihedrals") || !j.at("dihedrals").is_array()) {
    throw DomainError("torsion override needs a \"dihedrals\" array");
  }
  std::vector<Dihedral> dihedrals;
  for (const auto& item : j.at("dihedrals")) {
    const auto& atoms = item.at("atoms");
    if (!atoms.is_array() || atoms.size() != 4) throw DomainError("each dihedral needs four atom indices");
    Dihedral d;
    for (std::size_t k = 0; k < 4; ++k) {
      const auto v = atoms[k].get<long long>();
      if (v < 0 || static_cast<std::size_t>(v) >= s.size()) {
        throw DomainError("dihedral atom index " + std::to_string(v) + " out of range");
      }
      d.atoms[k] = static_cast<std::size_t>(v);
    }
    d.lower = item.value("lower", -kPi);
    d.upper = item.value("upper", kPi);
    dihedrals.push_back(std::move(d));
  }
  return from_dihedrals(s, std::move(dihedrals), root);
}

TorsionGraph TorsionGraph::from_dihedrals(const Structure& s, std::vector<Dihedral> dihedrals, std::size_t root) {
  if (!s.empty() && root >= s.size()) throw DomainError("torsion root index out of range");
  TorsionGraph g;
  g.base_ = s.positions();
  g.root_ = root;
  g.adjacency_ = adjacency_of(s);
  const auto& adj = g.adjacency_;
  const auto bridges = find_bridges(adj);
  const auto depth = bfs_depths(adj, root);

  std::vector<std::pair<std::size_t, std::size_t>> used;
  for (auto& d : dihedrals) {
    std::size_t b = d.atoms[1], c = d.atoms[2];
    if (b >= s.size() || c >= s.size()) throw DomainError("dihedral atom index out of range");
    if (!has_bond(adj, b, c)) {
      throw DomainError("atoms " + std::to_string(b) + " and " + std::to_string(c) + " are not bonded");
    }
    const std::pair key{std::min(b, c), std::max(b, c)};
    if (!std::binary_search(bridges.begin(), bridges.end(), key)) {
      throw DomainError("bond " + std::to_string(b) + "-" + std::to_string(c) +
                        " lies on a cycle and cannot rotate");
    }
    if (std::find(used.begin(), used.end(), key) != used.end()) {
      throw DomainError("bond " + std::to_string(b) + "-" + std::to_string(c) + " listed twice");
    }
    used.push_back(key);
    if (!(std::isfinite(d.lower) && std::isfinite(d.upper)) || d.lower > d.upper ||
        d.upper - d.lower > kTwoPi + kRangeSlack) {
      throw DomainError("dihedral range must satisfy lower <= upper <= lower + 2 pi");
    }

    // Keep the root side fixed. The dihedral value is unchanged by reversal.
    const bool reversed = depth[c] < depth[b];
    const bool detected = d.atoms[0] == d.atoms[3];
    if (reversed) {
      std::swap(b, c);
      std::swap(d.atoms[0], d.atoms[3]);
    }
    d.atoms[1] = b;
    d.atoms[2] = c;
    if (detected) {
      // Reference atoms: lowest-index neighbours off the axis.
      auto pick = [&](std::size_t at, std::size_t other) {
        for (std::size_t v : adj[at]) {
          if (v != other) return v;
        }
        throw DomainError("atom " + std::to_string(at) + " has no neighbour to define a dihedral");
      };
      d.atoms[0] = pick(b, c);
      d.atoms[3] = pick(c, b);
    }
    auto side = side_of(adj, b, c);
    side.erase(std::lower_bound(side.begin(), side.end(), c));
    if (std::binary_search(side.begin(), side.end(), d.atoms[0]) ||
        !std::binary_search(side.begin(), side.end(), d.atoms[3]) || d.atoms[0] == b || d.atoms[0] == c) {
      throw DomainError("dihedral reference atoms must lie on opposite sides of bond " + std::to_string(b) + "-" +
                        std::to_string(c));
    }
    d.downstream = std::move(side);
  }
  std::stable_sort(dihedrals.begin(), dihedrals.end(), [&](const Dihedral& x, const Dihedral& y) {
    if (depth[x.atoms[2]] != depth[y.atoms[2]]) return depth[x.atoms[2]] < depth[y.atoms[2]];
    return x.atoms[2] < y.atoms[2];
  });
  g.dihedrals_ = std::move(dihedrals);
  return g;
}

std::vector<double> TorsionGraph::angles(std::span<const Vec3> positions) const {
  if (positions.size() != base_.size()) throw DomainError("positions do not match the torsion graph");
  std::vector<double> out;
  out.reserve(dihedrals_.size());
  for (const auto& d : dihedrals_) {
    out.push_back(dihedral_angle(positions[d.atoms[0]], positions[d.atoms[1]], positions[d.atoms[2]],
                                 positions[d.atoms[3]]));
  }
  return out;
}

void TorsionGraph::set_windows(std::span<const double> centers, double half_width) {
  if (centers.size() != dihedrals_.size()) throw DomainError("one window centre per dihedral required");
  if (!(half_width > 0.0 && half_width <= kPi)) throw DomainError("window half width must lie in (0, pi]");
  for (std::size_t k = 0; k < centers.size(); ++k) {
    dihedrals_[k].lower = centers[k] - half_width;
    dihedrals_[k].upper = centers[k] + half_width;
  }
}

bool TorsionGraph::in_range(std::size_t k, double angle) const {
  const auto& d = dihedrals_.at(k);
  if (!std::isfinite(angle)) return false;
  const double width = d.upper - d.lower;
  if (width >= kTwoPi - kRangeSlack) return true;
  double offset = std::fmod(angle - d.lower, kTwoPi);
  if (offset < 0.0) offset += kTwoPi;
  return offset <= width + kRangeSlack || offset >= kTwoPi - kRangeSlack;
}

Conformer apply_torsions(const TorsionGraph& g, std::span<const double> angles, std::span<const Vec3> base,
                         std::size_t sample_index) {
  if (angles.size() != g.dihedrals_.size()) {
    throw DomainError("expected " + std::to_string(g.dihedrals_.size()) + " torsion angles, got " +
                      std::to_string(angles.size()));
  }
  Conformer c;
  c.sample_index = sample_index;
  if (base.empty()) {
    c.positions = g.base_;
  } else {
    if (base.size() != g.base_.size()) throw DomainError("base coordinates do not match the torsion graph");
    c.positions.assign(base.begin(), base.end());
  }
  auto& p = c.positions;
  for (std::size_t k = 0; k < angles.size(); ++k) {
    if (!g.in_range(k, angles[k])) {
      char buf[128];
      std::snprintf(buf, sizeof buf, "torsion %zu angle %.6f outside [%.6f, %.6f]", k, angles[k],
                    g.dihedrals_[k].lower, g.dihedrals_[k].upper);
      throw DomainError(buf);
    }
    const auto& d = g.dihedrals_[k];
    const double current = dihedral_angle(p[d.atoms[0]], p[d.atoms[1]], p[d.atoms[2]], p[d.atoms[3]]);
    const double delta = angles[k] - current;
    const Vec3 origin = p[d.atoms[2]];
    const Vec3 axis = (p[d.atoms[2]] - p[d.atoms[1]]).normalized();
    const Eigen::AngleAxisd rot(delta, axis);
    for (std::size_t i : d.downstream) p[i] = origin + rot * (p[i] - origin);
  }
  return c;
}

namespace {

double clash_radius(const Atom& a) {
  if (a.vdw_radius > 0.0) return a.vdw_radius;
  static const ParamTable table = ParamTable::builtin();
  if (auto row = table.lookup(a.residue_name, a.name, a.element)) return row->radius;
  throw DomainError("atom " + std::to_string(a.serial) + " has no van der Waals radius");
}

}  // namespace

Conformer clash_filter(Conformer c, const Structure& s, const Exclusions& excl, double factor) {
  if (!(factor > 0.0 && factor <= 1.0)) throw DomainError("clash factor must lie in (0, 1]");
  if (c.positions.size() != s.size()) throw DomainError("conformer does not match the structure");
  const std::size_t n = s.size();
  std::vector<double> r(n);
  double r_max = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r[i] = clash_radius(s.atoms[i]);
    r_max = std::max(r_max, r[i]);
  }
  if (n < 2) return c;
  const CellList cells(c.positions, std::max(2.0 * factor * r_max, 1e-3));
  double worst = std::numeric_limits<double>::infinity();
  std::size_t wi = 0, wj = 0;
  for (std::size_t i = 0; i < n; ++i) {
    cells.for_each_candidate(c.positions[i], [&](std::size_t j) {
      if (j <= i || excl.excluded(i, j)) return;
      const double limit = factor * (r[i] + r[j]);
      const double ratio = (c.positions[i] - c.positions[j]).norm() / limit;
      if (ratio < 1.0 && (ratio < worst || (ratio == worst && std::pair{i, j} < std::pair{wi, wj}))) {
        worst = ratio;
        wi = i;
        wj = j;
      }
    });
  }
  if (std::isfinite(worst)) {
    const double dist = (c.positions[wi] - c.positions[wj]).norm();
    char buf[256];
    std::snprintf(buf, sizeof buf, "clash between atoms %d (%s) and %d (%s): %.3f A < %.3f A", s.atoms[wi].serial,
                  s.atoms[wi].name.c_str(), s.atoms[wj].serial, s.atoms[wj].name.c_str(), dist,
                  factor * (r[wi] + r[wj]));
    c.accepted = false;
    c.rejection_reason = buf;
  } else {
    c.accepted = true;
    c.rejection_reason.reset();
  }
  return c;
}

Conformer clash_filter(Conformer c, const Structure& s, double factor) {
  const Exclusions excl = s.bonds.empty() ? Exclusions(s.size(), infer_bonds(s)) : Exclusions(s);
  return clash_filter(std::move(c), s, excl, factor);
}

double rmsd(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.size() != b.size()) throw DomainError("RMSD needs equal atom counts");
  if (a.empty()) throw DomainError("RMSD of zero atoms is undefined");
  CompensatedSum sum;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (a[i] - b[i]).squaredNorm();
  return std::sqrt(sum.value() / static_cast<double>(a.size()));
}

double rmsd(const Conformer& a, const Conformer& b) { return rmsd(a.positions, b.positions); }

double rmsd_superposed(std::span<const Vec3> a, std::span<const Vec3> b) {
  if (a.size() != b.size()) throw DomainError("RMSD needs equal atom counts");
  if (a.empty()) throw DomainError("RMSD of zero atoms is undefined");
  const double n = static_cast<double>(a.size());
  Vec3 ca = Vec3::Zero(), cb = Vec3::Zero();
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca += a[i];
    cb += b[i];
  }
  ca /= n;
  cb /= n;
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < a.size(); ++i) h += (a[i] - ca) * (b[i] - cb).transpose();
  const Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 fix = Mat3::Identity();
  if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) fix(2, 2) = -1.0;
  const Mat3 rot = svd.matrixV() * fix * svd.matrixU().transpose();
  CompensatedSum sum;
  for (std::size_t i = 0; i < a.size(); ++i) sum += (rot * (a[i] - ca) - (b[i] - cb)).squaredNorm();
  return std::sqrt(std::max(0.0, sum.value()) / n);
}

std::vector<double> rmsd_matrix(const Ensemble& e, RmsdMode mode) {
  const auto idx = e.accepted_indices();
  const std::size_t n = idx.size();
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = e.conformers[idx[i]].positions;
      const auto& b = e.conformers[idx[j]].positions;
      const double v = mode == RmsdMode::kSuperposed ? rmsd_superposed(a, b) : rmsd(a, b);
      m[i * n + j] = m[j * n + i] = v;
    }
  }
  return m;
}

CircularSpread circular_spread(std::span<const double> angles) {
  if (angles.size() < 2) throw DomainError("circular spread needs at least two samples");
  CompensatedSum c, s;
  for (double a : angles) {
    c += std::cos(a);
    s += std::sin(a);
  }
  const double n = static_cast<double>(angles.size());
  CircularSpread out;
  out.mean_resultant = std::min(1.0, std::hypot(c.value(), s.value()) / n);
  if (out.mean_resultant < 1e-12) {
    out.maximal = true;
    out.circular_std = std::numeric_limits<double>::infinity();
  } else {
    out.circular_std = std::sqrt(-2.0 * std::log(out.mean_resultant));
  }
  return out;
}

std::vector<CircularSpread> torsion_variability(const Ensemble& e, const TorsionGraph& g) {
  const auto idx = e.accepted_indices();
  if (idx.size() < 2) throw DomainError("torsion variability needs at least two accepted conformers");
  std::vector<std::vector<double>> per(g.size());
  for (std::size_t k : idx) {
    const auto a = g.angles(e.conformers[k].positions);
    for (std::size_t d = 0; d < a.size(); ++d) per[d].push_back(a[d]);
  }
  std::vector<CircularSpread> out;
  out.reserve(per.size());
  for (const auto& v : per) out.push_back(circular_spread(v));
  return out;
}

std::vector<MotionModes> atom_motion_modes(const Ensemble& e) {
  const auto idx = e.accepted_indices();
  if (idx.size() < 4) throw DomainError("motion modes need at least four accepted conformers");
  const std::size_t n_atoms = e.conformers[idx.front()].positions.size();
  const double n = static_cast<double>(idx.size());
  std::vector<MotionModes> out(n_atoms);
  for (std::size_t i = 0; i < n_atoms; ++i) {
    Vec3 mean = Vec3::Zero();
    for (std::size_t k : idx) mean += e.conformers[k].positions.at(i);
    mean /= n;
    Mat3 cov = Mat3::Zero();
    for (std::size_t k : idx) {
      const Vec3 d = e.conformers[k].positions[i] - mean;
      cov += d * d.transpose();
    }
    cov /= n;
    const Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
    auto& m = out[i];
    m.covariance = cov;
    for (int c = 0; c < 3; ++c) {
      // Eigen returns ascending order.
      Vec3 v = eig.eigenvectors().col(2 - c);
      Eigen::Index big = 0;
      v.cwiseAbs().maxCoeff(&big);
      if (v[big] < 0.0) v = -v;
      m.directions.col(c) = v;
      m.variances[c] = std::max(0.0, eig.eigenvalues()[2 - c]);
    }
  }
  return out;
}

namespace {

template <typename Seq>
void fill_point(const Seq& seq, std::size_t k, std::span<double> u) {
  seq.point_at(k, u);
}

}  // namespace

Ensemble sample_cartesian(const Structure& s, const SamplingOptions& opt, std::span<const std::size_t> perturbed) {
  if (s.empty()) throw DomainError("cannot sample an empty structure");
  std::vector<std::size_t> moving(perturbed.begin(), perturbed.end());
  if (moving.empty()) {
    moving.resize(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) moving[i] = i;
  }
  for (std::size_t i : moving) {
    if (i >= s.size()) throw DomainError("perturbed atom index out of range");
  }
  const std::size_t count = 3 * moving.size();
  const std::size_t dim = gaussian_unit_dimension(count);
  const Exclusions excl = s.bonds.empty() ? Exclusions(s.size(), infer_bonds(s)) : Exclusions(s);

  Ensemble e;
  e.source = s;
  e.seed = opt.seed;
  e.conformers.resize(opt.samples);
  auto run = [&](const auto& seq) {
    parallel_for(opt.samples, opt.workers, [&](std::size_t k) {
      std::vector<double> u(dim);
      fill_point(seq, k, u);
      const auto g = gaussians_from_unit(u, count);
      std::vector<Vec3> z(s.size(), Vec3::Zero());
      for (std::size_t m = 0; m < moving.size(); ++m) z[moving[m]] = Vec3(g[3 * m], g[3 * m + 1], g[3 * m + 2]);
      e.conformers[k] = clash_filter(perturb_cartesian(s, z, k), s, excl, opt.clash_factor);
    });
  };
  if (opt.sequence == SequenceKind::kLowDiscrepancy) {
    run(LowDiscrepancySequence(dim, opt.seed));
  } else {
    run(PseudoRandomSequence(dim, opt.seed));
  }
  return e;
}

Ensemble sample_torsions(const Structure& s, const TorsionGraph& g, const SamplingOptions& opt) {
  if (g.size() == 0) throw DomainError("structure has no rotatable dihedrals to sample");
  if (g.base_positions().size() != s.size()) throw DomainError("torsion graph does not match the structure");
  const std::size_t dim = g.size();
  const Exclusions excl = s.bonds.empty() ? Exclusions(s.size(), infer_bonds(s)) : Exclusions(s);
  const auto& dih = g.dihedrals();

  Ensemble e;
  e.source = s;
  e.seed = opt.seed;
  e.conformers.resize(opt.samples);
  auto run = [&](const auto& seq) {
    parallel_for(opt.samples, opt.workers, [&](std::size_t k) {
      std::vector<double> u(dim);
      fill_point(seq, k, u);
      std::vector<double> angles(dim);
      for (std::size_t d = 0; d < dim; ++d) angles[d] = dih[d].lower + u[d] * (dih[d].upper - dih[d].lower);
      e.conformers[k] = clash_filter(apply_torsions(g, angles, {}, k), s, excl, opt.clash_factor);
    });
  };
  if (opt.sequence == SequenceKind::kLowDiscrepancy) {
    run(LowDiscrepancySequence(dim, opt.seed));
  } else {
    run(PseudoRandomSequence(dim, opt.seed));
  }
  return e;
}

}  // namespace molcert
