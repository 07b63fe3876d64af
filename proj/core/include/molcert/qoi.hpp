#pragma once

#include "molcert/geometry.hpp"
#include "molcert/structure.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace molcert {

/// Coulomb constant in kcal mol^-1 A e^-2.
inline constexpr double kCoulombConstant = 332.0636;

enum class QoiKind {
  kArea,
  kVolume,
  kLJ,
  kCoulomb,
  kGB,
  kDeltaArea,
  kDeltaVolume,
  kDeltaLJ,
  kDeltaCoulomb,
  kDeltaGB,
};

std::string_view to_string(QoiKind k);
/// Accepts "area", "volume", "lj", "coulomb", "gb" and their "delta_" forms.
QoiKind parse_qoi_kind(std::string_view name);
bool is_delta(QoiKind k);
/// The single-structure kind a delta kind is built from (identity otherwise).
QoiKind base_kind(QoiKind k);

struct CoulombModel {
  enum class Mode { kConstant, kDistanceDependent };
  Mode mode = Mode::kConstant;
  /// eps0 for kConstant, k for kDistanceDependent (eps(r) = k r).
  double value = 1.0;

  static CoulombModel constant(double eps0) { return {Mode::kConstant, eps0}; }
  static CoulombModel distance_dependent(double k) { return {Mode::kDistanceDependent, k}; }
  double dielectric(double r) const { return mode == Mode::kConstant ? value : value * r; }
};

/// Which atom pairs a pairwise energy sums over.
struct PairDomain {
  /// All unordered pairs minus the excluded ones.
  static PairDomain intra(const Exclusions* exclusions = nullptr) { return PairDomain{exclusions, {}, {}, false}; }
  /// Every pair (a, b) with a in `a` and b in `b`.
  static PairDomain cross(std::vector<std::size_t> a, std::vector<std::size_t> b) {
    return PairDomain{nullptr, std::move(a), std::move(b), true};
  }

  const Exclusions* exclusions = nullptr;
  std::vector<std::size_t> group_a;
  std::vector<std::size_t> group_b;
  bool is_cross = false;
};

/// 12-6 pair coefficients from per-atom (a, b): each atom maps to (eps, r_min)
/// with r_min = (2a/b)^(1/6), eps = b^2/(4a); pairs use the geometric-mean
/// eps and arithmetic-mean r_min. Atoms with a <= 0 or b <= 0 do not interact.
struct LJPair {
  double a = 0.0;
  double b = 0.0;
};
LJPair combine_lj(double a_i, double b_i, double a_j, double b_j);

/// Sum of a_ij/r^12 - b_ij/r^6. Throws DomainError naming a coincident pair.
double lj_energy(std::span<const Vec3> positions, std::span<const double> lj_a, std::span<const double> lj_b,
                 const PairDomain& domain);

/// Sum of C q_i q_j / (eps(r) r).
double coulomb_energy(std::span<const Vec3> positions, std::span<const double> charges, const CoulombModel& model,
                      const PairDomain& domain);

struct BornRadiiOptions {
  /// Inverse radii are floored at 1/max_radius so the radius stays finite.
  double max_radius = 30.0;
};

/// Pairwise descreening: 1/R_i = 1/rho_i - sum_j V_j / (4 pi r_ij^4) with
/// V_j = 4/3 pi rho_j^3, then clamped to rho_i/2 <= R_i <= max_radius.
std::vector<double> born_radii(std::span<const Vec3> positions, std::span<const double> vdw_radii,
                               const BornRadiiOptions& opt = {});

/// -(tau/2) C sum_{i,j} q_i q_j / sqrt(r^2 + R_i R_j exp(-r^2 / (4 R_i R_j)))
/// over all ordered pairs including i == j, tau = 1 - 1/eps_solvent.
double gb_polarization(std::span<const Vec3> positions, std::span<const double> charges,
                       std::span<const double> born_radii, double solvent_dielectric);

/// Quasi-uniform unit-sphere points on a golden-angle spiral.
std::vector<Vec3> sphere_points(std::size_t n);

struct SasaResult {
  double total = 0.0;
  std::vector<double> per_atom;
  /// Exposed probe-sphere points (filled when requested).
  std::vector<Vec3> surface_points;
  std::vector<std::size_t> surface_atoms;
};

/// Shrake-Rupley solvent-accessible area. Throws DomainError for probe < 0
/// or n_points < 32.
SasaResult sasa(std::span<const Vec3> positions, std::span<const double> radii, double probe = 1.4,
                std::size_t n_points = 960, bool keep_points = false);

/// Voxel-centre count inside any sphere, times spacing^3.
double volume(std::span<const Vec3> positions, std::span<const double> radii, double spacing = 0.5);

struct QoiConfig {
  double probe = 1.4;
  std::size_t n_points = 960;
  double spacing = 0.5;
  CoulombModel coulomb = CoulombModel::constant(1.0);
  double solvent_dielectric = 80.0;
  BornRadiiOptions born;
  /// Chains forming partner A of delta quantities; empty means the first chain.
  std::string receptor_chains;
};

/// Evaluates a single-structure QOI on `s` with coordinates `positions`.
/// Delta kinds split `s` into partner chains (see QoiConfig::receptor_chains)
/// and require two non-empty partners.
double evaluate_qoi(QoiKind kind, const Structure& s, std::span<const Vec3> positions, const QoiConfig& cfg);

/// f(A u B) - f(A) - f(B) for a non-delta kind. Throws DomainError when the
/// atom serials of A and B overlap or `kind` is a delta kind.
double delta_qoi(QoiKind kind, const Structure& a, std::span<const Vec3> pos_a, const Structure& b,
                 std::span<const Vec3> pos_b, const QoiConfig& cfg);

/// Splits `s` into (A, B) atom index lists by chain.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> partner_split(const Structure& s,
                                                                            const std::string& receptor_chains);

/// For each reference point, the mean over conformers of the distance to the
/// nearest exposed surface point of that conformer. Throws DomainError when a
/// conformer exposes no surface.
std::vector<double> surface_deviation(std::span<const Vec3> reference_points, std::span<const Positions> conformers,
                                      std::span<const double> radii, const QoiConfig& cfg);

}  // namespace molcert
