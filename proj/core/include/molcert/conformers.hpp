#pragma once

#include "molcert/geometry.hpp"
#include "molcert/structure.hpp"

#include <nlohmann/json.hpp>

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace molcert {

struct Conformer {
  Positions positions;
  std::size_t sample_index = 0;
  bool accepted = true;
  std::optional<std::string> rejection_reason;
};

struct Ensemble {
  Structure source;
  std::vector<Conformer> conformers;
  std::uint64_t seed = 0;

  /// Indices of accepted conformers, in sample order.
  std::vector<std::size_t> accepted_indices() const;
  std::size_t accepted_count() const;
};

/// Per-axis positional standard deviations (A) of one atom: from b_aniso when
/// present, otherwise isotropic from b_iso.
Vec3 axis_sigmas(const Atom& atom);

/// position[i][axis] = mu[i][axis] + sigma[i][axis] * z[i][axis].
/// Throws DomainError when z.size() != s.size().
Conformer perturb_cartesian(const Structure& s, std::span<const Vec3> z, std::size_t sample_index = 0);

/// A rotatable dihedral: rotation about the bond atoms[1]-atoms[2] moves
/// `downstream` (the side of atoms[2]).
struct Dihedral {
  std::array<std::size_t, 4> atoms{};
  std::vector<std::size_t> downstream;
  double lower = -kPi;
  double upper = kPi;
};

/// Rotatable bonds of a structure and their allowed angle ranges.
///
/// Ranges are intervals [lower, upper] with upper - lower <= 2 pi; membership
/// is tested modulo 2 pi so windows may straddle +-pi.
class TorsionGraph {
 public:
  /// Detects rotatable bonds: bridges of the bond graph (not in any ring)
  /// whose endpoints both have another neighbour. The side containing atom
  /// `root` stays fixed. Uses s.bonds, or the distance heuristic when empty.
  static TorsionGraph detect(const Structure& s, std::size_t root = 0);

  /// Uses the dihedrals listed in an override document
  ///   {"dihedrals": [{"atoms": [i, j, k, l], "lower": ..., "upper": ...}]}
  /// (0-based atom indices). Throws DomainError when a listed bond lies on a
  /// cycle or an index is invalid.
  static TorsionGraph from_json(const Structure& s, const nlohmann::json& j, std::size_t root = 0);

  /// Builds from explicit dihedrals (downstream sets are recomputed).
  static TorsionGraph from_dihedrals(const Structure& s, std::vector<Dihedral> dihedrals, std::size_t root = 0);

  const std::vector<Dihedral>& dihedrals() const { return dihedrals_; }
  std::size_t size() const { return dihedrals_.size(); }
  /// Coordinates the graph was built from.
  const Positions& base_positions() const { return base_; }

  /// Current dihedral values of `positions`.
  std::vector<double> angles(std::span<const Vec3> positions) const;

  /// Sets all ranges to current +- half_width (radians).
  void set_windows(std::span<const double> centers, double half_width);

  bool in_range(std::size_t k, double angle) const;

 private:
  Positions base_;
  std::vector<Dihedral> dihedrals_;
  std::size_t root_ = 0;
  std::vector<std::vector<std::size_t>> adjacency_;

  friend Conformer apply_torsions(const TorsionGraph&, std::span<const double>, std::span<const Vec3>, std::size_t);
};

/// Rotates each dihedral's downstream atoms so the dihedral equals `angles[k]`.
/// Dihedrals are processed root-outward so later rotations never disturb
/// earlier ones. Starts from `base` (defaults to the structure's positions).
/// Throws DomainError when an angle is outside its range or the count differs.
Conformer apply_torsions(const TorsionGraph& g, std::span<const double> angles,
                         std::span<const Vec3> base = {}, std::size_t sample_index = 0);

/// Rejects the conformer when any pair that is not a 1-2 or 1-3 neighbour sits
/// closer than factor * (r_i + r_j). The reason names the worst pair.
/// Returns the conformer with accepted/rejection_reason set.
Conformer clash_filter(Conformer c, const Structure& s, const Exclusions& excl, double factor);
Conformer clash_filter(Conformer c, const Structure& s, double factor);

/// Root-mean-square deviation without superposition.
double rmsd(std::span<const Vec3> a, std::span<const Vec3> b);
double rmsd(const Conformer& a, const Conformer& b);

/// RMSD after optimal rigid superposition (Kabsch).
double rmsd_superposed(std::span<const Vec3> a, std::span<const Vec3> b);

enum class RmsdMode { kFixedFrame, kSuperposed };

/// Symmetric N x N matrix over the accepted conformers, row-major.
std::vector<double> rmsd_matrix(const Ensemble& e, RmsdMode mode = RmsdMode::kFixedFrame);

struct CircularSpread {
  double mean_resultant = 0.0;
  /// sqrt(-2 ln R); +infinity when R vanishes (flagged by `maximal`).
  double circular_std = 0.0;
  bool maximal = false;
};

/// Circular standard deviation of angle samples. Throws DomainError for fewer
/// than two samples.
CircularSpread circular_spread(std::span<const double> angles);

/// Per-dihedral spread across the accepted conformers.
std::vector<CircularSpread> torsion_variability(const Ensemble& e, const TorsionGraph& g);

struct MotionModes {
  /// Columns are orthonormal directions, ordered by descending variance.
  Mat3 directions = Mat3::Identity();
  Vec3 variances = Vec3::Zero();  ///< A^2
  Mat3 covariance = Mat3::Zero();
};

/// Eigen-decomposition of each atom's 3x3 positional covariance (divisor N)
/// over the accepted conformers. Throws DomainError for fewer than 4.
std::vector<MotionModes> atom_motion_modes(const Ensemble& e);

enum class SequenceKind { kLowDiscrepancy, kPseudoRandom };

struct SamplingOptions {
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  SequenceKind sequence = SequenceKind::kLowDiscrepancy;
  double clash_factor = 0.6;
  std::size_t workers = 1;
};

/// Draws `samples` Cartesian conformers from the B-factor model. Only atoms in
/// `perturbed` move (all atoms when empty); each consumes three Gaussian
/// coordinates. Sample k uses point k of the unit-cube stream.
Ensemble sample_cartesian(const Structure& s, const SamplingOptions& opt,
                          std::span<const std::size_t> perturbed = {});

/// Draws torsion-space conformers with angles uniform in each dihedral range.
Ensemble sample_torsions(const Structure& s, const TorsionGraph& g, const SamplingOptions& opt);

}  // namespace molcert
