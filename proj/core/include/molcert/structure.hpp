#pragma once

#include "molcert/geometry.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace molcert {

struct Atom {
  int serial = 0;
  std::string name;
  std::string element;
  std::string residue_name;
  int residue_seq = 0;
  char insertion_code = ' ';
  char chain_id = ' ';
  bool hetero = false;
  double occupancy = 1.0;
  Vec3 position = Vec3::Zero();
  /// Isotropic B-factor, A^2.
  double b_iso = 0.0;
  /// Diagonal anisotropic B-factors (Bx, By, Bz), A^2, from ANISOU records.
  std::optional<Vec3> b_aniso;

  // Force-field parameters; zero until assign_params() runs.
  double charge = 0.0;
  double vdw_radius = 0.0;
  double lj_a = 0.0;  ///< kcal/mol A^12
  double lj_b = 0.0;  ///< kcal/mol A^6
  std::optional<double> born_radius;
};

struct Bond {
  std::size_t i = 0;
  std::size_t j = 0;
  friend bool operator==(const Bond&, const Bond&) = default;
};

/// Chain identifier and the atom indices belonging to it, in file order.
struct Chain {
  char id = ' ';
  std::vector<std::size_t> atoms;
};

struct Structure {
  std::vector<Atom> atoms;
  /// Each unordered pair stored once with i < j.
  std::vector<Bond> bonds;

  std::size_t size() const { return atoms.size(); }
  bool empty() const { return atoms.empty(); }

  /// Partition of atom indices by chain id, chains ordered by first appearance.
  std::vector<Chain> chains() const;

  Positions positions() const;
  std::vector<double> radii() const;
  std::vector<double> charges() const;

  /// True once every atom carries a positive van der Waals radius.
  bool has_params() const;

  /// Throws DomainError when an Atom or Structure invariant is broken.
  void validate() const;
};

/// Covalent radius (A) used by the bond-distance heuristic.
double covalent_radius(const std::string& element);

/// Bonds every pair whose distance is below r_i + r_j + tolerance. Hydrogen
/// pairs are never bonded to each other.
std::vector<Bond> infer_bonds(const Structure& s, double tolerance = 0.45);

/// Appends and normalizes bonds: i < j, sorted, duplicates removed. Throws
/// DomainError when an index is out of range or i == j.
void set_bonds(Structure& s, std::vector<Bond> bonds);

/// Sorted per-atom lists of partners that are 1-2 or 1-3 neighbours; these
/// pairs are excluded from nonbonded sums and clash checks.
class Exclusions {
 public:
  Exclusions() = default;
  explicit Exclusions(const Structure& s);
  Exclusions(std::size_t n, const std::vector<Bond>& bonds);

  bool excluded(std::size_t i, std::size_t j) const;
  std::size_t size() const { return partners_.size(); }

 private:
  std::vector<std::vector<std::size_t>> partners_;
};

/// Concatenates two structures (atoms of `b` after `a`, bond indices shifted).
/// Throws DomainError when the atom serials overlap.
Structure merge(const Structure& a, const Structure& b);

/// Sub-structure with the given atom indices (in the given order), keeping
/// bonds whose endpoints are both selected.
Structure select(const Structure& s, const std::vector<std::size_t>& indices);

}  // namespace molcert
