#pragma once

#include "molcert/geometry.hpp"
#include "molcert/structure.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace molcert {

/// Rigid transform of a ligand: x -> rotation * x + translation.
struct Pose {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  int rank = 0;
  std::optional<std::size_t> source_conformer;

  Vec3 apply(const Vec3& x) const { return rotation * x + translation; }
  /// Throws DomainError unless R^T R = I and det R = +1 to 1e-9.
  void validate() const;
};

/// Reads [{"rank": 1, "rotation": [9 numbers, row-major], "translation": [3],
/// "conformer": optional index}, ...].
std::vector<Pose> poses_from_json(const nlohmann::json& j);
nlohmann::json poses_to_json(std::span<const Pose> poses);

struct ContactModel {
  double cutoff = 5.0;  ///< A, inclusive
  void validate() const;
};

/// 1 when some transformed ligand atom lies within the cutoff of `atom`.
int contact(const Vec3& atom, std::span<const Vec3> ligand, const Pose& pose, const ContactModel& m);

struct BindingSiteMap {
  std::vector<double> probability;  ///< one per receptor atom
  std::size_t poses = 0;            ///< k
  std::size_t configurations = 1;   ///< N
  double cutoff = 5.0;
};

/// p(a) = (1/k) sum_i contact(a, T_i(B)). Throws DomainError for no poses.
BindingSiteMap binding_site_prob(std::span<const Vec3> receptor, std::span<const Vec3> ligand,
                                 std::span<const Pose> poses, const ContactModel& m);

/// p(a) = (1/(kN)) sum over conformers and their k poses. Throws DomainError
/// when pose counts differ between conformers or a conformer has none.
BindingSiteMap binding_site_prob_multi(std::span<const Vec3> receptor, std::span<const Positions> ligand_conformers,
                                       const std::vector<std::vector<Pose>>& poses_per_conformer,
                                       const ContactModel& m);

/// Groups poses by source_conformer (poses without one go to conformer 0).
std::vector<std::vector<Pose>> group_poses(std::span<const Pose> poses, std::size_t conformers);

/// sum_a known(a) * p(a). Throws DomainError when the atom sets differ in size.
double inhibit_score(std::span<const double> known_site, const BindingSiteMap& candidate);

/// sum_a p(a) * contact(a, T(ligand)).
double binding_score(std::span<const Vec3> ligand, const Pose& pose, const BindingSiteMap& map,
                     std::span<const Vec3> receptor, const ContactModel& m);

struct ResidueProbability {
  char chain_id = ' ';
  std::string residue_name;
  int residue_seq = 0;
  char insertion_code = ' ';
  double probability = 0.0;
};

/// Residue-level map: maximum over each residue's atoms.
std::vector<ResidueProbability> residue_probabilities(const Structure& receptor, const BindingSiteMap& map);

}  // namespace molcert
