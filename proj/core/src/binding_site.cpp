#include "molcert/binding_site.hpp"

#include "molcert/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

namespace molcert {
namespace {

std::vector<std::uint32_t> contact_counts(std::span<const Vec3> receptor, std::span<const Vec3> ligand,
                                          std::span<const Pose> poses, const ContactModel& m,
                                          std::vector<std::uint32_t> counts) {
  std::vector<Vec3> placed(ligand.size());
  for (const auto& pose : poses) {
    pose.validate();
    for (std::size_t b = 0; b < ligand.size(); ++b) placed[b] = pose.apply(ligand[b]);
    for (std::size_t a = 0; a < receptor.size(); ++a) {
      for (const auto& p : placed) {
        if ((receptor[a] - p).norm() <= m.cutoff) {
          ++counts[a];
          break;
        }
      }
    }
  }
  return counts;
}

}  // namespace

void Pose::validate() const {
  if (!rotation.allFinite() || !translation.allFinite()) throw DomainError("pose contains non-finite values");
  if ((rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9 ||
      std::abs(rotation.determinant() - 1.0) > 1e-9) {
    throw DomainError("pose rotation is not a proper orthonormal matrix (rank " + std::to_string(rank) + ")");
  }
}

std::vector<Pose> poses_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw DomainError("pose file must hold a JSON array");
  std::vector<Pose> out;
  for (const auto& item : j) {
    Pose p;
    p.rank = item.value("rank", static_cast<int>(out.size()) + 1);
    const auto& r = item.at("rotation");
    const auto& t = item.at("translation");
    if (!r.is_array() || r.size() != 9) throw DomainError("pose rotation needs 9 numbers");
    if (!t.is_array() || t.size() != 3) throw DomainError("pose translation needs 3 numbers");
    for (int k = 0; k < 9; ++k) p.rotation(k / 3, k % 3) = r[static_cast<std::size_t>(k)].get<double>();
    for (int k = 0; k < 3; ++k) p.translation[k] = t[static_cast<std::size_t>(k)].get<double>();
    if (item.contains("conformer")) {
      const auto c = item.at("conformer").get<long long>();
      if (c < 0) throw DomainError("pose conformer index must be >= 0");
      p.source_conformer = static_cast<std::size_t>(c);
    }
    p.validate();
    out.push_back(p);
  }
  return out;
}

nlohmann::json poses_to_json(std::span<const Pose> poses) {
  auto out = nlohmann::json::array();
  for (const auto& p : poses) {
    nlohmann::json item;
    item["rank"] = p.rank;
    std::vector<double> r(9);
    for (int k = 0; k < 9; ++k) r[static_cast<std::size_t>(k)] = p.rotation(k / 3, k % 3);
    item["rotation"] = r;
    item["translation"] = {p.translation.x(), p.translation.y(), p.translation.z()};
    if (p.source_conformer) item["conformer"] = *p.source_conformer;
    out.push_back(std::move(item));
  }
  return out;
}

void ContactModel::validate() const {
  if (!(cutoff > 0.0) || !std::isfinite(cutoff)) throw DomainError("contact cutoff must be positive");
}

int contact(const Vec3& atom, std::span<const Vec3> ligand, const Pose& pose, const ContactModel& m) {
  for (const auto& b : ligand) {
    if ((atom - pose.apply(b)).norm() <= m.cutoff) return 1;
  }
  return 0;
}

BindingSiteMap binding_site_prob(std::span<const Vec3> receptor, std::span<const Vec3> ligand,
                                 std::span<const Pose> poses, const ContactModel& m) {
  const std::vector<Positions> one{Positions(ligand.begin(), ligand.end())};
  return binding_site_prob_multi(receptor, one, {std::vector<Pose>(poses.begin(), poses.end())}, m);
}

BindingSiteMap binding_site_prob_multi(std::span<const Vec3> receptor, std::span<const Positions> ligand_conformers,
                                       const std::vector<std::vector<Pose>>& poses_per_conformer,
                                       const ContactModel& m) {
  m.validate();
  if (ligand_conformers.empty()) throw DomainError("binding-site map needs at least one ligand configuration");
  if (poses_per_conformer.size() != ligand_conformers.size()) {
    throw DomainError("one pose list per ligand configuration required");
  }
  const std::size_t k = poses_per_conformer.front().size();
  if (k == 0) throw DomainError("binding-site map needs at least one pose");
  for (std::size_t c = 0; c < poses_per_conformer.size(); ++c) {
    if (poses_per_conformer[c].size() != k) {
      throw DomainError("configuration " + std::to_string(c) + " has " +
                        std::to_string(poses_per_conformer[c].size()) + " poses, expected " + std::to_string(k));
    }
  }
  std::vector<std::uint32_t> counts(receptor.size(), 0);
  for (std::size_t c = 0; c < ligand_conformers.size(); ++c) {
    counts = contact_counts(receptor, ligand_conformers[c], poses_per_conformer[c], m, std::move(counts));
  }
  BindingSiteMap out;
  out.poses = k;
  out.configurations = ligand_conformers.size();
  out.cutoff = m.cutoff;
  const double total = static_cast<double>(k) * static_cast<double>(out.configurations);
  out.probability.resize(receptor.size());
  for (std::size_t a = 0; a < receptor.size(); ++a) out.probability[a] = static_cast<double>(counts[a]) / total;
  return out;
}

std::vector<std::vector<Pose>> group_poses(std::span<const Pose> poses, std::size_t conformers) {
  if (conformers == 0) throw DomainError("pose grouping needs at least one configuration");
  std::vector<std::vector<Pose>> out(conformers);
  for (const auto& p : poses) {
    const std::size_t c = p.source_conformer.value_or(0);
    if (c >= conformers) throw DomainError("pose refers to configuration " + std::to_string(c) + " out of range");
    out[c].push_back(p);
  }
  return out;
}

double inhibit_score(std::span<const double> known_site, const BindingSiteMap& candidate) {
  if (known_site.size() != candidate.probability.size()) {
    throw DomainError("known site and candidate map cover different atom sets");
  }
  double s = 0.0;
  for (std::size_t a = 0; a < known_site.size(); ++a) {
    if (known_site[a] != 0.0 && known_site[a] != 1.0) throw DomainError("known site map must be 0/1");
    s += known_site[a] * candidate.probability[a];
  }
  return s;
}

double binding_score(std::span<const Vec3> ligand, const Pose& pose, const BindingSiteMap& map,
                     std::span<const Vec3> receptor, const ContactModel& m) {
  m.validate();
  pose.validate();
  if (map.probability.size() != receptor.size()) throw DomainError("binding-site map does not match the receptor");
  double s = 0.0;
  for (std::size_t a = 0; a < receptor.size(); ++a) {
    if (map.probability[a] != 0.0 && contact(receptor[a], ligand, pose, m)) s += map.probability[a];
  }
  return s;
}

std::vector<ResidueProbability> residue_probabilities(const Structure& receptor, const BindingSiteMap& map) {
  if (map.probability.size() != receptor.size()) throw DomainError("binding-site map does not match the receptor");
  std::vector<ResidueProbability> out;
  std::map<std::tuple<char, int, char, std::string>, std::size_t> index;
  for (std::size_t a = 0; a < receptor.size(); ++a) {
    const auto& atom = receptor.atoms[a];
    const auto key = std::make_tuple(atom.chain_id, atom.residue_seq, atom.insertion_code, atom.residue_name);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, out.size()).first;
      out.push_back({atom.chain_id, atom.residue_name, atom.residue_seq, atom.insertion_code, 0.0});
    }
    out[it->second].probability = std::max(out[it->second].probability, map.probability[a]);
  }
  return out;
}

}  // namespace molcert
