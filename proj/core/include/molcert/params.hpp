#pragma once

#include "molcert/structure.hpp"

#include <nlohmann/json.hpp>

#include <map>
#include <optional>
#include <string>
#include <utility>

namespace molcert {

struct ParamRow {
  double radius = 0.0;  ///< A
  double charge = 0.0;  ///< e
  double lj_a = 0.0;    ///< kcal/mol A^12
  double lj_b = 0.0;    ///< kcal/mol A^6
};

/// Builds the (a, b) pair of a 12-6 potential with well depth `epsilon`
/// (kcal/mol) at separation `r_min` (A): a = eps r^12, b = 2 eps r^6.
std::pair<double, double> lj_coefficients(double epsilon, double r_min);

/// Per-element fallback rows plus (residue, atom name) overrides.
///
/// JSON schema:
///   { "C": {"radius": 1.7, "charge": 0.0, "lj_a": ..., "lj_b": ...},
///     ...,
///     "overrides": [{"residue": "LYS", "atom": "NZ", "charge": 1.0}, ...] }
/// Override fields that are omitted are taken from the element row.
class ParamTable {
 public:
  /// Small embedded table adequate for desk-scale runs.
  static ParamTable builtin();
  static ParamTable from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  void set_element(const std::string& element, const ParamRow& row);
  void set_override(const std::string& residue, const std::string& atom, const nlohmann::json& fields);

  /// Specific (residue, atom) row first, then the element fallback.
  std::optional<ParamRow> lookup(const std::string& residue, const std::string& atom,
                                 const std::string& element) const;

  /// Throws DomainError unless fallback rows exist for C, N, O, S, H, P and
  /// all radii are positive.
  void validate() const;

 private:
  std::map<std::string, ParamRow> elements_;
  std::map<std::pair<std::string, std::string>, nlohmann::json> overrides_;
};

/// Returns a copy of `s` where every atom carries charge, radius and LJ
/// parameters. Throws DomainError listing the serials of atoms whose element
/// has no row.
Structure assign_params(Structure s, const ParamTable& table);

}  // namespace molcert
