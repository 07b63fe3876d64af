#pragma once

#include "molcert/structure.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace molcert {

/// Parses ATOM/HETATM/ANISOU records of a fixed-column PDB file. Only the
/// first MODEL is read. Alternate locations other than blank and 'A' are
/// skipped. ANISOU diagonals (U in 1e-4 A^2) become B = 8 pi^2 U.
Structure parse_pdb(std::string_view text);

/// Parses every MODEL of a multi-model PDB file. A file without MODEL
/// records yields a single model.
std::vector<Structure> parse_pdb_models(std::string_view text);

/// Writes ATOM/HETATM records (plus ANISOU for anisotropic atoms) and END.
/// Throws DomainError when a field does not fit its fixed-width column.
std::string write_pdb(const Structure& s);

/// Writes one MODEL block per coordinate set using the atom records of `s`.
std::string write_pdb_models(const Structure& s, std::span<const Positions> models,
                             std::span<const std::size_t> model_numbers = {});

}  // namespace molcert
