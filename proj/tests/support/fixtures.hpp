#pragma once

#include "molcert/geometry.hpp"
#include "molcert/structure.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace molcert::fixture {

/// One carbon atom with the given position and B-factor.
Atom carbon(int serial, const Vec3& pos, double b_iso = 20.0, char chain = 'A');

/// Unbranched carbon chain built from internal coordinates. Dihedral k (in
/// radians) sets atom k + 3 relative to atoms k..k+2. Bonds are explicit.
Structure zigzag_chain(std::size_t atoms, std::span<const double> dihedrals, double bond = 1.53,
                       double angle_deg = 111.0);

/// Random atoms in a cube of side `box`, at least `min_dist` apart, with
/// random charges and the builtin carbon/nitrogen/oxygen parameters.
Structure random_structure(std::size_t n, std::uint64_t seed, double box = 12.0, double min_dist = 1.2,
                           char chain = 'A', int first_serial = 1);

/// Uniform random rotation.
Mat3 random_rotation(std::mt19937_64& rng);

/// Applies x -> r x + t to every position.
Positions transform(std::span<const Vec3> p, const Mat3& r, const Vec3& t);

/// Reads a file under tests/data.
std::string read_data(const std::string& name);

}  // namespace molcert::fixture
