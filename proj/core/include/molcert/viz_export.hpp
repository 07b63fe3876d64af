#pragma once

#include "molcert/geometry.hpp"

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace molcert {

/// Regular grid; point (i, j, k) sits at origin + spacing * (i, j, k) and
/// values are stored x-fastest: values[i + nx * (j + ny * k)].
struct ScalarGrid {
  Vec3 origin = Vec3::Zero();
  double spacing = 1.0;
  std::array<std::size_t, 3> dims{0, 0, 0};
  std::vector<double> values;

  std::size_t size() const { return dims[0] * dims[1] * dims[2]; }
  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const { return i + dims[0] * (j + dims[1] * k); }
  Vec3 point(std::size_t i, std::size_t j, std::size_t k) const {
    return origin + spacing * Vec3(double(i), double(j), double(k));
  }
  bool same_geometry(const ScalarGrid& o) const;
  /// Throws DomainError when spacing <= 0 or the value count is wrong.
  void validate() const;
};

/// Grid covering `bounds` padded by `pad` on every side.
ScalarGrid bounding_grid(const Bounds& bounds, double pad, double spacing);

enum class RadiusMode { kVdw, kFixed };

/// Fraction of conformers in which some atom sphere covers each grid point.
/// With kFixed every atom uses `fixed_radius`.
ScalarGrid occupancy_map(std::span<const Positions> conformers, std::span<const double> radii, double spacing,
                         RadiusMode mode = RadiusMode::kVdw, double fixed_radius = 1.5);

struct GridStatistics {
  ScalarGrid mean;
  ScalarGrid std;  ///< population
};

/// Voxelwise mean and standard deviation. Throws DomainError on mismatched
/// geometry or an empty list.
GridStatistics grid_statistics(std::span<const ScalarGrid> grids);

/// OpenDX text (gridpositions / gridconnections / array objects). Values are
/// written z-fastest with 6 significant digits, three per line.
std::string write_grid(const ScalarGrid& g);

/// Reads the layout produced by write_grid. Throws ParseError on malformed
/// input or a value count that disagrees with the declared dims.
ScalarGrid read_grid(std::string_view text);

enum class Palette { kGreenWhiteRed, kRainbow };

Palette parse_palette(std::string_view name);

struct Rgb {
  int r = 0;
  int g = 0;
  int b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// Linear interpolation between the palette anchors; `x` in [0, 1].
Rgb palette_color(Palette p, double x);

struct ColormapExport {
  std::string csv;     ///< key,value,r,g,b
  std::string script;  ///< PyMOL commands coloring atoms by id
};

/// Maps values linearly over [min, max] onto the palette (all values to the
/// midpoint when min == max). Throws DomainError on size mismatch or
/// non-finite values.
ColormapExport colormap_export(std::span<const int> keys, std::span<const double> values, Palette palette,
                               std::string_view object = "all");

}  // namespace molcert
