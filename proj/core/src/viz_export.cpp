#include "molcert/viz_export.hpp"

#include "molcert/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>

namespace molcert {
namespace {

std::string shortest(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string sig6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

constexpr std::array<Rgb, 3> kGreenWhiteRed{{{0, 255, 0}, {255, 255, 255}, {255, 0, 0}}};
constexpr std::array<Rgb, 5> kRainbow{{{255, 0, 0}, {255, 255, 0}, {0, 255, 0}, {0, 255, 255}, {0, 0, 255}}};

template <std::size_t N>
Rgb interpolate(const std::array<Rgb, N>& anchors, double x) {
  x = std::clamp(x, 0.0, 1.0);
  const double pos = x * static_cast<double>(N - 1);
  const std::size_t seg = std::min(N - 2, static_cast<std::size_t>(pos));
  const double f = pos - static_cast<double>(seg);
  const Rgb& a = anchors[seg];
  const Rgb& b = anchors[seg + 1];
  auto mix = [f](int p, int q) { return static_cast<int>(std::lround(p + f * (q - p))); };
  return {mix(a.r, b.r), mix(a.g, b.g), mix(a.b, b.b)};
}

// Line-oriented reader that tracks line numbers for ParseError.
class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    while (pos_ < text_.size()) {
      const auto end = text_.find('\n', pos_);
      line = text_.substr(pos_, end == std::string_view::npos ? std::string_view::npos : end - pos_);
      pos_ = end == std::string_view::npos ? text_.size() : end + 1;
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      const auto first = line.find_first_not_of(" \t");
      if (first == std::string_view::npos || line[first] == '#') continue;
      return true;
    }
    return false;
  }
  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

double to_double(const std::string& s, std::size_t line) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("expected a number, got '" + s + "'", line);
  }
  return v;
}

std::size_t to_count(const std::string& s, std::size_t line) {
  std::size_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw ParseError("expected a count, got '" + s + "'", line);
  }
  return v;
}

}  // namespace

bool ScalarGrid::same_geometry(const ScalarGrid& o) const {
  return origin == o.origin && spacing == o.spacing && dims == o.dims;
}

void ScalarGrid::validate() const {
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw DomainError("grid spacing must be positive");
  if (values.size() != size()) {
    throw DomainError("grid holds " + std::to_string(values.size()) + " values, expected " + std::to_string(size()));
  }
}

ScalarGrid bounding_grid(const Bounds& bounds, double pad, double spacing) {
  if (bounds.empty()) throw DomainError("cannot build a grid over empty bounds");
  if (!(spacing > 0.0)) throw DomainError("grid spacing must be positive");
  if (!(pad >= 0.0)) throw DomainError("grid padding must be >= 0");
  ScalarGrid g;
  g.spacing = spacing;
  g.origin = bounds.min - Vec3::Constant(pad);
  double cells = 1.0;
  for (int a = 0; a < 3; ++a) {
    g.dims[a] = static_cast<std::size_t>(std::ceil((bounds.max[a] + pad - g.origin[a]) / spacing)) + 1;
    cells *= static_cast<double>(g.dims[a]);
  }
  if (cells > 2e9) throw DomainError("grid too large; increase the spacing");
  g.values.assign(g.size(), 0.0);
  return g;
}

ScalarGrid occupancy_map(std::span<const Positions> conformers, std::span<const double> radii, double spacing,
                         RadiusMode mode, double fixed_radius) {
  if (conformers.empty()) throw DomainError("occupancy map needs at least one conformer");
  std::vector<double> r(radii.begin(), radii.end());
  if (mode == RadiusMode::kFixed) {
    if (!(fixed_radius > 0.0)) throw DomainError("fixed radius must be positive");
    r.assign(conformers.front().size(), fixed_radius);
  }
  Bounds box;
  double r_max = 0.0;
  for (const auto& c : conformers) {
    if (c.size() != r.size()) throw DomainError("conformer atom count does not match the radii");
    for (const auto& p : c) box.extend(p);
  }
  for (double x : r) {
    if (!(x > 0.0)) throw DomainError("occupancy needs positive radii");
    r_max = std::max(r_max, x);
  }
  ScalarGrid g = bounding_grid(box, r_max + spacing, spacing);
  std::vector<std::uint32_t> count(g.size(), 0);
  std::vector<std::uint32_t> stamp(g.size(), 0);
  for (std::size_t c = 0; c < conformers.size(); ++c) {
    const auto tag = static_cast<std::uint32_t>(c + 1);
    for (std::size_t i = 0; i < r.size(); ++i) {
      const Vec3& p = conformers[c][i];
      const double r2 = r[i] * r[i];
      std::array<std::size_t, 3> lo{}, hi{};
      for (int a = 0; a < 3; ++a) {
        const double l = std::floor((p[a] - r[i] - g.origin[a]) / spacing);
        const double h = std::ceil((p[a] + r[i] - g.origin[a]) / spacing);
        lo[a] = static_cast<std::size_t>(std::max(0.0, l));
        hi[a] = std::min(g.dims[a] - 1, static_cast<std::size_t>(std::max(0.0, h)));
      }
      for (std::size_t z = lo[2]; z <= hi[2]; ++z) {
        for (std::size_t y = lo[1]; y <= hi[1]; ++y) {
          for (std::size_t x = lo[0]; x <= hi[0]; ++x) {
            const std::size_t idx = g.index(x, y, z);
            if (stamp[idx] == tag) continue;
            if ((g.point(x, y, z) - p).squaredNorm() < r2) {
              stamp[idx] = tag;
              ++count[idx];
            }
          }
        }
      }
    }
  }
  const double n = static_cast<double>(conformers.size());
  for (std::size_t k = 0; k < g.size(); ++k) g.values[k] = static_cast<double>(count[k]) / n;
  return g;
}

GridStatistics grid_statistics(std::span<const ScalarGrid> grids) {
  if (grids.empty()) throw DomainError("grid statistics need at least one grid");
  for (const auto& g : grids) {
    g.validate();
    if (!g.same_geometry(grids.front())) throw DomainError("grids differ in origin, spacing or dimensions");
  }
  GridStatistics out{grids.front(), grids.front()};
  const double n = static_cast<double>(grids.size());
  for (std::size_t k = 0; k < out.mean.size(); ++k) {
    // Shifted by the first grid so identical inputs give exact zeros.
    const double base = grids.front().values[k];
    CompensatedSum s;
    for (const auto& g : grids) s += g.values[k] - base;
    const double shift = s.value() / n;
    CompensatedSum sq;
    for (const auto& g : grids) sq += (g.values[k] - base - shift) * (g.values[k] - base - shift);
    out.mean.values[k] = base + shift;
    out.std.values[k] = std::sqrt(sq.value() / n);
  }
  return out;
}

std::string write_grid(const ScalarGrid& g) {
  g.validate();
  const auto [nx, ny, nz] = g.dims;
  std::string out;
  const std::string counts = std::to_string(nx) + " " + std::to_string(ny) + " " + std::to_string(nz);
  out += "object 1 class gridpositions counts " + counts + "\n";
  out += "origin " + shortest(g.origin.x()) + " " + shortest(g.origin.y()) + " " + shortest(g.origin.z()) + "\n";
  const std::string h = shortest(g.spacing);
  out += "delta " + h + " 0 0\n";
  out += "delta 0 " + h + " 0\n";
  out += "delta 0 0 " + h + "\n";
  out += "object 2 class gridconnections counts " + counts + "\n";
  out += "object 3 class array type double rank 0 items " + std::to_string(g.size()) + " data follows\n";
  std::size_t on_line = 0;
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      for (std::size_t k = 0; k < nz; ++k) {
        if (on_line > 0) out += ' ';
        out += sig6(g.values[g.index(i, j, k)]);
        if (++on_line == 3) {
          out += '\n';
          on_line = 0;
        }
      }
    }
  }
  if (on_line > 0) out += '\n';
  out += "attribute \"dep\" string \"positions\"\n";
  out += "object \"regular positions regular connections\" class field\n";
  out += "component \"positions\" value 1\n";
  out += "component \"connections\" value 2\n";
  out += "component \"data\" value 3\n";
  return out;
}

ScalarGrid read_grid(std::string_view text) {
  LineReader in(text);
  std::string_view line;
  auto expect_line = [&](const char* what) {
    if (!in.next(line)) throw ParseError(std::string("unexpected end of grid file, expected ") + what, in.line_no());
    return split(line);
  };

  ScalarGrid g;
  auto w = expect_line("gridpositions");
  if (w.size() != 8 || w[0] != "object" || w[2] != "class" || w[3] != "gridpositions" || w[4] != "counts") {
    throw ParseError("expected 'object 1 class gridpositions counts nx ny nz'", in.line_no());
  }
  for (int a = 0; a < 3; ++a) g.dims[a] = to_count(w[5 + a], in.line_no());

  w = expect_line("origin");
  if (w.size() != 4 || w[0] != "origin") throw ParseError("expected 'origin x y z'", in.line_no());
  for (int a = 0; a < 3; ++a) g.origin[a] = to_double(w[1 + a], in.line_no());

  for (int a = 0; a < 3; ++a) {
    w = expect_line("delta");
    if (w.size() != 4 || w[0] != "delta") throw ParseError("expected 'delta dx dy dz'", in.line_no());
    for (int b = 0; b < 3; ++b) {
      const double v = to_double(w[1 + b], in.line_no());
      if (b != a && v != 0.0) throw ParseError("only axis-aligned grids are supported", in.line_no());
      if (b == a) {
        if (a == 0) g.spacing = v;
        if (v != g.spacing || !(v > 0.0)) throw ParseError("grid spacing must be positive and isotropic", in.line_no());
      }
    }
  }

  w = expect_line("gridconnections");
  if (w.size() != 8 || w[3] != "gridconnections") throw ParseError("expected gridconnections object", in.line_no());
  for (int a = 0; a < 3; ++a) {
    if (to_count(w[5 + a], in.line_no()) != g.dims[a]) {
      throw ParseError("gridconnections counts disagree with gridpositions", in.line_no());
    }
  }

  w = expect_line("array");
  const auto items_at = std::find(w.begin(), w.end(), "items");
  if (w.size() < 4 || w[3] != "array" || items_at == w.end() || items_at + 1 == w.end()) {
    throw ParseError("expected 'object 3 class array ... items N data follows'", in.line_no());
  }
  const std::size_t items = to_count(*(items_at + 1), in.line_no());
  if (items != g.size()) {
    throw ParseError("array declares " + std::to_string(items) + " items but dims give " + std::to_string(g.size()),
                     in.line_no());
  }

  std::vector<double> flat;
  flat.reserve(items);
  while (flat.size() < items) {
    w = expect_line("grid values");
    if (w.front() == "attribute" || w.front() == "object") {
      throw ParseError("grid ends after " + std::to_string(flat.size()) + " of " + std::to_string(items) + " values",
                       in.line_no());
    }
    for (const auto& s : w) {
      if (flat.size() == items) throw ParseError("more grid values than declared", in.line_no());
      flat.push_back(to_double(s, in.line_no()));
    }
  }
  g.values.assign(g.size(), 0.0);
  std::size_t k = 0;
  for (std::size_t i = 0; i < g.dims[0]; ++i) {
    for (std::size_t j = 0; j < g.dims[1]; ++j) {
      for (std::size_t z = 0; z < g.dims[2]; ++z) g.values[g.index(i, j, z)] = flat[k++];
    }
  }
  // Trailing records (attribute/field objects) are accepted but not interpreted.
  while (in.next(line)) {
    const auto t = split(line);
    if (t.front() != "attribute" && t.front() != "object" && t.front() != "component") {
      throw ParseError("unexpected content after grid values", in.line_no());
    }
  }
  return g;
}

Palette parse_palette(std::string_view name) {
  if (name == "green_white_red") return Palette::kGreenWhiteRed;
  if (name == "rainbow") return Palette::kRainbow;
  throw DomainError("unknown palette '" + std::string(name) + "' (use green_white_red or rainbow)");
}

Rgb palette_color(Palette p, double x) {
  if (!std::isfinite(x)) throw DomainError("palette position must be finite");
  return p == Palette::kGreenWhiteRed ? interpolate(kGreenWhiteRed, x) : interpolate(kRainbow, x);
}

ColormapExport colormap_export(std::span<const int> keys, std::span<const double> values, Palette palette,
                               std::string_view object) {
  if (keys.size() != values.size()) throw DomainError("colormap needs one value per key");
  double lo = 0.0, hi = 0.0;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k])) throw DomainError("colormap values must be finite");
    lo = k == 0 ? values[k] : std::min(lo, values[k]);
    hi = k == 0 ? values[k] : std::max(hi, values[k]);
  }
  ColormapExport out;
  out.csv = "key,value,r,g,b\n";
  for (std::size_t k = 0; k < keys.size(); ++k) {
    const double x = hi > lo ? (values[k] - lo) / (hi - lo) : 0.5;
    const Rgb c = palette_color(palette, x);
    const std::string rgb = std::to_string(c.r) + "," + std::to_string(c.g) + "," + std::to_string(c.b);
    out.csv += std::to_string(keys[k]) + "," + shortest(values[k]) + "," + rgb + "\n";
    const std::string name = "mc_" + std::to_string(k);
    out.script += "set_color " + name + ", [" + std::to_string(c.r) + ", " + std::to_string(c.g) + ", " +
                  std::to_string(c.b) + "]\n";
    out.script += "color " + name + ", (" + std::string(object) + ") and id " + std::to_string(keys[k]) + "\n";
  }
  return out;
}

}  // namespace molcert
