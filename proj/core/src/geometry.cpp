#include "molcert/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace molcert {

double dihedral_angle(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
  const Vec3 b1 = b - a;
  const Vec3 b2 = c - b;
  const Vec3 b3 = d - c;
  const Vec3 n1 = b1.cross(b2);
  const Vec3 n2 = b2.cross(b3);
  // Positive for a right-handed turn of d about b->c.
  return std::atan2(b2.normalized().dot(n1.cross(n2)), n1.dot(n2));
}

Vec3 rotate_about_axis(const Vec3& p, const Vec3& origin, const Vec3& axis, double angle) {
  const Eigen::AngleAxisd rot(angle, axis);
  return origin + rot * (p - origin);
}

CellList::CellList(std::span<const Vec3> points, double cell_size) : cell_size_(cell_size) {
  Bounds b;
  for (const auto& p : points) b.extend(p);
  origin_ = b.empty() ? Vec3::Zero() : b.min;
  if (!b.empty()) {
    for (int a = 0; a < 3; ++a) {
      dims_[a] = std::max<long>(1, static_cast<long>(std::floor((b.max[a] - b.min[a]) / cell_size_)) + 1);
    }
  }
  const std::size_t ncell = static_cast<std::size_t>(dims_[0] * dims_[1] * dims_[2]);
  std::vector<std::size_t> cell_of_point(points.size());
  start_.assign(ncell + 1, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto c = cell_of(points[i]);
    cell_of_point[i] = static_cast<std::size_t>(c[0] + dims_[0] * (c[1] + dims_[1] * c[2]));
    ++start_[cell_of_point[i] + 1];
  }
  for (std::size_t c = 0; c < ncell; ++c) start_[c + 1] += start_[c];
  order_.resize(points.size());
  std::vector<std::size_t> fill(start_.begin(), start_.end() - 1);
  for (std::size_t i = 0; i < points.size(); ++i) order_[fill[cell_of_point[i]]++] = i;
}

std::array<long, 3> CellList::cell_of(const Vec3& p) const {
  std::array<long, 3> c{};
  for (int a = 0; a < 3; ++a) {
    const double f = std::floor((p[a] - origin_[a]) / cell_size_);
    // Clamp far-away query points to the nearest boundary cell (candidate
    // sets stay supersets because distances are checked by the caller).
    c[a] = static_cast<long>(std::clamp(f, -2.0, static_cast<double>(dims_[a] + 1)));
  }
  return c;
}

}  // namespace molcert
