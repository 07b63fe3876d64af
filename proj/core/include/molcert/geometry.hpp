#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace molcert {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Positions = std::vector<Vec3>;

inline constexpr double kPi = 3.14159265358979323846;

/// Neumaier-compensated accumulator. Sums in a fixed order are reproducible
/// bit-for-bit regardless of how the caller schedules work.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  CompensatedSum& operator+=(double x) noexcept {
    add(x);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Dihedral angle (radians, in (-pi, pi]) defined by four points.
double dihedral_angle(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

/// Rotates `p` by `angle` radians about the axis through `origin` along unit `axis`.
Vec3 rotate_about_axis(const Vec3& p, const Vec3& origin, const Vec3& axis, double angle);

/// Axis-aligned bounds of a point set; empty input yields min > max.
struct Bounds {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  bool empty() const { return (min.array() > max.array()).any(); }
};

/// Uniform-cell spatial hash for fixed-radius neighbour queries.
class CellList {
 public:
  CellList(std::span<const Vec3> points, double cell_size);

  /// Calls `fn(j)` for every point j whose cell is within one cell of `p`.
  /// Candidates are a superset of the points within `cell_size` of `p`;
  /// the visiting order is deterministic.
  template <typename Fn>
  void for_each_candidate(const Vec3& p, Fn&& fn) const {
    const auto c = cell_of(p);
    for (long dx = -1; dx <= 1; ++dx) {
      for (long dy = -1; dy <= 1; ++dy) {
        for (long dz = -1; dz <= 1; ++dz) {
          const long x = c[0] + dx, y = c[1] + dy, z = c[2] + dz;
          if (x < 0 || y < 0 || z < 0 || x >= dims_[0] || y >= dims_[1] || z >= dims_[2]) continue;
          const std::size_t cell = static_cast<std::size_t>(x + dims_[0] * (y + dims_[1] * z));
          for (std::size_t k = start_[cell]; k < start_[cell + 1]; ++k) fn(order_[k]);
        }
      }
    }
  }

  std::size_t size() const { return order_.size(); }

 private:
  std::array<long, 3> cell_of(const Vec3& p) const;

  double cell_size_;
  Vec3 origin_;
  std::array<long, 3> dims_{1, 1, 1};
  std::vector<std::size_t> start_;
  std::vector<std::size_t> order_;
};

}  // namespace molcert
