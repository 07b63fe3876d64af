#pragma once

// Plain double loops over atom pairs, written from the energy formulas
// without reusing any library helper.

#include "molcert/geometry.hpp"

#include <cmath>
#include <vector>

namespace molcert::oracle {

inline constexpr double kC = 332.0636;

inline double dist(const Vec3& a, const Vec3& b) {
  const double dx = a.x() - b.x(), dy = a.y() - b.y(), dz = a.z() - b.z();
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

inline double lj_pair(double ai, double bi, double aj, double bj, double r) {
  if (ai <= 0 || bi <= 0 || aj <= 0 || bj <= 0) return 0.0;
  const double ei = bi * bi / (4 * ai), ej = bj * bj / (4 * aj);
  const double ri = std::pow(2 * ai / bi, 1.0 / 6), rj = std::pow(2 * aj / bj, 1.0 / 6);
  const double eps = std::sqrt(ei * ej);
  const double rs = (ri + rj) / 2;
  const double a = eps * std::pow(rs, 12), b = 2 * eps * std::pow(rs, 6);
  return a / std::pow(r, 12) - b / std::pow(r, 6);
}

/// `skip(i, j)` filters pairs (e.g. bonded neighbours).
template <typename Skip>
double lj_all_pairs(const std::vector<Vec3>& x, const std::vector<double>& a, const std::vector<double>& b, Skip skip) {
  long double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      if (!skip(i, j)) s += lj_pair(a[i], b[i], a[j], b[j], dist(x[i], x[j]));
  return static_cast<double>(s);
}

inline double lj_cross(const std::vector<Vec3>& xa, const std::vector<double>& aa, const std::vector<double>& ba,
                       const std::vector<Vec3>& xb, const std::vector<double>& ab, const std::vector<double>& bb) {
  long double s = 0;
  for (std::size_t i = 0; i < xa.size(); ++i)
    for (std::size_t j = 0; j < xb.size(); ++j) s += lj_pair(aa[i], ba[i], ab[j], bb[j], dist(xa[i], xb[j]));
  return static_cast<double>(s);
}

template <typename Skip>
double coulomb_all_pairs(const std::vector<Vec3>& x, const std::vector<double>& q, bool distance_dependent,
                         double value, Skip skip) {
  long double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      if (skip(i, j)) continue;
      const double r = dist(x[i], x[j]);
      const double eps = distance_dependent ? value * r : value;
      s += kC * q[i] * q[j] / (eps * r);
    }
  return static_cast<double>(s);
}

inline double coulomb_cross(const std::vector<Vec3>& xa, const std::vector<double>& qa, const std::vector<Vec3>& xb,
                            const std::vector<double>& qb, double eps0) {
  long double s = 0;
  for (std::size_t i = 0; i < xa.size(); ++i)
    for (std::size_t j = 0; j < xb.size(); ++j) s += kC * qa[i] * qb[j] / (eps0 * dist(xa[i], xb[j]));
  return static_cast<double>(s);
}

inline std::vector<double> born(const std::vector<Vec3>& x, const std::vector<double>& rho, double rmax = 30.0) {
  std::vector<double> out;
  for (std::size_t i = 0; i < x.size(); ++i) {
    long double inv = 1.0L / rho[i];
    for (std::size_t j = 0; j < x.size(); ++j) {
      if (j == i) continue;
      const double r = dist(x[i], x[j]);
      inv -= (4.0L / 3 * kPi * rho[j] * rho[j] * rho[j]) / (4 * kPi * r * r * r * r);
    }
    double R = inv > 1.0L / rmax ? static_cast<double>(1.0L / inv) : rmax;
    if (R < rho[i] / 2) R = rho[i] / 2;
    out.push_back(R);
  }
  return out;
}

inline double gb(const std::vector<Vec3>& x, const std::vector<double>& q, const std::vector<double>& R, double eps) {
  long double s = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) {
      const double r = dist(x[i], x[j]);
      s += q[i] * q[j] / std::sqrt(r * r + R[i] * R[j] * std::exp(-r * r / (4 * R[i] * R[j])));
    }
  return -(1 - 1 / eps) / 2 * kC * static_cast<double>(s);
}

}  // namespace molcert::oracle
