#include "molcert/theory_bounds.hpp"

#include "molcert/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace molcert {
namespace {

double inv_pow(double s2, double b) { return std::pow(s2, -0.5 * b); }

void check_t(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("tail bound needs a finite t >= 0");
}

double capped_tail(double exponent) { return std::min(1.0, 2.0 * std::exp(exponent)); }

}  // namespace

void KernelSpec::validate() const {
  if (terms.empty()) throw DomainError("kernel needs at least one term");
  for (const auto& t : terms) {
    if (!std::isfinite(t.a) || !std::isfinite(t.b) || t.b < 0.0) {
      throw DomainError("kernel terms need finite a and b >= 0");
    }
  }
}

double KernelSpec::evaluate(double norm) const {
  double s = 0.0;
  for (const auto& t : terms) s += t.a * std::pow(norm, -t.b);
  return s;
}

void BoxDomain::validate_positive() const {
  if (intervals.empty()) throw DomainError("box needs at least one coordinate");
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    const auto& iv = intervals[i];
    if (!(iv.lower > 0.0) || !(iv.lower <= iv.upper) || !std::isfinite(iv.upper)) {
      throw DomainError("coordinate " + std::to_string(i) + " needs 0 < lower <= upper");
    }
  }
}

std::pair<double, double> d1_bound(double a, double b, const BoxDomain& box2d) {
  if (box2d.dimension() != 2) throw DomainError("d1_bound needs a two-dimensional box");
  return {d2_bound(a, b, box2d, 0), d2_bound(a, b, box2d, 1)};
}

double d2_bound(double a, double b, const BoxDomain& box, std::size_t i) {
  box.validate_positive();
  if (i >= box.dimension()) throw DomainError("coordinate index out of range");
  if (b < 0.0) throw DomainError("kernel exponent must be >= 0");
  double lower2 = 0.0;
  for (const auto& iv : box.intervals) lower2 += iv.lower * iv.lower;
  const auto& iv = box.intervals[i];
  const double moved2 = lower2 - iv.lower * iv.lower + iv.upper * iv.upper;
  return std::abs(a) * (inv_pow(lower2, b) - inv_pow(moved2, b));
}

double d3_bound(const KernelSpec& spec, const BoxDomain& box, std::size_t i) {
  spec.validate();
  double worst = 0.0;
  for (const auto& t : spec.terms) worst = std::max(worst, d2_bound(t.a, t.b, box, i));
  return static_cast<double>(spec.terms.size()) * worst;
}

std::vector<double> d3_bounds(const KernelSpec& spec, const BoxDomain& box) {
  std::vector<double> out(box.dimension());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = d3_bound(spec, box, i);
  return out;
}

double mcdiarmid_tail(std::span<const double> deviations, double t) {
  check_t(t);
  double sum = 0.0;
  for (double d : deviations) {
    if (!(d >= 0.0) || !std::isfinite(d)) throw DomainError("bounded differences must be finite and >= 0");
    sum += d * d;
  }
  if (sum == 0.0) return t > 0.0 ? 0.0 : 1.0;
  return capped_tail(-2.0 * t * t / sum);
}

double azuma_tail(const AzumaSpec& spec, double t) {
  check_t(t);
  double sum = 0.0;
  for (double c : spec.c) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("martingale differences must be finite and >= 0");
    sum += c * c;
  }
  if (sum == 0.0) return t > 0.0 ? 0.0 : 1.0;
  return capped_tail(-t * t / (2.0 * sum));
}

BoxDomain difference_box(const BoxDomain& first, const BoxDomain& second) {
  if (first.dimension() != second.dimension() || first.dimension() == 0) {
    throw DomainError("difference box needs boxes of equal, non-zero dimension");
  }
  BoxDomain out;
  for (std::size_t i = 0; i < first.dimension(); ++i) {
    const auto& p = first.intervals[i];
    const auto& q = second.intervals[i];
    if (p.lower > p.upper || q.lower > q.upper) throw DomainError("interval with lower > upper");
    Interval d{q.lower - p.upper, q.upper - p.lower};
    if (d.upper < 0.0) d = {-d.upper, -d.lower};
    if (!(d.lower > 0.0)) {
      throw DomainError("coordinate " + std::to_string(i) + " difference interval contains 0");
    }
    out.intervals.push_back(d);
  }
  return out;
}

double pairwise_sum_variance(const KernelSpec& spec, std::span<const BoxDomain> boxes_a,
                             std::span<const BoxDomain> boxes_b) {
  spec.validate();
  if (boxes_a.empty() || boxes_b.empty()) throw DomainError("pairwise sum needs two non-empty point sets");
  double sum = 0.0;
  for (const auto& p : boxes_a) {
    for (const auto& q : boxes_b) {
      for (double d : d3_bounds(spec, difference_box(p, q))) sum += d * d;
    }
  }
  return sum;
}

double pairwise_sum_tail(const KernelSpec& spec, std::span<const BoxDomain> boxes_a,
                         std::span<const BoxDomain> boxes_b, double t) {
  check_t(t);
  const double var = pairwise_sum_variance(spec, boxes_a, boxes_b);
  if (var == 0.0) return t > 0.0 ? 0.0 : 1.0;
  return capped_tail(-2.0 * t * t / var);
}

void DiscreteJoint::normalize() {
  if (x.empty() || y.empty() || weights.size() != x.size() * y.size()) {
    throw DomainError("joint weights must form an |x| by |y| grid");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw DomainError("joint weights must be finite and >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw DomainError("joint density has zero mass");
  for (double& w : weights) w /= total;
}

DiscreteJoint discretize_gaussian(double mean_x, double mean_y, double sigma_x, double sigma_y, double rho,
                                  std::size_t n, double span) {
  if (!(sigma_x > 0.0 && sigma_y > 0.0)) throw DomainError("Gaussian widths must be positive");
  if (!(rho > -1.0 && rho < 1.0)) throw DomainError("correlation must lie in (-1, 1)");
  if (n < 2 || !(span > 0.0)) throw DomainError("grid needs n >= 2 and span > 0");
  DiscreteJoint j;
  for (std::size_t k = 0; k < n; ++k) {
    const double s = span * (2.0 * static_cast<double>(k) / static_cast<double>(n - 1) - 1.0);
    j.x.push_back(mean_x + sigma_x * s);
    j.y.push_back(mean_y + sigma_y * s);
  }
  j.weights.resize(n * n);
  const double q = 1.0 - rho * rho;
  for (std::size_t ix = 0; ix < n; ++ix) {
    const double zx = (j.x[ix] - mean_x) / sigma_x;
    for (std::size_t iy = 0; iy < n; ++iy) {
      const double zy = (j.y[iy] - mean_y) / sigma_y;
      j.weights[ix * n + iy] = std::exp(-(zx * zx - 2.0 * rho * zx * zy + zy * zy) / (2.0 * q));
    }
  }
  j.normalize();
  return j;
}

ConditionalBound estimate_conditional_c(const std::function<double(double, double)>& f, const DiscreteJoint& joint) {
  DiscreteJoint p = joint;
  p.normalize();
  const std::size_t nx = p.x.size(), ny = p.y.size();

  // Rows with zero marginal mass are outside the support.
  std::vector<double> px(nx, 0.0);
  std::vector<std::size_t> rows;
  for (std::size_t ix = 0; ix < nx; ++ix) {
    for (std::size_t iy = 0; iy < ny; ++iy) px[ix] += p.weight(ix, iy);
    if (px[ix] > 0.0) rows.push_back(ix);
  }
  if (rows.empty()) throw DomainError("every conditional slice has zero mass");

  // f on (x', y) for support rows x' and every y with mass in some row.
  std::vector<char> y_used(ny, 0);
  for (std::size_t ix : rows) {
    for (std::size_t iy = 0; iy < ny; ++iy) y_used[iy] |= p.weight(ix, iy) > 0.0;
  }
  std::vector<double> fv(nx * ny, 0.0);
  for (std::size_t ix : rows) {
    for (std::size_t iy = 0; iy < ny; ++iy) {
      if (!y_used[iy]) continue;
      const double v = f(p.x[ix], p.y[iy]);
      if (!std::isfinite(v)) throw DomainError("kernel is not finite on the joint support");
      fv[ix * ny + iy] = v;
    }
  }

  // cond[a][b] = E[f(x_b, Y) | X = x_a].
  const std::size_t m = rows.size();
  std::vector<double> cond(m * m, 0.0);
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t ix = rows[a];
    for (std::size_t b = 0; b < m; ++b) {
      const std::size_t jx = rows[b];
      double s = 0.0;
      for (std::size_t iy = 0; iy < ny; ++iy) {
        const double w = p.weight(ix, iy);
        if (w > 0.0) s += w * fv[jx * ny + iy];
      }
      cond[a * m + b] = s / px[ix];
    }
  }

  ConditionalBound out;
  double b0 = 0.0;
  for (std::size_t a = 0; a < m; ++a) b0 += px[rows[a]] * cond[a * m + a];
  for (std::size_t a = 0; a < m; ++a) {
    const std::size_t ix = rows[a];
    out.martingale = std::max(out.martingale, std::abs(cond[a * m + a] - b0));
    for (std::size_t iy = 0; iy < ny; ++iy) {
      if (!(p.weight(ix, iy) > 0.0)) continue;
      const double here = fv[ix * ny + iy];
      out.martingale = std::max(out.martingale, std::abs(here - cond[a * m + a]));
      for (std::size_t b = 0; b < m; ++b) out.conditional = std::max(out.conditional, std::abs(cond[a * m + b] - here));
    }
  }
  out.c = std::max(out.conditional, out.martingale);
  return out;
}

double dependent_tail(const ConditionalBound& c, double t) { return azuma_tail(AzumaSpec{{c.c, c.c}}, t); }

}  // namespace molcert
