#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace molcert {

/// One term a / ||x||^b of a decaying kernel.
struct KernelTerm {
  double a = 1.0;
  double b = 1.0;
};

/// sum_k a_k / ||x||^b_k. Throws DomainError when empty or some b_k < 0.
struct KernelSpec {
  std::vector<KernelTerm> terms;

  void validate() const;
  double evaluate(double norm) const;
};

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Per-coordinate intervals. Closed-form bounds require 0 < lower <= upper.
struct BoxDomain {
  std::vector<Interval> intervals;

  std::size_t dimension() const { return intervals.size(); }
  /// Throws DomainError unless every interval has 0 < lower <= upper.
  void validate_positive() const;
};

struct AzumaSpec {
  std::vector<double> c;
};

/// Maximum change of a / (x^2 + y^2)^(b/2) caused by x (resp. y) moving across
/// its interval: |a| (1/(lx^2+ly^2)^(b/2) - 1/(ux^2+ly^2)^(b/2)).
std::pair<double, double> d1_bound(double a, double b, const BoxDomain& box2d);

/// d-dimensional analogue for coordinate i, evaluated at the all-lower corner.
double d2_bound(double a, double b, const BoxDomain& box, std::size_t i);

/// n * max_k d2_bound(a_k, b_k, box, i) for an n-term kernel.
double d3_bound(const KernelSpec& spec, const BoxDomain& box, std::size_t i);

/// All per-coordinate d3 deviations of `box`.
std::vector<double> d3_bounds(const KernelSpec& spec, const BoxDomain& box);

/// McDiarmid: min(1, 2 exp(-2 t^2 / sum D_i^2)); 0 when every D_i is 0.
double mcdiarmid_tail(std::span<const double> deviations, double t);

/// Azuma: min(1, 2 exp(-t^2 / (2 sum c_i^2))); 0 when every c_i is 0.
double azuma_tail(const AzumaSpec& spec, double t);

/// Interval of x2_i - x1_i mapped to positive values (mirrored when entirely
/// negative). Throws DomainError when it contains 0.
BoxDomain difference_box(const BoxDomain& first, const BoxDomain& second);

/// Sum over (x1, x2) in A x B of sum_i D3_i(dx)^2, where dx is the
/// difference box of each pair.
double pairwise_sum_variance(const KernelSpec& spec, std::span<const BoxDomain> boxes_a,
                             std::span<const BoxDomain> boxes_b);

/// 2 exp(-2 t^2 / pairwise_sum_variance), capped at 1. A fixed partner point
/// is a degenerate box with lower == upper.
double pairwise_sum_tail(const KernelSpec& spec, std::span<const BoxDomain> boxes_a,
                         std::span<const BoxDomain> boxes_b, double t);

/// Joint density of (X, Y) discretized on a tensor grid; weights[ix * ny + iy].
struct DiscreteJoint {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> weights;

  double weight(std::size_t ix, std::size_t iy) const { return weights[ix * y.size() + iy]; }
  /// Throws DomainError for negative weights, size mismatch or zero total
  /// mass; rescales to total mass 1.
  void normalize();
};

/// Discretized bivariate normal on an n x n grid spanning mean +- span sigma.
DiscreteJoint discretize_gaussian(double mean_x, double mean_y, double sigma_x, double sigma_y, double rho,
                                  std::size_t n = 64, double span = 3.0);

struct ConditionalBound {
  /// max over (x, x', y) in the support of |E_{Y|X=x}[f(x', Y)] - f(x, y)|.
  double conditional = 0.0;
  /// max of the two Doob martingale increments |B1 - B0| and |B2 - B1|.
  double martingale = 0.0;
  /// max of the two; a valid bounded-difference constant for both steps.
  double c = 0.0;
};

/// Bounded-difference constant of the two-step Doob martingale of f(X, Y)
/// for a dependent (X, Y). Throws DomainError on a zero-mass conditional
/// slice that is needed, or when f is not finite on the support.
ConditionalBound estimate_conditional_c(const std::function<double(double, double)>& f, const DiscreteJoint& joint);

/// Azuma bound for the two-step martingale with constant c.
double dependent_tail(const ConditionalBound& c, double t);

}  // namespace molcert
