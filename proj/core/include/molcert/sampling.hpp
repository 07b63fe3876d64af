#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace molcert {

/// Scrambled low-discrepancy point stream in [0,1)^d.
///
/// Dimensions up to sobol_max_dimension() use a Sobol sequence (Joe-Kuo
/// direction numbers, Gray-code order) randomized by a linear matrix scramble
/// and a digital shift. Larger dimensions fall back to a Halton sequence with
/// random linear digit scrambling. The stream is a pure function of
/// (dimension, seed, index).
class LowDiscrepancySequence {
 public:
  enum class Kind { kSobol, kHalton };

  /// Throws DomainError when dimension == 0.
  LowDiscrepancySequence(std::size_t dimension, std::uint64_t seed);

  std::size_t dimension() const { return dim_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t index() const { return index_; }
  Kind kind() const { return kind_; }

  /// Returns the point at index() and advances the index by one.
  std::vector<double> next();
  void next(std::span<double> out);

  /// Point at an arbitrary index; does not move the stream.
  void point_at(std::uint64_t index, std::span<double> out) const;

  void reset(std::uint64_t index = 0) { index_ = index; }

  static std::size_t sobol_max_dimension();

 private:
  void sobol_point(std::uint64_t index, std::span<double> out) const;
  void halton_point(std::uint64_t index, std::span<double> out) const;

  std::size_t dim_;
  std::uint64_t seed_;
  std::uint64_t index_ = 0;
  Kind kind_;
  // Sobol: 32 scrambled direction numbers per dimension plus a shift.
  std::vector<std::uint32_t> directions_;
  std::vector<std::uint32_t> shift_;
  // Halton: base, digit multiplier and digit offset per dimension.
  std::vector<std::uint32_t> bases_;
  std::vector<std::uint32_t> mult_;
  std::vector<std::uint32_t> offset_;
};

/// Point `index` of the plain (unrandomized) Sobol sequence in Gray-code
/// order, in dimension out.size() <= LowDiscrepancySequence::sobol_max_dimension().
void sobol_unscrambled_point(std::uint64_t index, std::span<double> out);

/// Uniform pseudo-random stream with the same interface, for comparisons
/// against plain Monte Carlo. Each point is derived from (seed, index) alone.
class PseudoRandomSequence {
 public:
  PseudoRandomSequence(std::size_t dimension, std::uint64_t seed);
  std::size_t dimension() const { return dim_; }
  void point_at(std::uint64_t index, std::span<double> out) const;
  std::vector<double> next();

 private:
  std::size_t dim_;
  std::uint64_t seed_;
  std::uint64_t index_ = 0;
};

/// Standard deviation (A) of the Gaussian positional error for B-factor `b`
/// (A^2): sqrt(b / (8 pi^2)). Throws DomainError for b < 0.
double sigma_from_b(double b);

/// Inverse of sigma_from_b: 8 pi^2 sigma^2.
double b_from_sigma(double sigma);

/// SplitMix64 finalizer; used to derive independent seeds.
std::uint64_t mix_seed(std::uint64_t x);

struct GaussianMarginal {
  double mean = 0.0;
  double sigma = 1.0;
};

struct UniformMarginal {
  double lower = 0.0;
  double upper = 1.0;
};

using MarginalSpec = std::variant<GaussianMarginal, UniformMarginal>;

/// Box-Muller transform. Requires u1 in (0,1] and u2 in [0,1).
std::pair<double, double> box_muller(double u1, double u2);

/// lower + u (upper - lower).
double map_marginal(double u, const UniformMarginal& m);

/// mean + sigma z1 where (z1, z2) = box_muller(u1, u2).
double map_marginal(double u1, double u2, const GaussianMarginal& m);

/// Unit-cube coordinates a marginal consumes: 2 for Gaussian, 1 for uniform.
std::size_t unit_width(const MarginalSpec& m);

/// Consumes unit_width(m) leading coordinates of `u`.
double map_marginal(std::span<const double> u, const MarginalSpec& m);

/// Maps a unit-cube point to standard normals, two coordinates per pair:
/// z[2k], z[2k+1] = box_muller(1 - u[2k], u[2k+1]). Returns `count` values;
/// needs gaussian_unit_dimension(count) coordinates.
std::vector<double> gaussians_from_unit(std::span<const double> u, std::size_t count);
std::size_t gaussian_unit_dimension(std::size_t count);

/// Maximum over a resolution^d grid of anchored boxes [0, g/resolution) of
/// |fraction of points inside - box volume|.
double star_discrepancy_estimate(std::span<const std::vector<double>> points, std::size_t resolution);

/// Default grid resolution: 64 for d <= 3, 16 otherwise.
std::size_t default_discrepancy_resolution(std::size_t dimension);

/// Exact star discrepancy of a one-dimensional point set.
double star_discrepancy_1d(std::vector<double> points);

struct SampleBudget {
  boost::multiprecision::cpp_int naive;  ///< m^d with m = ceil((d/eps)^3)
  boost::multiprecision::cpp_int lds;    ///< ceil((d/eps)^sqrt(log2(1/eps)))
  double log10_naive = 0.0;
  double log10_lds = 0.0;
};

/// Sample counts for a uniform grid versus a low-discrepancy design to reach
/// accuracy eps in dimension d. Constants are illustrative.
SampleBudget sample_budget(std::size_t d, double eps);

}  // namespace molcert
