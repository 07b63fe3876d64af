#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace molcert {

/// Values of one QOI over an ensemble with population statistics.
struct EmpiricalDistribution {
  std::vector<double> values;
  double mean = 0.0;
  double std = 0.0;  ///< population standard deviation

  /// Throws DomainError for an empty list.
  static EmpiricalDistribution from(std::vector<double> values);
  std::size_t count() const { return values.size(); }
};

/// Relative-error thresholds used throughout the results tables.
std::vector<double> default_t_values();

struct CertificateTable {
  std::vector<double> t_values;
  /// epsilon(t) = fraction of values with |x - mean| / |mean| > t.
  std::vector<double> epsilons;
};

/// Throws DomainError when the mean is zero, the distribution is empty, or
/// t_values are not positive and strictly ascending.
CertificateTable chernoff_table(const EmpiricalDistribution& d, std::span<const double> t_values);

/// (x0 - mean) / std. Throws DomainError when std == 0.
double zscore(double x0, const EmpiricalDistribution& d);

struct HypercubeDistance {
  enum class Method { kExact, kTabulated, kMonteCarlo };
  double value = 0.0;
  double std_error = 0.0;
  Method method = Method::kExact;
};

/// Mean distance between two independent uniform points of [0,1]^d: closed
/// forms for d <= 3, the tabulated 0.9689 for d = 6, otherwise a Monte-Carlo
/// estimate from 10^6 pairs with a fixed seed.
HypercubeDistance expected_hypercube_distance(std::size_t d);

/// Monte-Carlo estimate of the same quantity with its standard error.
HypercubeDistance hypercube_distance_mc(std::size_t d, std::size_t pairs, std::uint64_t seed);

enum class SaturationMode { kIncremental, kFull };

/// How the r-sample and comparison sets are drawn from the stream.
enum class SubsetRule {
  kRandom,  ///< independent uniform subsets without replacement (seeded)
  kPrefix,  ///< the first r (resp. s) values of the stream
};

/// When r counts as saturated.
enum class StoppingRule {
  kPersistent,     ///< error stays below tau for this r and every larger r
  kFirstCrossing,  ///< first r whose error is below tau
};

struct SaturationOptions {
  double tau = 0.05;
  std::vector<double> t_values = default_t_values();
  SaturationMode mode = SaturationMode::kFull;
  SubsetRule subsets = SubsetRule::kRandom;
  StoppingRule stopping = StoppingRule::kPersistent;
  std::size_t increment = 10;
  std::uint64_t seed = 1;
};

struct SaturationPoint {
  std::size_t r = 0;
  double error = 0.0;
};

struct SaturationReport {
  std::string qoi;
  SaturationMode mode = SaturationMode::kFull;
  double tau = 0.0;
  std::size_t r_star = 0;
  bool saturated = false;
  std::vector<SaturationPoint> error_curve;
};

/// Smallest sample count whose certificate table matches the comparison
/// table to within tau, where error(r) = ||eps_r - eps_s||_2 divided by
/// expected_hypercube_distance(|t_values|) and s is the full stream or r +
/// increment. When no r qualifies, r_star is the stream length and
/// `saturated` is false. Requires at least 12 values and tau > 0.
SaturationReport saturation(std::span<const double> values, const SaturationOptions& opt, std::string qoi = {});

std::string to_string(SaturationMode m);

}  // namespace molcert
