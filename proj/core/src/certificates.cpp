#include "molcert/certificates.hpp"

#include "molcert/error.hpp"
#include "molcert/geometry.hpp"
#include "molcert/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numeric>
#include <random>

namespace molcert {
namespace {

constexpr std::uint64_t kHypercubeSeed = 0x6d6f6c6365727431ULL;
constexpr std::size_t kHypercubePairs = 1000000;

// r values drawn without replacement from `values` (partial Fisher-Yates).
std::vector<double> random_subset(std::span<const double> values, std::size_t r, std::uint64_t seed) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::vector<double> out(r);
  for (std::size_t k = 0; k < r; ++k) {
    std::uniform_int_distribution<std::size_t> pick(k, idx.size() - 1);
    std::swap(idx[k], idx[pick(rng)]);
    out[k] = values[idx[k]];
  }
  return out;
}

std::vector<double> table_for(std::vector<double> values, std::span<const double> t_values) {
  return chernoff_table(EmpiricalDistribution::from(std::move(values)), t_values).epsilons;
}

double l2(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

}  // namespace

EmpiricalDistribution EmpiricalDistribution::from(std::vector<double> values) {
  if (values.empty()) throw DomainError("empirical distribution needs at least one value");
  for (double v : values) {
    if (!std::isfinite(v)) throw DomainError("empirical distribution contains a non-finite value");
  }
  EmpiricalDistribution d;
  CompensatedSum sum;
  for (double v : values) sum += v;
  const double n = static_cast<double>(values.size());
  d.mean = sum.value() / n;
  CompensatedSum sq;
  for (double v : values) sq += (v - d.mean) * (v - d.mean);
  d.std = std::sqrt(sq.value() / n);
  d.values = std::move(values);
  return d;
}

std::vector<double> default_t_values() { return {0.001, 0.005, 0.01, 0.02, 0.03, 0.05, 0.1}; }

CertificateTable chernoff_table(const EmpiricalDistribution& d, std::span<const double> t_values) {
  if (d.values.empty()) throw DomainError("certificate table of an empty distribution");
  if (d.mean == 0.0) throw DomainError("relative error is undefined for a zero mean");
  if (t_values.empty()) throw DomainError("certificate table needs at least one t value");
  for (std::size_t k = 0; k < t_values.size(); ++k) {
    if (!(t_values[k] > 0.0) || (k > 0 && !(t_values[k] > t_values[k - 1]))) {
      throw DomainError("t values must be positive and strictly ascending");
    }
  }
  std::vector<double> rel(d.values.size());
  const double scale = std::abs(d.mean);
  for (std::size_t i = 0; i < rel.size(); ++i) rel[i] = std::abs(d.values[i] - d.mean) / scale;
  std::sort(rel.begin(), rel.end());
  CertificateTable out;
  out.t_values.assign(t_values.begin(), t_values.end());
  const double n = static_cast<double>(rel.size());
  for (double t : t_values) {
    const auto above = rel.end() - std::upper_bound(rel.begin(), rel.end(), t);
    out.epsilons.push_back(static_cast<double>(above) / n);
  }
  return out;
}

double zscore(double x0, const EmpiricalDistribution& d) {
  if (d.std == 0.0) throw DomainError("z-score is undefined for a zero standard deviation");
  return (x0 - d.mean) / d.std;
}

HypercubeDistance hypercube_distance_mc(std::size_t d, std::size_t pairs, std::uint64_t seed) {
  if (d == 0) throw DomainError("hypercube dimension must be >= 1");
  if (pairs < 2) throw DomainError("Monte-Carlo estimate needs at least two pairs");
  std::mt19937_64 rng(mix_seed(seed));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  CompensatedSum sum, sq;
  for (std::size_t k = 0; k < pairs; ++k) {
    double s = 0.0;
    for (std::size_t a = 0; a < d; ++a) {
      const double x = unif(rng) - unif(rng);
      s += x * x;
    }
    const double dist = std::sqrt(s);
    sum += dist;
    sq += dist * dist;
  }
  const double n = static_cast<double>(pairs);
  const double mean = sum.value() / n;
  const double var = std::max(0.0, (sq.value() - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n), HypercubeDistance::Method::kMonteCarlo};
}

HypercubeDistance expected_hypercube_distance(std::size_t d) {
  using M = HypercubeDistance::Method;
  switch (d) {
    case 0:
      throw DomainError("hypercube dimension must be >= 1");
    case 1:
      return {1.0 / 3.0, 0.0, M::kExact};
    case 2:
      return {(2.0 + std::sqrt(2.0) + 5.0 * std::log(1.0 + std::sqrt(2.0))) / 15.0, 0.0, M::kExact};
    case 3: {
      // Robbins constant.
      const double s2 = std::sqrt(2.0), s3 = std::sqrt(3.0);
      const double v = (4.0 + 17.0 * s2 - 6.0 * s3 - 7.0 * kPi) / 105.0 + std::log(1.0 + s2) / 5.0 +
                       2.0 * std::log(2.0 + s3) / 5.0;
      return {v, 0.0, M::kExact};
    }
    case 6:
      return {0.9689, 0.0, M::kTabulated};
    default:
      break;
  }
  static std::mutex mutex;
  static std::map<std::size_t, HypercubeDistance> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(d);
  if (it == cache.end()) it = cache.emplace(d, hypercube_distance_mc(d, kHypercubePairs, kHypercubeSeed)).first;
  return it->second;
}

std::string to_string(SaturationMode m) { return m == SaturationMode::kIncremental ? "incremental" : "full"; }

SaturationReport saturation(std::span<const double> values, const SaturationOptions& opt, std::string qoi) {
  const std::size_t n = values.size();
  if (n < 12) throw DomainError("saturation needs at least 12 values");
  if (!(opt.tau > 0.0)) throw DomainError("saturation threshold tau must be positive");
  if (opt.increment == 0) throw DomainError("incremental offset must be positive");
  const bool incremental = opt.mode == SaturationMode::kIncremental;
  if (incremental && opt.increment + 2 > n) throw DomainError("stream too short for the incremental offset");
  const double norm = expected_hypercube_distance(opt.t_values.size()).value;

  SaturationReport rep;
  rep.qoi = std::move(qoi);
  rep.mode = opt.mode;
  rep.tau = opt.tau;
  const std::vector<double> all(values.begin(), values.end());
  const auto full_table = table_for(all, opt.t_values);
  const std::size_t r_max = incremental ? n - opt.increment : n;
  auto draw = [&](std::size_t r, std::uint64_t stream) {
    if (opt.subsets == SubsetRule::kPrefix) return std::vector<double>(values.begin(), values.begin() + r);
    return random_subset(values, r, mix_seed(opt.seed ^ mix_seed(2 * r + stream)));
  };
  for (std::size_t r = 2; r <= r_max; ++r) {
    const auto eps_r = table_for(draw(r, 0), opt.t_values);
    const auto eps_s = incremental ? table_for(draw(r + opt.increment, 1), opt.t_values) : full_table;
    rep.error_curve.push_back({r, l2(eps_r, eps_s) / norm});
  }

  if (opt.stopping == StoppingRule::kFirstCrossing) {
    for (const auto& p : rep.error_curve) {
      if (p.error < opt.tau) {
        rep.r_star = p.r;
        rep.saturated = true;
        break;
      }
    }
  } else {
    // Walk back from the largest r while the error stays below tau.
    for (auto it = rep.error_curve.rbegin(); it != rep.error_curve.rend() && it->error < opt.tau; ++it) {
      rep.r_star = it->r;
      rep.saturated = true;
    }
  }
  if (!rep.saturated) rep.r_star = n;
  return rep;
}

}  // namespace molcert
