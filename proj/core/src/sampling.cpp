#include "molcert/sampling.hpp"

#include "molcert/error.hpp"
#include "molcert/geometry.hpp"
#include "sobol_directions.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace molcert {
namespace {

constexpr int kBits = 32;
constexpr double kTwoPow32 = 4294967296.0;

std::vector<std::uint32_t> first_primes(std::size_t count) {
  std::vector<std::uint32_t> primes;
  primes.reserve(count);
  std::size_t limit = std::max<std::size_t>(16, static_cast<std::size_t>(count * (std::log(count + 2.0) + std::log(std::log(count + 3.0)) + 3)));
  while (true) {
    std::vector<bool> composite(limit + 1, false);
    primes.clear();
    for (std::size_t p = 2; p <= limit && primes.size() < count; ++p) {
      if (composite[p]) continue;
      primes.push_back(static_cast<std::uint32_t>(p));
      for (std::size_t q = p * p; q <= limit; q += p) composite[q] = true;
    }
    if (primes.size() == count) return primes;
    limit *= 2;
  }
}

// Unscrambled direction numbers v_1..v_32 of one Sobol dimension, with the
// first digit in the most significant bit.
std::array<std::uint32_t, kBits> sobol_directions(std::size_t dim) {
  std::array<std::uint32_t, kBits> v{};
  if (dim == 0) {
    for (int j = 0; j < kBits; ++j) v[j] = 1u << (kBits - 1 - j);
    return v;
  }
  const std::uint32_t poly = detail::kSobolPoly[dim];
  const int degree = std::bit_width(poly) - 1;
  const std::uint32_t* m = detail::kSobolInit + detail::kSobolInitOffset[dim];
  for (int j = 0; j < std::min(degree, kBits); ++j) v[j] = m[j] << (kBits - 1 - j);
  for (int j = degree; j < kBits; ++j) {
    std::uint32_t value = v[j - degree] ^ (v[j - degree] >> degree);
    for (int k = 1; k < degree; ++k) {
      if ((poly >> (degree - k)) & 1u) value ^= v[j - k];
    }
    v[j] = value;
  }
  return v;
}

// Applies a random lower-triangular binary matrix (unit diagonal) to every
// direction number: output digit k mixes input digits 0..k.
void linear_matrix_scramble(std::array<std::uint32_t, kBits>& v, std::mt19937_64& rng) {
  std::array<std::uint32_t, kBits> rows{};
  for (int k = 0; k < kBits; ++k) {
    const std::uint32_t diag = 1u << (kBits - 1 - k);
    const std::uint32_t above = k == 0 ? 0u : static_cast<std::uint32_t>(~0u << (kBits - k));
    rows[k] = diag | (static_cast<std::uint32_t>(rng()) & above);
  }
  for (auto& x : v) {
    std::uint32_t out = 0;
    for (int k = 0; k < kBits; ++k) {
      if (std::popcount(rows[k] & x) & 1) out |= 1u << (kBits - 1 - k);
    }
    x = out;
  }
}

double to_unit(std::uint32_t x) { return static_cast<double>(x) / kTwoPow32; }

}  // namespace

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::size_t LowDiscrepancySequence::sobol_max_dimension() { return detail::kSobolDimensions; }

LowDiscrepancySequence::LowDiscrepancySequence(std::size_t dimension, std::uint64_t seed)
    : dim_(dimension), seed_(seed) {
  if (dimension == 0) throw DomainError("low-discrepancy sequence needs dimension >= 1");
  std::mt19937_64 rng(mix_seed(seed));
  if (dimension <= detail::kSobolDimensions) {
    kind_ = Kind::kSobol;
    directions_.resize(dimension * kBits);
    shift_.resize(dimension);
    for (std::size_t d = 0; d < dimension; ++d) {
      auto v = sobol_directions(d);
      linear_matrix_scramble(v, rng);
      std::copy(v.begin(), v.end(), directions_.begin() + static_cast<std::ptrdiff_t>(d * kBits));
      shift_[d] = static_cast<std::uint32_t>(rng());
    }
  } else {
    kind_ = Kind::kHalton;
    bases_ = first_primes(dimension);
    mult_.resize(dimension);
    offset_.resize(dimension);
    for (std::size_t d = 0; d < dimension; ++d) {
      const std::uint32_t b = bases_[d];
      mult_[d] = b == 2 ? 1u : 1u + static_cast<std::uint32_t>(rng() % (b - 1));
      offset_[d] = static_cast<std::uint32_t>(rng() % b);
    }
  }
}

std::vector<double> LowDiscrepancySequence::next() {
  std::vector<double> out(dim_);
  next(out);
  return out;
}

void LowDiscrepancySequence::next(std::span<double> out) {
  point_at(index_, out);
  ++index_;
}

void LowDiscrepancySequence::point_at(std::uint64_t index, std::span<double> out) const {
  if (out.size() != dim_) throw DomainError("output span does not match the sequence dimension");
  if (kind_ == Kind::kSobol) {
    sobol_point(index, out);
  } else {
    halton_point(index, out);
  }
}

void LowDiscrepancySequence::sobol_point(std::uint64_t index, std::span<double> out) const {
  if (index >= (std::uint64_t{1} << kBits)) throw DomainError("Sobol index exceeds 2^32");
  const std::uint64_t gray = index ^ (index >> 1);
  for (std::size_t d = 0; d < dim_; ++d) {
    std::uint32_t x = shift_[d];
    const std::uint32_t* v = directions_.data() + d * kBits;
    for (std::uint64_t g = gray; g != 0; g &= g - 1) x ^= v[std::countr_zero(g)];
    out[d] = to_unit(x);
  }
}

void LowDiscrepancySequence::halton_point(std::uint64_t index, std::span<double> out) const {
  constexpr double kBelowOne = 1.0 - std::numeric_limits<double>::epsilon() / 2;
  for (std::size_t d = 0; d < dim_; ++d) {
    const std::uint64_t b = bases_[d];
    // Enough digits to resolve double precision in this base.
    const int digits = static_cast<int>(std::ceil(53.0 / std::log2(static_cast<double>(b))));
    double value = 0.0;
    double scale = 1.0 / static_cast<double>(b);
    std::uint64_t n = index;
    for (int k = 0; k < digits; ++k) {
      const std::uint64_t digit = n % b;
      n /= b;
      value += static_cast<double>((mult_[d] * digit + offset_[d]) % b) * scale;
      scale /= static_cast<double>(b);
    }
    out[d] = std::min(value, kBelowOne);
  }
}

void sobol_unscrambled_point(std::uint64_t index, std::span<double> out) {
  if (out.size() > detail::kSobolDimensions) throw DomainError("dimension exceeds the Sobol table");
  if (index >= (std::uint64_t{1} << kBits)) throw DomainError("Sobol index exceeds 2^32");
  const std::uint64_t gray = index ^ (index >> 1);
  for (std::size_t d = 0; d < out.size(); ++d) {
    const auto v = sobol_directions(d);
    std::uint32_t x = 0;
    for (std::uint64_t g = gray; g != 0; g &= g - 1) x ^= v[std::countr_zero(g)];
    out[d] = to_unit(x);
  }
}

PseudoRandomSequence::PseudoRandomSequence(std::size_t dimension, std::uint64_t seed) : dim_(dimension), seed_(seed) {
  if (dimension == 0) throw DomainError("pseudo-random sequence needs dimension >= 1");
}

void PseudoRandomSequence::point_at(std::uint64_t index, std::span<double> out) const {
  if (out.size() != dim_) throw DomainError("output span does not match the sequence dimension");
  std::mt19937_64 rng(mix_seed(seed_ ^ mix_seed(index)));
  for (auto& x : out) x = static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<double> PseudoRandomSequence::next() {
  std::vector<double> out(dim_);
  point_at(index_++, out);
  return out;
}

double sigma_from_b(double b) {
  if (b < 0.0) throw DomainError("B-factor must be non-negative, got " + std::to_string(b));
  return std::sqrt(b / (8.0 * kPi * kPi));
}

double b_from_sigma(double sigma) { return 8.0 * kPi * kPi * sigma * sigma; }

std::pair<double, double> box_muller(double u1, double u2) {
  if (!(u1 > 0.0 && u1 <= 1.0)) throw DomainError("Box-Muller needs u1 in (0, 1]");
  if (!(u2 >= 0.0 && u2 < 1.0)) throw DomainError("Box-Muller needs u2 in [0, 1)");
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * kPi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

double map_marginal(double u, const UniformMarginal& m) {
  if (m.lower > m.upper) throw DomainError("uniform marginal needs lower <= upper");
  return m.lower + u * (m.upper - m.lower);
}

double map_marginal(double u1, double u2, const GaussianMarginal& m) {
  if (m.sigma < 0.0) throw DomainError("Gaussian marginal needs sigma >= 0");
  return m.mean + m.sigma * box_muller(u1, u2).first;
}

std::size_t unit_width(const MarginalSpec& m) { return std::holds_alternative<GaussianMarginal>(m) ? 2 : 1; }

double map_marginal(std::span<const double> u, const MarginalSpec& m) {
  if (u.size() < unit_width(m)) throw DomainError("not enough unit coordinates for the marginal");
  if (const auto* g = std::get_if<GaussianMarginal>(&m)) return map_marginal(u[0], u[1], *g);
  return map_marginal(u[0], std::get<UniformMarginal>(m));
}

std::size_t gaussian_unit_dimension(std::size_t count) { return 2 * ((count + 1) / 2); }

std::vector<double> gaussians_from_unit(std::span<const double> u, std::size_t count) {
  if (u.size() < gaussian_unit_dimension(count)) throw DomainError("not enough unit coordinates for the Gaussians");
  std::vector<double> z(count);
  for (std::size_t k = 0; 2 * k < count; ++k) {
    const auto [z1, z2] = box_muller(1.0 - u[2 * k], u[2 * k + 1]);
    z[2 * k] = z1;
    if (2 * k + 1 < count) z[2 * k + 1] = z2;
  }
  return z;
}

std::size_t default_discrepancy_resolution(std::size_t dimension) { return dimension <= 3 ? 64 : 16; }

double star_discrepancy_estimate(std::span<const std::vector<double>> points, std::size_t resolution) {
  if (points.empty()) throw DomainError("discrepancy of an empty point set is undefined");
  if (resolution < 2) throw DomainError("discrepancy grid resolution must be >= 2");
  const std::size_t d = points.front().size();
  if (d == 0) throw DomainError("points must have at least one coordinate");
  double cells_d = std::pow(static_cast<double>(resolution), static_cast<double>(d));
  if (cells_d > 5e8) throw DomainError("discrepancy grid too large; lower the resolution");
  const std::size_t cells = static_cast<std::size_t>(cells_d);

  // counts[c] = points in grid cell c; prefix sums turn it into anchored-box
  // counts for boxes [0, (g+1)/resolution) along every axis.
  std::vector<std::uint32_t> counts(cells, 0);
  for (const auto& p : points) {
    if (p.size() != d) throw DomainError("points have inconsistent dimension");
    std::size_t cell = 0, stride = 1;
    for (std::size_t a = 0; a < d; ++a) {
      if (!(p[a] >= 0.0 && p[a] < 1.0)) throw DomainError("point outside the unit cube");
      const auto g = std::min(resolution - 1, static_cast<std::size_t>(p[a] * static_cast<double>(resolution)));
      cell += g * stride;
      stride *= resolution;
    }
    ++counts[cell];
  }
  std::size_t stride = 1;
  for (std::size_t a = 0; a < d; ++a) {
    for (std::size_t c = 0; c < cells; ++c) {
      if ((c / stride) % resolution != 0) counts[c] += counts[c - stride];
    }
    stride *= resolution;
  }
  const double n = static_cast<double>(points.size());
  double worst = 0.0;
  for (std::size_t c = 0; c < cells; ++c) {
    double vol = 1.0;
    std::size_t rest = c;
    for (std::size_t a = 0; a < d; ++a) {
      vol *= static_cast<double>(rest % resolution + 1) / static_cast<double>(resolution);
      rest /= resolution;
    }
    worst = std::max(worst, std::abs(counts[c] / n - vol));
  }
  // The empty box at the origin contributes the fraction of points sitting in
  // no finer box, which the grid cannot see; the smallest cell covers it.
  return worst;
}

double star_discrepancy_1d(std::vector<double> points) {
  if (points.empty()) throw DomainError("discrepancy of an empty point set is undefined");
  std::sort(points.begin(), points.end());
  const double n = static_cast<double>(points.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    worst = std::max(worst, std::abs(points[i] - (2.0 * static_cast<double>(i) + 1.0) / (2.0 * n)));
  }
  return 1.0 / (2.0 * n) + worst;
}

SampleBudget sample_budget(std::size_t d, double eps) {
  using boost::multiprecision::cpp_int;
  if (d == 0) throw DomainError("sample budget needs d >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw DomainError("sample budget needs 0 < eps < 1");
  SampleBudget out;
  const double ratio = static_cast<double>(d) / eps;
  const double m_real = std::ceil(std::pow(ratio, 3.0));
  cpp_int m;
  if (m_real < 9.0e15) {
    m = static_cast<long long>(m_real);
  } else {
    m = cpp_int(m_real);
  }
  out.naive = boost::multiprecision::pow(m, static_cast<unsigned>(d));
  out.log10_naive = static_cast<double>(d) * std::log10(m_real);
  const double exponent = std::sqrt(std::log2(1.0 / eps));
  out.log10_lds = exponent * std::log10(ratio);
  const double lds_real = std::ceil(std::pow(ratio, exponent));
  if (lds_real < 9.0e15) {
    out.lds = static_cast<long long>(lds_real);
  } else if (std::isfinite(lds_real)) {
    out.lds = cpp_int(lds_real);
  } else {
    throw DomainError("low-discrepancy budget overflows double precision");
  }
  return out;
}

}  // namespace molcert
