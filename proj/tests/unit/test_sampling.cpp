#include "molcert/error.hpp"
#include "molcert/geometry.hpp"
#include "molcert/sampling.hpp"

#include "stats_oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace molcert;

TEST(Sobol, UnscrambledMatchesReferenceStream) {
  // scipy.stats.qmc.Sobol(d=6, scramble=False), first eight points.
  const double ref[8][6] = {
      {0, 0, 0, 0, 0, 0},
      {0.5, 0.5, 0.5, 0.5, 0.5, 0.5},
      {0.75, 0.25, 0.25, 0.25, 0.75, 0.75},
      {0.25, 0.75, 0.75, 0.75, 0.25, 0.25},
      {0.375, 0.375, 0.625, 0.875, 0.375, 0.125},
      {0.875, 0.875, 0.125, 0.375, 0.875, 0.625},
      {0.625, 0.125, 0.875, 0.625, 0.625, 0.875},
      {0.125, 0.625, 0.375, 0.125, 0.125, 0.375},
  };
  std::vector<double> u(6);
  for (int k = 0; k < 8; ++k) {
    sobol_unscrambled_point(k, u);
    for (int d = 0; d < 6; ++d) EXPECT_EQ(u[d], ref[k][d]) << "point " << k << " dim " << d;
  }
}

TEST(Sobol, UnscrambledHighDimensions) {
  // Same reference at d = 1200, dims 100, 500, 1000, 1199, as integers x 2^32.
  std::vector<double> u(1200);
  const std::size_t dims[4] = {100, 500, 1000, 1199};
  const double p12[4] = {2952790016.0, 3489660928.0, 805306368.0, 1879048192.0};
  const double p5[4] = {536870912.0, 3758096384.0, 1610612736.0, 536870912.0};
  sobol_unscrambled_point(12, u);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(u[dims[k]] * 4294967296.0, p12[k]);
  sobol_unscrambled_point(5, u);
  for (int k = 0; k < 4; ++k) EXPECT_EQ(u[dims[k]] * 4294967296.0, p5[k]);
}

TEST(Sobol, DeterministicAndInUnitCube) {
  LowDiscrepancySequence a(7, 99), b(7, 99), c(7, 100);
  bool differs = false;
  for (int k = 0; k < 200; ++k) {
    const auto x = a.next();
    const auto y = b.next();
    const auto z = c.next();
    EXPECT_EQ(x, y);
    differs = differs || x != z;
    for (double v : x) {
      EXPECT_GE(v, 0.0);
      EXPECT_LT(v, 1.0);
    }
  }
  EXPECT_TRUE(differs);
  EXPECT_EQ(a.index(), 200u);
}

TEST(Sobol, PointAtMatchesStream) {
  LowDiscrepancySequence s(5, 3);
  std::vector<double> p(5);
  s.point_at(17, p);
  s.reset(17);
  EXPECT_EQ(s.next(), p);
}

TEST(Sobol, ZeroDimensionRejected) {
  EXPECT_THROW(LowDiscrepancySequence(0, 1), DomainError);
  EXPECT_THROW(PseudoRandomSequence(0, 1), DomainError);
}

TEST(Sobol, ScrambledNetStratifiesOneDimension) {
  // The first 2^m points of a scrambled digital net fill every 1/2^m bin.
  for (std::uint64_t seed : {1ULL, 2ULL, 77ULL}) {
    LowDiscrepancySequence s(3, seed);
    std::vector<int> bins(16, 0);
    std::vector<double> xs;
    for (int k = 0; k < 16; ++k) {
      const auto x = s.next();
      ++bins[static_cast<int>(x[0] * 16)];
      xs.push_back(x[0]);
    }
    for (int b : bins) EXPECT_EQ(b, 1);
    // At most twice the discrepancy of 16 centred equispaced points.
    EXPECT_LE(oracle::star_discrepancy_1d(xs), 2.0 / 32.0 + 1e-15);
  }
}

TEST(Halton, FallbackBeyondSobolTable) {
  const std::size_t d = LowDiscrepancySequence::sobol_max_dimension() + 5;
  LowDiscrepancySequence s(d, 4);
  EXPECT_EQ(s.kind(), LowDiscrepancySequence::Kind::kHalton);
  std::vector<double> p(d), q(d);
  s.point_at(3, p);
  LowDiscrepancySequence(d, 4).point_at(3, q);
  EXPECT_EQ(p, q);
  for (double v : p) {
    EXPECT_GE(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  EXPECT_EQ(LowDiscrepancySequence(10, 4).kind(), LowDiscrepancySequence::Kind::kSobol);
}

TEST(Halton, FirstDimensionStratifies) {
  const std::size_t d = LowDiscrepancySequence::sobol_max_dimension() + 1;
  LowDiscrepancySequence s(d, 8);
  std::vector<double> p(d);
  std::vector<int> bins(8, 0);
  for (int k = 0; k < 8; ++k) {
    s.point_at(k, p);
    ++bins[static_cast<int>(p[0] * 8)];
  }
  for (int b : bins) EXPECT_EQ(b, 1);
}

TEST(BoxMuller, ClosedForms) {
  auto [a, b] = box_muller(1.0, 0.3);
  EXPECT_EQ(a, 0.0);
  EXPECT_EQ(std::abs(b), 0.0);
  auto [c, d] = box_muller(std::exp(-2.0), 0.0);
  EXPECT_NEAR(c, 2.0, 1e-15);
  EXPECT_NEAR(d, 0.0, 1e-15);
  auto [e, f] = box_muller(std::exp(-2.0), 0.25);
  EXPECT_NEAR(e, 0.0, 1e-15);
  EXPECT_NEAR(f, 2.0, 1e-15);
  EXPECT_THROW(box_muller(0.0, 0.5), DomainError);
  EXPECT_THROW(box_muller(0.5, 1.0), DomainError);
}

TEST(BoxMuller, MappedNormalsHaveUnitMoments) {
  LowDiscrepancySequence s(2, 5);
  double sum = 0, sq = 0;
  const int n = 100000;
  for (int k = 0; k < n / 2; ++k) {
    const auto u = s.next();
    for (double z : gaussians_from_unit(u, 2)) {
      sum += z;
      sq += z * z;
    }
  }
  const double mean = sum / n;
  EXPECT_LT(std::abs(mean), 0.02);
  EXPECT_LT(std::abs(sq / n - mean * mean - 1.0), 0.02);
}

TEST(Marginals, UniformAndGaussian) {
  EXPECT_DOUBLE_EQ(map_marginal(0.5, UniformMarginal{-kPi, kPi}), 0.0);
  EXPECT_DOUBLE_EQ(map_marginal(0.3, 0.9, GaussianMarginal{3.0, 0.0}), 3.0);
  EXPECT_NEAR(map_marginal(std::exp(-2.0), 0.0, GaussianMarginal{0.0, 1.0}), 2.0, 1e-15);
  const std::vector<double> u{std::exp(-2.0), 0.0};
  EXPECT_NEAR(map_marginal(u, MarginalSpec{GaussianMarginal{}}), 2.0, 1e-15);
  EXPECT_EQ(unit_width(MarginalSpec{GaussianMarginal{}}), 2u);
  EXPECT_EQ(unit_width(MarginalSpec{UniformMarginal{}}), 1u);
  // Affine and order preserving.
  const UniformMarginal m{2.0, 5.0};
  double last = -1e300;
  for (double x = 0.0; x < 1.0; x += 0.125) {
    const double v = map_marginal(x, m);
    EXPECT_GT(v, last);
    EXPECT_DOUBLE_EQ(v, 2.0 + 3.0 * x);
    last = v;
  }
}

TEST(Marginals, GaussianDimensionBookkeeping) {
  EXPECT_EQ(gaussian_unit_dimension(3), 4u);
  EXPECT_EQ(gaussian_unit_dimension(6), 6u);
  const std::vector<double> u{1.0 - std::exp(-2.0), 0.25, 1.0 - std::exp(-2.0), 0.0};
  const auto z = gaussians_from_unit(u, 3);
  ASSERT_EQ(z.size(), 3u);
  EXPECT_NEAR(z[0], 0.0, 1e-12);
  EXPECT_NEAR(z[1], 2.0, 1e-12);
  EXPECT_NEAR(z[2], 2.0, 1e-12);
  EXPECT_THROW(gaussians_from_unit(std::vector<double>(3), 3), DomainError);
}

TEST(BFactor, TypicalDisplacements) {
  // Quoted values are truncated to four decimals.
  EXPECT_NEAR(sigma_from_b(20.0), 0.5032, 1e-4);
  EXPECT_NEAR(sigma_from_b(80.0), 1.0066, 1e-4);
  EXPECT_EQ(sigma_from_b(0.0), 0.0);
  EXPECT_THROW(sigma_from_b(-1.0), DomainError);
  EXPECT_NEAR(b_from_sigma(sigma_from_b(42.0)), 42.0, 1e-12);
}

TEST(Discrepancy, ShiftedLatticeAndExtremes) {
  std::vector<std::vector<double>> lattice;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) lattice.push_back({i / 4.0 + 0.125, j / 4.0 + 0.125});
  const double est = star_discrepancy_estimate(lattice, 8);
  EXPECT_LE(est, 0.25);
  EXPECT_LE(est, oracle::star_discrepancy_2d(lattice) + 1e-15);

  const std::vector<std::vector<double>> origin{{0.0, 0.0}};
  EXPECT_GT(star_discrepancy_estimate(origin, 256), 0.99);

  EXPECT_THROW(star_discrepancy_estimate(std::vector<std::vector<double>>{}, 8), DomainError);
  EXPECT_THROW(star_discrepancy_estimate(std::vector<std::vector<double>>{{1.0, 0.5}}, 8), DomainError);
}

TEST(Discrepancy, GridEstimateNeverExceedsExact) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<std::vector<double>> p;
    for (int k = 0; k < 40; ++k) p.push_back({u(rng), u(rng)});
    EXPECT_LE(star_discrepancy_estimate(p, 32), oracle::star_discrepancy_2d(p) + 1e-12);
  }
}

TEST(Discrepancy, OneDimensionalExact) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u;
  std::vector<double> x(30);
  for (auto& v : x) v = u(rng);
  EXPECT_NEAR(star_discrepancy_1d(x), oracle::star_discrepancy_1d(x), 1e-15);
}

TEST(SampleBudget, ClosedFormsAndGrowth) {
  const auto b1 = sample_budget(1, 0.5);
  EXPECT_EQ(b1.naive, 8);
  EXPECT_GE(b1.naive, b1.lds);
  boost::multiprecision::cpp_int last = 0;
  double last_log = 0;
  for (std::size_t d = 1; d <= 12; ++d) {
    const auto b = sample_budget(d, 0.1);
    EXPECT_GT(b.naive, last);
    EXPECT_GE(b.naive, b.lds);
    last = b.naive;
    if (d > 1) {
      EXPECT_GT(b.log10_naive, last_log);
    }
    last_log = b.log10_naive;
  }
  // log(lds) grows like log d: doubling d adds a constant.
  const double g1 = sample_budget(8, 0.1).log10_lds - sample_budget(4, 0.1).log10_lds;
  const double g2 = sample_budget(16, 0.1).log10_lds - sample_budget(8, 0.1).log10_lds;
  EXPECT_NEAR(g1, g2, 1e-9);
  EXPECT_THROW(sample_budget(0, 0.1), DomainError);
  EXPECT_THROW(sample_budget(3, 1.0), DomainError);
}
