#include "molcert/error.hpp"
#include "molcert/theory_bounds.hpp"

#include "stats_oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace molcert;

namespace {

BoxDomain cube(std::size_t d, double lo, double hi) { return BoxDomain{std::vector<Interval>(d, Interval{lo, hi})}; }

double kernel_at(const KernelSpec& spec, const std::vector<double>& x) {
  double s = 0;
  for (double v : x) s += v * v;
  return spec.evaluate(std::sqrt(s));
}

// Largest change of the kernel sum when coordinate i moves from lower to
// upper, with the other coordinates on a 20-per-axis grid.
double grid_deviation(const KernelSpec& spec, const BoxDomain& box, std::size_t i) {
  const std::size_t d = box.dimension();
  std::vector<std::size_t> idx(d, 0);
  double best = 0;
  while (true) {
    std::vector<double> x(d);
    for (std::size_t k = 0; k < d; ++k) {
      const auto& iv = box.intervals[k];
      x[k] = iv.lower + (iv.upper - iv.lower) * static_cast<double>(idx[k]) / 19.0;
    }
    x[i] = box.intervals[i].lower;
    const double lo = kernel_at(spec, x);
    x[i] = box.intervals[i].upper;
    best = std::max(best, std::abs(kernel_at(spec, x) - lo));
    std::size_t k = 0;
    while (k < d && (k == i || ++idx[k] == 20)) {
      if (k != i) idx[k] = 0;
      ++k;
    }
    if (k == d) break;
  }
  return best;
}

// Empirical P(|F - mean F| >= t) from Monte-Carlo draws of F.
double tail(const std::vector<double>& f, double t) {
  double mean = 0;
  for (double v : f) mean += v;
  mean /= static_cast<double>(f.size());
  std::size_t c = 0;
  for (double v : f) c += std::abs(v - mean) >= t;
  return static_cast<double>(c) / static_cast<double>(f.size());
}

double mc_slack(double p, std::size_t n) { return 3.0 * std::sqrt(std::max(p * (1 - p), 1.0 / n) / n); }

}  // namespace

TEST(D1, ClosedFormExamples) {
  const auto [dx, dy] = d1_bound(1.0, 1.0, cube(2, 1.0, 2.0));
  EXPECT_NEAR(dx, 1 / std::sqrt(2.0) - 1 / std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(dx, 0.2599, 1e-4);
  EXPECT_DOUBLE_EQ(dx, dy);
  BoxDomain flat{{{1.5, 1.5}, {1.0, 2.0}}};
  EXPECT_EQ(d1_bound(1.0, 1.0, flat).first, 0.0);
  EXPECT_EQ(d1_bound(-1.0, 1.0, cube(2, 1.0, 2.0)).first, dx);
  EXPECT_THROW(d1_bound(1.0, 1.0, cube(2, 0.0, 2.0)), DomainError);
  EXPECT_THROW(d1_bound(1.0, 1.0, cube(3, 1.0, 2.0)), DomainError);
}

TEST(D2, ClosedFormAndConsistency) {
  for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(d2_bound(1.0, 2.0, cube(3, 1.0, 2.0), i), 1.0 / 6.0, 1e-15);
  const BoxDomain box{{{1.0, 2.5}, {0.5, 1.5}}};
  const auto [dx, dy] = d1_bound(2.0, 1.5, box);
  EXPECT_EQ(d2_bound(2.0, 1.5, box, 0), dx);
  EXPECT_EQ(d2_bound(2.0, 1.5, box, 1), dy);
  EXPECT_THROW(d2_bound(1.0, 1.0, box, 2), DomainError);
}

TEST(D3, TermCountScaling) {
  const auto box = cube(3, 0.8, 1.7);
  const KernelSpec one{{{1.0, 1.0}}};
  const KernelSpec two{{{1.0, 1.0}, {1.0, 1.0}}};
  EXPECT_EQ(d3_bound(one, box, 1), d2_bound(1.0, 1.0, box, 1));
  EXPECT_EQ(d3_bound(two, box, 1), 2.0 * d2_bound(1.0, 1.0, box, 1));
  EXPECT_THROW(d3_bound(KernelSpec{}, box, 0), DomainError);
  EXPECT_THROW(d3_bound(KernelSpec{{{1.0, -1.0}}}, box, 0), DomainError);
}

TEST(BoundedDifferences, DominateGridSearch) {
  const std::vector<std::pair<KernelSpec, BoxDomain>> cases{
      {KernelSpec{{{1.0, 1.0}}}, cube(2, 1.0, 2.0)},
      {KernelSpec{{{-3.0, 2.0}}}, BoxDomain{{{0.5, 1.0}, {1.0, 3.0}}}},
      {KernelSpec{{{1.0, 1.0}, {-0.5, 6.0}, {2.0, 12.0}}}, BoxDomain{{{1.0, 1.4}, {0.9, 1.6}, {1.2, 1.3}}}},
      {KernelSpec{{{332.0, 1.0}, {1.0, 6.0}}}, cube(3, 2.0, 4.0)},
  };
  for (const auto& [spec, box] : cases) {
    for (std::size_t i = 0; i < box.dimension(); ++i) {
      const double grid = grid_deviation(spec, box, i);
      EXPECT_GE(d3_bound(spec, box, i), grid);
      if (spec.terms.size() == 1) {
        EXPECT_GE(d2_bound(spec.terms[0].a, spec.terms[0].b, box, i), grid);
      }
    }
  }
}

TEST(McDiarmid, ClosedFormsAndLimits) {
  const std::vector<double> d{0.3, 0.4};
  const double t = std::sqrt(0.25 / 2.0);
  EXPECT_NEAR(mcdiarmid_tail(d, t), 2.0 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(mcdiarmid_tail(d, t), 0.7358, 1e-4);
  EXPECT_LT(mcdiarmid_tail(d, 50.0), 1e-300);
  EXPECT_EQ(mcdiarmid_tail(d, 0.0), 1.0);
  EXPECT_EQ(mcdiarmid_tail(std::vector<double>{0.0, 0.0}, 0.1), 0.0);
  EXPECT_THROW(mcdiarmid_tail(d, -1.0), DomainError);
  EXPECT_THROW(mcdiarmid_tail(std::vector<double>{-0.1}, 1.0), DomainError);
  double last = 1.0;
  for (double s = 0.0; s < 2.0; s += 0.1) {
    const double b = mcdiarmid_tail(d, s);
    EXPECT_LE(b, last);
    last = b;
  }
}

TEST(McDiarmid, DominatesMonteCarloTail) {
  const KernelSpec spec{{{1.0, 1.0}, {0.5, 2.0}, {-0.2, 3.0}}};
  const auto box = BoxDomain{{{1.0, 2.0}, {0.5, 1.5}, {1.0, 1.2}}};
  std::mt19937_64 rng(2);
  std::vector<std::uniform_real_distribution<double>> u;
  for (const auto& iv : box.intervals) u.emplace_back(iv.lower, iv.upper);
  const std::size_t n = 20000;
  std::vector<double> f(n);
  for (auto& v : f) {
    std::vector<double> x(3);
    for (std::size_t k = 0; k < 3; ++k) x[k] = u[k](rng);
    v = kernel_at(spec, x);
  }
  const auto dev = d3_bounds(spec, box);
  for (int k = 1; k <= 20; ++k) {
    const double t = 0.02 * k;
    const double p = tail(f, t);
    EXPECT_GE(mcdiarmid_tail(dev, t) + mc_slack(p, n), p) << "t = " << t;
  }
}

TEST(Azuma, ClosedFormsAndRandomWalk) {
  for (int n : {1, 5, 20}) {
    EXPECT_NEAR(azuma_tail(AzumaSpec{std::vector<double>(n, 1.0)}, n), std::min(1.0, 2.0 * std::exp(-n / 2.0)), 1e-15);
  }
  EXPECT_LE(azuma_tail(AzumaSpec{{1.0, 1.0}}, 1.5), azuma_tail(AzumaSpec{{2.0, 2.0}}, 1.5));
  EXPECT_EQ(azuma_tail(AzumaSpec{{0.0}}, 1.0), 0.0);
  EXPECT_EQ(azuma_tail(AzumaSpec{{1.0}}, 0.0), 1.0);
  const AzumaSpec walk{std::vector<double>(20, 1.0)};
  for (int t = 1; t <= 20; ++t) EXPECT_GE(azuma_tail(walk, t), oracle::random_walk_tail(20, t)) << t;
}

TEST(DifferenceBox, IntervalsAndErrors) {
  const BoxDomain p{{{1.0, 2.0}, {0.0, 1.0}}};
  const BoxDomain q{{{4.0, 5.0}, {-5.0, -3.0}}};
  const auto d = difference_box(p, q);
  EXPECT_DOUBLE_EQ(d.intervals[0].lower, 2.0);
  EXPECT_DOUBLE_EQ(d.intervals[0].upper, 4.0);
  // Entirely negative differences are mirrored.
  EXPECT_DOUBLE_EQ(d.intervals[1].lower, 3.0);
  EXPECT_DOUBLE_EQ(d.intervals[1].upper, 6.0);
  const BoxDomain overlap{{{1.5, 3.0}, {-5.0, -3.0}}};
  EXPECT_THROW(difference_box(p, overlap), DomainError);
  EXPECT_THROW(difference_box(p, BoxDomain{{{4.0, 5.0}}}), DomainError);
}

TEST(PairwiseSum, SinglePairReducesToOneKernel) {
  const KernelSpec spec{{{1.0, 1.0}}};
  const std::vector<BoxDomain> a{cube(3, 0.0, 0.5)}, b{cube(3, 2.0, 3.0)};
  const auto delta = difference_box(a[0], b[0]);
  double var = 0;
  for (double d : d3_bounds(spec, delta)) var += d * d;
  EXPECT_DOUBLE_EQ(pairwise_sum_variance(spec, a, b), var);
  EXPECT_DOUBLE_EQ(pairwise_sum_tail(spec, a, b, 0.1), mcdiarmid_tail(d3_bounds(spec, delta), 0.1));
}

TEST(PairwiseSum, MorePointsWeakenTheBound) {
  const KernelSpec spec{{{1.0, 1.0}}};
  const std::vector<BoxDomain> a1{cube(3, 0.0, 0.5)}, a2{cube(3, 0.0, 0.5), cube(3, 0.0, 0.5)};
  const std::vector<BoxDomain> b{cube(3, 2.0, 3.0)};
  EXPECT_DOUBLE_EQ(pairwise_sum_variance(spec, a2, b), 2.0 * pairwise_sum_variance(spec, a1, b));
  EXPECT_GE(pairwise_sum_tail(spec, a2, b, 0.1), pairwise_sum_tail(spec, a1, b, 0.1));
  const std::vector<BoxDomain> clash{cube(3, 0.2, 2.5)};
  EXPECT_THROW(pairwise_sum_variance(spec, a1, clash), DomainError);
}

TEST(PairwiseSum, DominatesMonteCarloOnThreeByThree) {
  const KernelSpec spec{{{1.0, 1.0}}};
  std::vector<BoxDomain> a, b;
  for (int k = 0; k < 3; ++k) {
    const double s = 0.4 * k;
    a.push_back(BoxDomain{{{s, s + 0.5}, {s, s + 0.5}, {s, s + 0.5}}});
    b.push_back(BoxDomain{{{3 + s, 3.5 + s}, {3 + s, 3.5 + s}, {3 + s, 3.5 + s}}});
  }
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto draw = [&](const BoxDomain& box) {
    std::vector<double> x(3);
    for (std::size_t k = 0; k < 3; ++k) {
      x[k] = box.intervals[k].lower + u(rng) * (box.intervals[k].upper - box.intervals[k].lower);
    }
    return x;
  };
  const std::size_t n = 20000;
  std::vector<double> f(n);
  for (auto& v : f) {
    std::vector<std::vector<double>> xa, xb;
    for (const auto& box : a) xa.push_back(draw(box));
    for (const auto& box : b) xb.push_back(draw(box));
    double s = 0;
    for (const auto& p : xa) {
      for (const auto& q : xb) {
        std::vector<double> d{q[0] - p[0], q[1] - p[1], q[2] - p[2]};
        s += kernel_at(spec, d);
      }
    }
    v = s;
  }
  for (int k = 1; k <= 20; ++k) {
    const double t = 0.01 * k;
    const double p = tail(f, t);
    EXPECT_GE(pairwise_sum_tail(spec, a, b, t) + mc_slack(p, n), p) << "t = " << t;
  }
}

TEST(Conditional, IndependentDensityMatchesDirectComputation) {
  DiscreteJoint j;
  j.x = {1.0, 1.5, 2.0};
  j.y = {0.5, 1.0};
  const std::vector<double> px{0.2, 0.5, 0.3}, py{0.4, 0.6};
  for (double a : px) {
    for (double b : py) j.weights.push_back(a * b);
  }
  auto f = [](double x, double y) { return 1.0 / std::sqrt(x * x + y * y); };
  double b0 = 0, cond = 0, mart = 0;
  std::vector<double> b1(3, 0.0);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t k = 0; k < 2; ++k) b1[i] += py[k] * f(j.x[i], j.y[k]);
    b0 += px[i] * b1[i];
  }
  for (std::size_t i = 0; i < 3; ++i) {
    mart = std::max(mart, std::abs(b1[i] - b0));
    for (std::size_t k = 0; k < 2; ++k) {
      mart = std::max(mart, std::abs(f(j.x[i], j.y[k]) - b1[i]));
      for (std::size_t i2 = 0; i2 < 3; ++i2) cond = std::max(cond, std::abs(b1[i2] - f(j.x[i], j.y[k])));
    }
  }
  const auto c = estimate_conditional_c(f, j);
  EXPECT_NEAR(c.conditional, cond, 1e-14);
  EXPECT_NEAR(c.martingale, mart, 1e-14);
  EXPECT_NEAR(c.c, std::max(cond, mart), 1e-14);
}

TEST(Conditional, PointMassAndZeroMass) {
  DiscreteJoint j;
  j.x = {1.0, 2.0};
  j.y = {1.0, 3.0};
  j.weights = {0.0, 0.0, 0.0, 1.0};
  auto f = [](double x, double y) { return x * y; };
  EXPECT_EQ(estimate_conditional_c(f, j).c, 0.0);
  j.weights = {0.0, 0.0, 0.0, 0.0};
  EXPECT_THROW(estimate_conditional_c(f, j), DomainError);
  j.weights = {1.0, 2.0};
  EXPECT_THROW(estimate_conditional_c(f, j), DomainError);
}

TEST(Conditional, CorrelatedGaussianDominatesMonteCarlo) {
  const auto j = discretize_gaussian(3.0, 4.0, 0.3, 0.4, 0.6, 32, 3.0);
  auto f = [](double x, double y) { return 1.0 / std::sqrt(x * x + y * y); };
  const auto c = estimate_conditional_c(f, j);
  EXPECT_GT(c.c, 0.0);
  std::mt19937_64 rng(19);
  std::discrete_distribution<std::size_t> cell(j.weights.begin(), j.weights.end());
  const std::size_t n = 20000;
  std::vector<double> v(n);
  for (auto& x : v) {
    const std::size_t k = cell(rng);
    x = f(j.x[k / j.y.size()], j.y[k % j.y.size()]);
  }
  for (int k = 1; k <= 20; ++k) {
    const double t = 0.0025 * k;
    const double p = tail(v, t);
    EXPECT_GE(dependent_tail(c, t) + mc_slack(p, n), p) << "t = " << t;
  }
  EXPECT_THROW(discretize_gaussian(0, 0, 1, 1, 1.0), DomainError);
}
