#include "molcert/certificates.hpp"
#include "molcert/qoi.hpp"
#include "molcert/sampling.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <vector>

using namespace molcert;

namespace {

// Random atoms in a cube of side 3 * n^(1/3), roughly liquid density.
std::vector<Vec3> cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double side = 3.0 * std::cbrt(static_cast<double>(n));
  std::uniform_real_distribution<double> u(0.0, side);
  std::vector<Vec3> x(n);
  for (auto& p : x) p = Vec3(u(rng), u(rng), u(rng));
  return x;
}

void BM_Sobol(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  LowDiscrepancySequence seq(d, 1);
  for (auto _ : state) benchmark::DoNotOptimize(seq.next());
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Sobol)->Arg(3)->Arg(30)->Arg(300);

void BM_Sasa(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = cloud(n, 1);
  const std::vector<double> r(n, 1.7);
  for (auto _ : state) benchmark::DoNotOptimize(sasa(x, r, 1.4, 960).total);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}
BENCHMARK(BM_Sasa)->Arg(100)->Arg(1000);

void BM_LennardJones(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = cloud(n, 2);
  const std::vector<double> a(n, 1.9), b(n, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(lj_energy(x, a, b, PairDomain::intra()));
  state.SetComplexityN(static_cast<std::int64_t>(n));
}
BENCHMARK(BM_LennardJones)->Arg(100)->Arg(1000)->Arg(4000)->Complexity();

void BM_Chernoff(benchmark::State& state) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(50.0, 2.0);
  std::vector<double> v(static_cast<std::size_t>(state.range(0)));
  for (auto& x : v) x = g(rng);
  const auto t = default_t_values();
  for (auto _ : state) benchmark::DoNotOptimize(chernoff_table(EmpiricalDistribution::from(v), t));
}
BENCHMARK(BM_Chernoff)->Arg(1000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
