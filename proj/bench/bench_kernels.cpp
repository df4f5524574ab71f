// Serial reference vs OpenMP kernels.

#include <benchmark/benchmark.h>

#include <limits>
#include <random>
#include <vector>

#include "cgas/kernel.hpp"
#include "cgas/measure.hpp"
#include "cgas/metrics.hpp"
#include "cgas/potential.hpp"
#include "cgas/reference.hpp"

using namespace cgas;

namespace {

std::vector<double> cloud(std::size_t n, int d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 0.7);
  std::vector<double> x(n * d);
  for (auto& v : x) v = g(rng);
  return x;
}

PointConfiguration config(std::size_t n) { return PointConfiguration(SpaceDim(2), cloud(n, 2, n)); }

void BM_pair_reference(benchmark::State& s) {
  const auto c = config(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(reference::pair_interaction(c));
}
void BM_pair_parallel(benchmark::State& s) {
  const auto c = config(static_cast<std::size_t>(s.range(0)));
  for (auto _ : s) benchmark::DoNotOptimize(pair_interaction(c));
}
void BM_hamiltonian_reference(benchmark::State& s) {
  const auto c = config(static_cast<std::size_t>(s.range(0)));
  const auto V = Potential::quadratic();
  for (auto _ : s) benchmark::DoNotOptimize(reference::hamiltonian(c, V));
}
void BM_hamiltonian_parallel(benchmark::State& s) {
  const auto c = config(static_cast<std::size_t>(s.range(0)));
  const auto V = Potential::quadratic();
  for (auto _ : s) benchmark::DoNotOptimize(hamiltonian(c, V));
}
void BM_cost_reference(benchmark::State& s) {
  const auto n = static_cast<std::size_t>(s.range(0));
  const auto a = DiscreteMeasure::uniform(SpaceDim(2), cloud(n, 2, 1)), b = DiscreteMeasure::uniform(SpaceDim(2), cloud(n, 2, 2));
  for (auto _ : s) benchmark::DoNotOptimize(reference::cost_matrix(a, b, 1.0, std::numeric_limits<double>::infinity()));
}
void BM_cost_parallel(benchmark::State& s) {
  const auto n = static_cast<std::size_t>(s.range(0));
  const auto a = DiscreteMeasure::uniform(SpaceDim(2), cloud(n, 2, 1)), b = DiscreteMeasure::uniform(SpaceDim(2), cloud(n, 2, 2));
  for (auto _ : s) benchmark::DoNotOptimize(build_cost_matrix(a, b, 1.0));
}

}  // namespace

BENCHMARK(BM_pair_reference)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(BM_pair_parallel)->Arg(256)->Arg(1024)->Arg(4096);
BENCHMARK(BM_hamiltonian_reference)->Arg(1024)->Arg(4096);
BENCHMARK(BM_hamiltonian_parallel)->Arg(1024)->Arg(4096);
BENCHMARK(BM_cost_reference)->Arg(256)->Arg(1024);
BENCHMARK(BM_cost_parallel)->Arg(256)->Arg(1024);

BENCHMARK_MAIN();
