#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "kspic/grid.hpp"
#include "kspic/hybrid.hpp"
#include "kspic/implicit_solver.hpp"
#include "kspic/nbody.hpp"
#include "kspic/particles.hpp"

using namespace kspic;

namespace {

std::vector<Vec2> uniform_points(const GridSpec& g, std::size_t n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, g.lx()), uy(0.0, g.ly());
  std::vector<Vec2> pos(n);
  for (auto& p : pos) p = {ux(rng), uy(rng)};
  return pos;
}

void BM_Deposit(benchmark::State& state) {
  const auto g = GridSpec::from_lengths(3.2, 3.2, 0.05);
  const ParticleEnsemble ens(uniform_points(g, static_cast<std::size_t>(state.range(0)), 1), 25.0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(deposit(ens, g));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Deposit)->Arg(4096)->Arg(65536);

void BM_ImplicitSolve(benchmark::State& state) {
  const double dx = 3.2 / static_cast<double>(state.range(0));
  const auto g = GridSpec::from_lengths(3.2, 3.2, dx);
  const ImplicitSolver solver(g, 1, 1.0, 0.1);
  GridField c(g, 0.0), p(g, 1.0);
  for (auto _ : state) {
    c = solver.step(c, p);
    benchmark::DoNotOptimize(c.values().data());
  }
}
BENCHMARK(BM_ImplicitSolve)->Arg(64)->Arg(128);

void BM_Advance(benchmark::State& state) {
  const auto g = GridSpec::from_lengths(3.2, 3.2, 0.05);
  ParticleEnsemble ens(uniform_points(g, 4096, 2), 25.0, 2);
  GridField c(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) c(i, j) = std::cos(2.0 * i * g.dx) * std::cos(3.0 * j * g.dx);
  const auto [cx, cy] = build_gradient(c);
  StepPolicy policy;
  policy.dt = 0.1;
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state) advance_particles(ens, cx, cy, 0.005, 0.1, policy, threads);
  state.SetItemsProcessed(state.iterations() * static_cast<long long>(ens.size()));
}
BENCHMARK(BM_Advance)->Arg(1)->Arg(2);

void BM_NBodyDrift(benchmark::State& state) {
  const auto g = GridSpec::from_lengths(1.0, 1.0, 0.05);
  NBodyParams params;
  const NBodyState s(uniform_points(g, static_cast<std::size_t>(state.range(0)), 3), 1.0, params, 3);
  for (auto _ : state) benchmark::DoNotOptimize(nbody_drift(s));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_NBodyDrift)->Arg(250)->Arg(1000)->Complexity(benchmark::oNSquared);

}  // namespace

BENCHMARK_MAIN();
