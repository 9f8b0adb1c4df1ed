// Serial reference paths against the OpenMP / batched kernels.
#include <benchmark/benchmark.h>

#include <vector>

#include "stochlog/fpe_solver.hpp"
#include "stochlog/likelihood.hpp"
#include "stochlog/mc_kernels.hpp"
#include "stochlog/sde_sim.hpp"

using namespace stochlog;

namespace {

Exec exec_of(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

void label(benchmark::State& state) { state.SetLabel(state.range(0) ? "parallel" : "serial"); }

void BM_EmEnsemble(benchmark::State& state) {
  const Params p = Params::reference_scenario();
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_em_endpoints(p, 0.25, 10.0, 1e-3, 200, 1, exec_of(state)));
  }
  label(state);
}
BENCHMARK(BM_EmEnsemble)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Pedersen(benchmark::State& state) {
  const Params p = Params::reference_scenario();
  const McSettings s{1.0, 1e-3, 500, 1};
  for (auto _ : state) benchmark::DoNotOptimize(pedersen_density(p, 0.25, 2.0, s, exec_of(state)));
  label(state);
}
BENCHMARK(BM_Pedersen)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_BridgeModified(benchmark::State& state) {
  const Params p = Params::reference_scenario();
  const McSettings s{1.0, 1e-3, 500, 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(bridge_density(p, 0.25, 2.0, s, BridgeVariant::modified, exec_of(state)));
  }
  label(state);
}
BENCHMARK(BM_BridgeModified)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

std::vector<double> starts() {
  std::vector<double> x;
  for (int i = 0; i < 64; ++i) x.push_back(0.05 + 0.05 * i);
  return x;
}

// One Dirac at a time through the single right-hand-side solver.
void BM_FdKernelsReference(benchmark::State& state) {
  const Params p = Params::reference_scenario();
  const Grid g = Grid::covering(p, 0.25, 1e-3);
  const auto x = starts();
  for (auto _ : state) {
    for (double x0 : x) benchmark::DoNotOptimize(solve_kernel(p, x0, 0.05, g, 1e-3));
  }
}
BENCHMARK(BM_FdKernelsReference)->Unit(benchmark::kMillisecond);

void BM_FdKernelsBatched(benchmark::State& state) {
  const Params p = Params::reference_scenario();
  const Grid g = Grid::covering(p, 0.25, 1e-3);
  const auto x = starts();
  for (auto _ : state) benchmark::DoNotOptimize(solve_kernels(p, x, 0.05, g, 1e-3, exec_of(state)));
  label(state);
}
BENCHMARK(BM_FdKernelsBatched)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_FdLikelihood(benchmark::State& state) {
  const Params p = Params::reference_scenario();
  const Trajectory t = simulate_em(p, 0.25, 10.0, 1e-3, 1, 0);
  const ObservationSeries obs = sample_observations(t, 0.05);
  LikelihoodSettings s;
  s.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(neg_log_likelihood(p, obs, s).value);
  label(state);
}
BENCHMARK(BM_FdLikelihood)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
