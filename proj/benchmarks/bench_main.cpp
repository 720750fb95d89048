#include <benchmark/benchmark.h>

#include "xmodel/ctmc.hpp"
#include "xmodel/fluid.hpp"
#include "xmodel/ftsp.hpp"
#include "xmodel/levy.hpp"
#include "xmodel/model.hpp"
#include "xmodel/qbd.hpp"
#include "xmodel/rng.hpp"

namespace {

using namespace xmodel;

void BM_SolveFtsp(benchmark::State& state) {
  const auto p = canonical_params();
  const auto gamma = stationary_point(p);
  for (auto _ : state) benchmark::DoNotOptimize(solve_ftsp(gamma, p).solution.pi_positive);
}
BENCHMARK(BM_SolveFtsp);

void BM_FluidIntegrate(benchmark::State& state) {
  const auto p = canonical_params();
  const FluidState x0{0.5, 0.1, 0.1};
  for (auto _ : state) benchmark::DoNotOptimize(integrate(x0, p, 5.0, 1e-3).states.size());
}
BENCHMARK(BM_FluidIntegrate)->Unit(benchmark::kMillisecond);

void BM_CtmcEvents(benchmark::State& state) {
  const auto inst = scaled_instance(canonical_params(), state.range(0));
  auto s = initial_state(inst, stationary_point(inst.params));
  CounterRng rng(7);
  std::int64_t events = 0;
  for (auto _ : state) {
    const auto outcome = next_event(s, inst, rng);
    s = outcome.state;
    ++events;
  }
  state.SetItemsProcessed(events);
}
BENCHMARK(BM_CtmcEvents)->Arg(200)->Arg(2000);

void BM_LevyDistance(benchmark::State& state) {
  CounterRng rng(11);
  std::vector<double> a(state.range(0)), b(state.range(0));
  for (auto& v : a) v = rng.uniform();
  for (auto& v : b) v = rng.uniform() + 0.01;
  const auto fa = StepCdf::from_samples(a);
  const auto fb = StepCdf::from_samples(b);
  for (auto _ : state) benchmark::DoNotOptimize(levy_distance(fa, fb));
}
BENCHMARK(BM_LevyDistance)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
