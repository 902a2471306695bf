#include <benchmark/benchmark.h>

#include <vector>

#include "agesched/network.hpp"
#include "agesched/rng.hpp"
#include "agesched/simulation.hpp"
#include "agesched/stationary.hpp"

namespace {

agesched::NetworkSpec two_class(std::size_t n, std::size_t k) {
  agesched::NetworkSpec spec;
  spec.weights.assign(n, 1.0);
  spec.success_probs.resize(n);
  for (std::size_t e = 0; e < n; ++e) spec.success_probs[e] = e < n / 4 ? 0.1 : 0.9;
  spec.interference = agesched::KofN{k};
  return spec;
}

agesched::NetworkSpec ring_matching(std::size_t n) {
  agesched::NetworkSpec spec = two_class(n, 1);
  std::vector<agesched::ActivationSet> sets;
  for (std::size_t e = 0; e < n; ++e) {
    sets.emplace_back(std::vector<agesched::LinkIndex>{e, (e + 2) % n});
    sets.emplace_back(std::vector<agesched::LinkIndex>{e});
  }
  spec.interference = agesched::ExplicitFamily{std::move(sets)};
  return spec;
}

void BM_MaxWeightKofN(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto spec = two_class(n, n / 4);
  agesched::CounterRng rng(7);
  std::vector<double> values(n);
  for (std::size_t e = 0; e < n; ++e) values[e] = rng.uniform(0, e);
  agesched::ActivationSet out;
  for (auto _ : state) {
    agesched::max_weight_set(spec, values, out);
    benchmark::DoNotOptimize(out.members.data());
  }
}
BENCHMARK(BM_MaxWeightKofN)->Arg(20)->Arg(100)->Arg(1000);

void BM_MaxWeightExplicit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto spec = ring_matching(n);
  agesched::CounterRng rng(7);
  std::vector<double> values(n);
  for (std::size_t e = 0; e < n; ++e) values[e] = rng.uniform(0, e);
  agesched::ActivationSet out;
  for (auto _ : state) {
    agesched::max_weight_set(spec, values, out);
    benchmark::DoNotOptimize(out.members.data());
  }
}
BENCHMARK(BM_MaxWeightExplicit)->Arg(20)->Arg(100);

void BM_SolveStationaryKofN(benchmark::State& state) {
  const auto spec = two_class(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) benchmark::DoNotOptimize(agesched::solve_stationary(spec).peak_opt);
}
BENCHMARK(BM_SolveStationaryKofN)->Args({20, 5})->Args({20, 15})->Unit(benchmark::kMillisecond);

void BM_SolveStationaryExplicit(benchmark::State& state) {
  const auto spec = ring_matching(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(agesched::solve_stationary(spec).peak_opt);
}
BENCHMARK(BM_SolveStationaryExplicit)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_Simulate(benchmark::State& state) {
  const auto spec = two_class(20, 5);
  const auto kind = state.range(0);
  agesched::PolicyState policy;
  if (kind == 0) {
    policy = agesched::solve_stationary(spec).policy();
  } else if (kind == 1) {
    policy = agesched::make_virtual_queue(spec, 1.0);
  } else {
    policy = agesched::make_age_based(1.0);
  }
  agesched::RunConfig run;
  run.horizon = 10000;
  for (auto _ : state) {
    benchmark::DoNotOptimize(agesched::run_simulation(spec, policy, run).network_peak);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(run.horizon));
}
BENCHMARK(BM_Simulate)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
