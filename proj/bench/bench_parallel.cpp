// Serial reference vs OpenMP paths for the two parallel kernels.

#include "credo/experiments.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace credo;

void oracle(benchmark::State& state, Execution execution) {
  const Scenario s = make_setting_ii(1.0);
  const VertexSet v = enumerate_vertices(s.polytope);
  const auto samples = static_cast<std::size_t>(state.range(0));
  const int threads = static_cast<int>(state.range(1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(count_optimal_vertices(s.truth, v, Sense::maximize, samples, 1, execution, threads));
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(samples));
}

void trials(benchmark::State& state, Execution execution) {
  const Scenario s = make_setting_ii(1.0);
  ExperimentConfig c;
  c.trials = static_cast<std::size_t>(state.range(0));
  c.threads = static_cast<int>(state.range(1));
  c.mc_samples = 10000;
  c.methods = {Method::credo, Method::point, Method::ns, Method::pto, Method::ro, Method::spo_plus};
  for (auto _ : state) benchmark::DoNotOptimize(run_trials(s, c, execution));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_OracleSerial(benchmark::State& state) { oracle(state, Execution::serial); }
void BM_OracleParallel(benchmark::State& state) { oracle(state, Execution::parallel); }
void BM_TrialsSerial(benchmark::State& state) { trials(state, Execution::serial); }
void BM_TrialsParallel(benchmark::State& state) { trials(state, Execution::parallel); }

}  // namespace

BENCHMARK(BM_OracleSerial)->Args({100000, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleParallel)->ArgsProduct({{100000}, {1, 2, 4, 8}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialsSerial)->Args({20, 1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TrialsParallel)->ArgsProduct({{20}, {1, 2, 4, 8}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
