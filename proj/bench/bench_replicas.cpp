// Serial reference against the OpenMP replica runner on the same plan.
#include <benchmark/benchmark.h>

#include <omp.h>

#include "errw/replicas.hpp"

namespace {

const errw::LadderGraph& ladder() {
  static const errw::LadderGraph g(errw::tree_preset("segment-2"), 30);
  return g;
}

errw::ReplicaPlan plan(std::uint64_t horizon) {
  errw::ReplicaPlan p;
  p.a = 2.0;
  p.horizon = horizon;
  p.master_seed = 1;
  return p;
}

void BM_Serial(benchmark::State& state) {
  const auto p = plan(static_cast<std::uint64_t>(state.range(1)));
  const auto count = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    auto runs = errw::run_replicas_serial(ladder(), p, count);
    benchmark::DoNotOptimize(runs.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
}

void BM_OpenMP(benchmark::State& state) {
  const auto p = plan(static_cast<std::uint64_t>(state.range(1)));
  const auto count = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    auto runs = errw::run_replicas(ladder(), p, count, omp_get_max_threads());
    benchmark::DoNotOptimize(runs.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(1));
  state.counters["threads"] = omp_get_max_threads();
}

}  // namespace

// items/s is reinforced steps per second.
BENCHMARK(BM_Serial)->Args({64, 10000})->Args({512, 10000})->Args({64, 100000})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OpenMP)->Args({64, 10000})->Args({512, 10000})->Args({64, 100000})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
