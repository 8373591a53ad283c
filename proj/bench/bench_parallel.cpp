// Serial reference path against the OpenMP path for the two Monte Carlo drivers.

#include "repairpred/montecarlo.hpp"

#include <benchmark/benchmark.h>
#include <omp.h>

using namespace repairpred::montecarlo;

namespace {

SimConfig study_config(int n) {
  SimConfig cfg;
  cfg.replications = n;
  cfg.targets = {{1, 1}, {2, 2}, {3, 3}};
  cfg.methods = {Method::bayes_equitailed, Method::bayes_hpd, Method::wald};
  return cfg;
}

SimConfig check_config(int n) {
  SimConfig cfg;
  cfg.replications = n;
  cfg.n = 20;
  cfg.r = 16;
  cfg.targets = {{3, 2}};
  return cfg;
}

void study_serial(benchmark::State& state) {
  const auto cfg = study_config(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_performance_study_serial(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void study_parallel(benchmark::State& state) {
  const auto cfg = study_config(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_performance_study(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = omp_get_max_threads();
}

void check_serial(benchmark::State& state) {
  const auto cfg = check_config(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_model_check_serial(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void check_parallel(benchmark::State& state) {
  const auto cfg = check_config(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(run_model_check(cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = omp_get_max_threads();
}

}  // namespace

BENCHMARK(study_serial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(study_parallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(check_serial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(check_parallel)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
