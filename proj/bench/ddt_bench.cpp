// Serial reference against the OpenMP kernels. Run with OMP_NUM_THREADS set
// to compare scaling; on one core the two should be close.

#include <benchmark/benchmark.h>

#include "ddt/grouptest.hpp"
#include "ddt/hqsnull.hpp"
#include "ddt/simbench.hpp"
#include "ddt/threshold.hpp"

using namespace ddt;

namespace {

const ConnectivityCohort& cohort() {
  static const ConnectivityCohort c = [] {
    sim::SimDesign d;
    d.n_nodes = 90;
    const SymmetricMatrix b = sim::base_network(d.structure, d.n_nodes, d.base_edge_sd, 1);
    return sim::simulate_cohort(d, b, 2).cohort;
  }();
  return c;
}

Exec exec_of(const benchmark::State& s) { return s.range(0) == 0 ? Exec::Serial : Exec::Parallel; }

void BM_EdgewiseWelch(benchmark::State& state) {
  EdgeTestConfig cfg;
  for (auto _ : state) benchmark::DoNotOptimize(edgewise_pvalues(cohort(), cfg, exec_of(state)));
}

void BM_EdgewisePermutation(benchmark::State& state) {
  EdgeTestConfig cfg;
  cfg.method = EdgeTest::Permutation;
  cfg.permutations = 200;
  cfg.seed = 3;
  for (auto _ : state) benchmark::DoNotOptimize(edgewise_pvalues(cohort(), cfg, exec_of(state)));
}

void BM_GenerateNull(benchmark::State& state) {
  const MomentSummary m = MomentSummary::from(1.0, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(generate_null(m, 90, 1000, 4, exec_of(state)));
}

void BM_MixtureSample(benchmark::State& state) {
  const MomentSummary m = MomentSummary::from(1.0, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(mixture_sample(m, 1'000'000, 5, exec_of(state)));
}

void BM_RunExperiment(benchmark::State& state) {
  sim::SimDesign d;
  d.replicates = 8;
  for (auto _ : state) benchmark::DoNotOptimize(sim::run_experiment(d, exec_of(state)));
}

}  // namespace

BENCHMARK(BM_EdgewiseWelch)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EdgewisePermutation)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GenerateNull)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MixtureSample)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RunExperiment)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
