#include <benchmark/benchmark.h>

#include "oracles.hpp"
#include "scarp/moga.hpp"

namespace {

using namespace scarp;

// Synthetic instance with gdb-like size: n nodes, about 2n required edges.
Instance make_instance(int required) {
  testing::SyntheticSpec spec;
  spec.nodes = std::max(6, required / 2);
  spec.required = required;
  spec.capacity = 5.0 * spec.max_demand;
  return testing::synthetic_instance(spec, 11);
}

void BM_Split(benchmark::State& state) {
  const auto inst = make_instance(static_cast<int>(state.range(0)));
  const TaskGraph g(inst);
  Rng rng(1);
  const auto chrom = random_chromosome(g, rng);
  for (auto _ : state) benchmark::DoNotOptimize(split(chrom, g));
}
BENCHMARK(BM_Split)->Arg(11)->Arg(22)->Arg(55);

void BM_Evaluate(benchmark::State& state) {
  const auto inst = make_instance(static_cast<int>(state.range(0)));
  const TaskGraph g(inst);
  Rng rng(2);
  const auto sol = split(random_chromosome(g, rng), g);
  EvalOptions opts;
  opts.method = state.range(1) ? MakespanMethod::kExact : MakespanMethod::kTruncated;
  state.SetLabel(std::to_string(sol.t) + " trips");
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_stochastic(sol, g, g.capacity(), opts));
}
BENCHMARK(BM_Evaluate)->Args({22, 0})->Args({22, 1})->Args({55, 0})->Args({55, 1});

void BM_LocalSearch(benchmark::State& state) {
  const auto inst = make_instance(22);
  const TaskGraph g(inst);
  const Evaluator eval(g, default_eval_settings(g));
  Rng rng(3);
  std::vector<Individual> pop;
  for (int i = 0; i < 10; ++i) pop.push_back(eval.evaluate(random_chromosome(g, rng)));
  const auto bounds = bounds_of(pop);
  for (auto _ : state) benchmark::DoNotOptimize(directed_local_search(pop[0], bounds, eval, 60));
}
BENCHMARK(BM_LocalSearch);

void BM_Generations(benchmark::State& state) {
  const auto inst = make_instance(22);
  const TaskGraph g(inst);
  const Evaluator eval(g, default_eval_settings(g));
  GAParams p;
  p.iterations = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nsga2_run(eval, p));
}
BENCHMARK(BM_Generations)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
