#include <benchmark/benchmark.h>

#include "iabplan/connectivity.hpp"
#include "iabplan/instances.hpp"
#include "iabplan/oracle.hpp"
#include "iabplan/program.hpp"
#include "iabplan/solver.hpp"

namespace iab {
namespace {

void BM_ReferenceGrid(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reference_grid_instance(1));
}
BENCHMARK(BM_ReferenceGrid)->Unit(benchmark::kMillisecond);

void BM_SpanningTree(benchmark::State& state) {
  const GridInstance g = reference_grid_instance(1);
  for (auto _ : state) benchmark::DoNotOptimize(backhaul_spanning_tree(g.links, g.anchors));
}
BENCHMARK(BM_SpanningTree);

void BM_SolveReferenceGrid(benchmark::State& state) {
  const GridInstance g = reference_grid_instance(1);
  const Variant v = all_variants()[static_cast<std::size_t>(state.range(0))];
  const RateProblem p = assemble(g.links, make_scenario(v, g.links, g.anchors, 1), g.anchors, g.budget);
  for (auto _ : state) benchmark::DoNotOptimize(solve(p));
  state.SetLabel(std::string(to_string(v)));
}
BENCHMARK(BM_SolveReferenceGrid)->DenseRange(0, 4)->Unit(benchmark::kMillisecond);

void BM_SolveTightTolerance(benchmark::State& state) {
  const GridInstance g = reference_grid_instance(1);
  const RateProblem p =
      assemble(g.links, make_scenario(Variant::kIabMeshLB, g.links, g.anchors, 1), g.anchors, g.budget);
  SolverConfig cfg;
  cfg.duality_gap_tol = 1e-9;
  for (auto _ : state) benchmark::DoNotOptimize(solve(p, cfg));
}
BENCHMARK(BM_SolveTightTolerance)->Unit(benchmark::kMillisecond);

void BM_SolveRelayChain(benchmark::State& state) {
  const RateProblem p = relay_chain_instance(4e9, 1.5e9).assemble();
  for (auto _ : state) benchmark::DoNotOptimize(solve(p));
}
BENCHMARK(BM_SolveRelayChain);

void BM_Oracle(benchmark::State& state) {
  const RateProblem p = random_small_instance(3).assemble();
  const int resolution = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(brute_force_oracle(p, resolution));
}
BENCHMARK(BM_Oracle)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace iab

BENCHMARK_MAIN();
