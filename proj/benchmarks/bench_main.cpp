#include <benchmark/benchmark.h>

#include "limcom/boundary.hpp"
#include "limcom/contract.hpp"
#include "limcom/valuation.hpp"
#include "limcom/vi_oracle.hpp"

using namespace limcom;

namespace {

const ValuationContext& reference_context() {
  static const ValuationContext ctx(solve_boundary(derive_constants(ModelParams{}), 256));
  return ctx;
}

void BM_SolveBoundary(benchmark::State& state) {
  const auto c = derive_constants(ModelParams{});
  for (auto _ : state) benchmark::DoNotOptimize(solve_boundary(c, static_cast<int>(state.range(0))).values[0]);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveBoundary)->RangeMultiplier(2)->Range(64, 1024)->Unit(benchmark::kMillisecond)->Complexity();

void BM_PremiumQ(benchmark::State& state) {
  const auto& ctx = reference_context();
  for (auto _ : state) benchmark::DoNotOptimize(premium_Q(ctx, 0.0, 1.7));
}
BENCHMARK(BM_PremiumQ)->Unit(benchmark::kMicrosecond);

void BM_MarginalDual(benchmark::State& state) {
  const auto& ctx = reference_context();
  for (auto _ : state) benchmark::DoNotOptimize(marginal_dual(ctx, 3.0, 1.9, 1.0));
}
BENCHMARK(BM_MarginalDual)->Unit(benchmark::kMicrosecond);

void BM_DualJ(benchmark::State& state) {
  const auto& ctx = reference_context();
  for (auto _ : state) benchmark::DoNotOptimize(dual_J(ctx, 0.0, 1.85, 1.0));
}
BENCHMARK(BM_DualJ)->Unit(benchmark::kMillisecond);

void BM_MonteCarlo(benchmark::State& state) {
  const auto& ctx = reference_context();
  for (auto _ : state) {
    benchmark::DoNotOptimize(monte_carlo_check(ctx, 1.85, static_cast<std::size_t>(state.range(0)), 600, 1).agent);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MonteCarlo)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_FdOracle(benchmark::State& state) {
  const auto c = derive_constants(ModelParams{});
  auto o = FDOptions::defaults_for(c);
  o.n_time = o.n_space = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_vi_fd(c, o).q[0]);
}
BENCHMARK(BM_FdOracle)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
