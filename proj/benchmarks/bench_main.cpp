#include <benchmark/benchmark.h>

#include "pivm/analysis.hpp"
#include "pivm/hensel.hpp"
#include "pivm/phase.hpp"

using namespace pivm;

static void BM_Multiply(benchmark::State& state) {
  const PrimeContext ctx(7, static_cast<int>(state.range(0)));
  const Padic x = Padic::from_rational(123456789, 1000003, ctx);
  const Padic y = Padic::from_rational(-987654321, 2000003, ctx);
  for (auto _ : state) benchmark::DoNotOptimize(x * y);
}
BENCHMARK(BM_Multiply)->Arg(16)->Arg(64)->Arg(256);

static void BM_Exp(benchmark::State& state) {
  const PrimeContext ctx(5, static_cast<int>(state.range(0)));
  const Padic x = Padic::from_rational(5 * 31, 17, ctx);
  for (auto _ : state) benchmark::DoNotOptimize(exp_p(x));
}
BENCHMARK(BM_Exp)->Arg(16)->Arg(64);

static void BM_Log(benchmark::State& state) {
  const PrimeContext ctx(5, static_cast<int>(state.range(0)));
  const Padic x = Padic::from_rational(17 + 5 * 31, 17, ctx);
  for (auto _ : state) benchmark::DoNotOptimize(log_p(x));
}
BENCHMARK(BM_Log)->Arg(16)->Arg(64);

static void BM_HenselG(benchmark::State& state) {
  const auto cp = CouplingParams::make(PrimeContext(7, static_cast<int>(state.range(0))), 3, 7, 7);
  for (auto _ : state) benchmark::DoNotOptimize(hensel_translation_invariant(cp));
}
BENCHMARK(BM_HenselG)->Arg(16)->Arg(64);

static void BM_SolveTranslationInvariant(benchmark::State& state) {
  const auto cp = CouplingParams::make(PrimeContext(13, 16), static_cast<int>(state.range(0)), 13, 13);
  for (auto _ : state) benchmark::DoNotOptimize(solve_translation_invariant(cp));
}
BENCHMARK(BM_SolveTranslationInvariant)->Arg(2)->Arg(3)->Arg(4);

static void BM_EnumeratePartition(benchmark::State& state) {
  const auto cp = CouplingParams::make(PrimeContext(5, 8), 2, 5, 5);
  const int n = static_cast<int>(state.range(0));
  const TreeIndex t = TreeIndex::build(2, n);
  const UField u = constant_field(t, fix_in_Ep(cp).value);
  for (auto _ : state) benchmark::DoNotOptimize(partition_function_from_u(u, t, cp));
  state.SetItemsProcessed(state.iterations() * (std::int64_t{1} << t.vertex_count()));
}
BENCHMARK(BM_EnumeratePartition)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

static void BM_Compatibility(benchmark::State& state) {
  const auto cp = CouplingParams::make(PrimeContext(5, 8), 2, 5, 5);
  const TreeIndex t = TreeIndex::build(2, 3);
  const HField h = constant_field(t, h_from_u(fix_in_Ep(cp).value, Padic::one(cp.ctx), cp));
  for (auto _ : state) benchmark::DoNotOptimize(compatibility_check(h, t, cp, static_cast<unsigned>(state.range(0))));
}
BENCHMARK(BM_Compatibility)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
