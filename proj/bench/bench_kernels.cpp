// Serial reference against OpenMP variant for each kernel.

#include "lazard/autbound.hpp"
#include "lazard/corpus.hpp"
#include "lazard/kernels.hpp"

#include <benchmark/benchmark.h>

using namespace lazard;

namespace {

auto group() -> const LazardGroup & {
  static const LazardGroup g(corpus_entry("sl2-p3-s1").data, 2);
  return g;
}

auto table() -> const kernels::MulTable & {
  static const auto t = kernels::mul_table_serial(group());
  return t;
}

template <auto Fn> void BM_mul_table(benchmark::State &state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(Fn(group()));
  state.SetItemsProcessed(state.iterations() * group().element_count() * group().element_count());
}

template <auto Fn> void BM_associativity(benchmark::State &state) {
  const auto &t = table();
  for (auto _ : state)
    benchmark::DoNotOptimize(Fn(t));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(t.order) * t.order *
                          t.order);
}

template <auto Fn> void BM_central_count(benchmark::State &state) {
  const auto &t = table();
  for (auto _ : state)
    benchmark::DoNotOptimize(Fn(t));
}

void BM_aut_search(benchmark::State &state) {
  LazardGroup g(corpus_entry("heisenberg-scaled-p3").data, 1);
  AutSearchOptions opts;
  opts.parallel = state.range(0) != 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(aut_bruteforce(g, opts).order);
}

void BM_lie_search(benchmark::State &state) {
  const ReducedLieRing ring(corpus_entry("sl2-p3-s1").data, 2);
  AutSearchOptions opts;
  opts.parallel = state.range(0) != 0;
  for (auto _ : state)
    benchmark::DoNotOptimize(lie_matrix_automorphisms(ring, opts).order);
}

} // namespace

BENCHMARK(BM_mul_table<kernels::mul_table_serial>)->Name("mul_table/serial");
BENCHMARK(BM_mul_table<kernels::mul_table_omp>)->Name("mul_table/omp");
BENCHMARK(BM_associativity<kernels::associativity_failures_serial>)
    ->Name("associativity/serial")
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_associativity<kernels::associativity_failures_omp>)
    ->Name("associativity/omp")
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_central_count<kernels::central_count_serial>)->Name("central_count/serial");
BENCHMARK(BM_central_count<kernels::central_count_omp>)->Name("central_count/omp");
BENCHMARK(BM_aut_search)->Name("aut_bruteforce")->ArgName("omp")->Arg(0)->Arg(1)
    ->Unit(benchmark::kMillisecond);
BENCHMARK(BM_lie_search)->Name("lie_matrix")->ArgName("omp")->Arg(0)->Arg(1)
    ->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
