#include <benchmark/benchmark.h>

#include "permprime/algebra.hpp"
#include "permprime/chain.hpp"
#include "permprime/digraph.hpp"
#include "permprime/iso.hpp"
#include "permprime/power.hpp"

using namespace permprime;

namespace {

Digraph chain2() { return build_digraph(2, {{0, 0}, {1, 1}, {0, 1}}); }

Digraph path3() {
  return build_digraph(3, {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 0}, {1, 2}, {2, 1}});
}

FiniteAlgebra z3() {
  FiniteAlgebra a{3, {}};
  Operation plus{"plus", 2, {}};
  for (int x = 0; x < 3; ++x) {
    for (int y = 0; y < 3; ++y) {
      plus.table.push_back(static_cast<std::uint8_t>((x + y) % 3));
    }
  }
  a.operations = {plus, Operation{"neg", 1, {0, 2, 1}}, Operation{"zero", 0, {0}}};
  return a;
}

void BM_exponential(benchmark::State& state) {
  const Digraph g = path3();
  for (auto _ : state) {
    benchmark::DoNotOptimize(exponential(g, g));
  }
}
BENCHMARK(BM_exponential);

void BM_maltsev_term_search(benchmark::State& state) {
  const FiniteAlgebra a = z3();
  for (auto _ : state) {
    benchmark::DoNotOptimize(find_maltsev_term(a));
  }
}
BENCHMARK(BM_maltsev_term_search);

void BM_free_algebra_closure(benchmark::State& state) {
  const FiniteAlgebra a = z3();
  for (auto _ : state) {
    benchmark::DoNotOptimize(free_algebra_on_two(a));
  }
}
BENCHMARK(BM_free_algebra_closure);

void BM_claim1(benchmark::State& state) {
  const PowerContext ctx =
      make_power_context(path3(), 1, path3(), 1, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(check_claim1(ctx));
  }
}
BENCHMARK(BM_claim1)->Arg(1)->Arg(2);

void BM_quotient_power(benchmark::State& state) {
  const PowerContext ctx = make_power_context(path3(), 1, path3(), 1, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(quotient_power(ctx));
  }
}
BENCHMARK(BM_quotient_power);

void BM_isomorphism(benchmark::State& state) {
  const Digraph a = exponential(path3(), path3());
  const Digraph b = a;
  for (auto _ : state) {
    benchmark::DoNotOptimize(are_isomorphic(a, b));
  }
}
BENCHMARK(BM_isomorphism);

void BM_chain_verify(benchmark::State& state) {
  const Digraph g0 = chain2();
  for (auto _ : state) {
    benchmark::DoNotOptimize(verify_chain(g0, g0));
  }
}
BENCHMARK(BM_chain_verify);

}  // namespace

BENCHMARK_MAIN();
