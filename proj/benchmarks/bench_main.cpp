#include <benchmark/benchmark.h>

#include "nlab/dulac.hpp"
#include "nlab/statistics.hpp"

using namespace nlab;

namespace {

Coefficients coeffs() {
  Coefficients c;
  c.a0 = 15;
  c.a2 = 5;
  c.b0 = 1;
  c.b2 = 3;
  c.a1 = c.b1 = 1;
  c.c0 = c.c2 = 1;
  c.ell = 10;
  return c;
}

void BM_DulacTransit(benchmark::State& state) {
  const Model m = static_cast<Model>(state.range(0));
  const NeutralParams p(m, coeffs());
  for (auto _ : state) benchmark::DoNotOptimize(dulac_map(p, 1e-5).tau);
  state.SetLabel(std::string(to_string(m)));
}
BENCHMARK(BM_DulacTransit)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_TailIterates(benchmark::State& state) {
  const PoincareParams p(NeutralParams(Model::TwoD, coeffs()), 1.6, 1.12, 10.0);
  TailOptions opts;
  opts.n_iterates = static_cast<std::size_t>(state.range(0));
  opts.burn_in = 1000;
  opts.chunks = 8;
  opts.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(return_time_tail(p, opts).fitted_exponent);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TailIterates)->Arg(1'000'000)->Unit(benchmark::kMillisecond);

void BM_CorrelationSamples(benchmark::State& state) {
  const PoincareParams p(NeutralParams(Model::TwoD, coeffs()), 1.6, 1.12, 10.0);
  CorrelationOptions opts;
  opts.n_samples = static_cast<std::size_t>(state.range(0));
  opts.burn_in = 1000;
  opts.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(correlation_decay(p, {}, {}, opts).rho);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CorrelationSamples)->Arg(100'000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
