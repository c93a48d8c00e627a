#include <benchmark/benchmark.h>

#include "revival/mathieu.hpp"
#include "revival/quasienergy.hpp"
#include "revival/spectrum.hpp"

namespace {

void BM_SeriesValue(benchmark::State& state) {
  double q = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(revival::char_value_series(2.5, q));
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_SeriesValue);

void BM_MatrixValue(benchmark::State& state) {
  const int M = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(revival::char_value_matrix(2.5, 4.0, M).a);
  }
  state.SetComplexityN(M);
}
BENCHMARK(BM_MatrixValue)->RangeMultiplier(2)->Range(16, 512)->Complexity();

void BM_ConvergedValue(benchmark::State& state) {
  const double q = static_cast<double>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(revival::char_value_converged(1.7, q).a);
  }
}
BENCHMARK(BM_ConvergedValue)->Arg(1)->Arg(10)->Arg(40);

void BM_TimeScales(benchmark::State& state) {
  const auto model = revival::SpectrumModel::box(0.05);
  revival::ResonanceParams p;
  p.hbar_eff = 0.05;
  p.r = 2.0;
  p.lambda = 0.05;
  for (auto _ : state) {
    benchmark::DoNotOptimize(revival::time_scales(model, p, 3.25));
  }
}
BENCHMARK(BM_TimeScales);

}  // namespace
