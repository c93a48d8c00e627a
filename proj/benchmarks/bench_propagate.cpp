#include <numbers>

#include <benchmark/benchmark.h>

#include "revival/propagate.hpp"
#include "revival/spectrum.hpp"

namespace {

using namespace revival;

// One drive period of the driven box packet on a window of range(0) levels.
void run_period(benchmark::State& state, Integrator integrator, Frame frame) {
  const int levels = static_cast<int>(state.range(0));
  const auto model = SpectrumModel::box(0.05);
  ResonanceParams p;
  p.hbar_eff = 0.05;
  p.r = 2.0;
  p.lambda = 0.05;
  const LevelWindow window{1, levels};
  const auto psi0 = init_gaussian(12.0, 1.5, window);
  const auto V = coupling_matrix({CouplingModel::Mode::BoxPosition, 1.0}, 1, levels, 1);
  EvolutionConfig ev;
  ev.integrator = integrator;
  ev.frame = frame;
  ev.dt = 2.0 * std::numbers::pi / (integrator == Integrator::Rk4 ? 4000.0 : 200.0);
  ev.t_max = 2.0 * std::numbers::pi;
  ev.edge_population_limit = 1.0;
  ev.norm_drift_limit = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(evolve(psi0, model, V, p, ev).max_norm_drift);
  }
  state.SetComplexityN(levels);
}

void BM_ExpMidpointBare(benchmark::State& s) { run_period(s, Integrator::ExpMidpoint, Frame::Bare); }
void BM_ExpMidpointRotating(benchmark::State& s) {
  run_period(s, Integrator::ExpMidpoint, Frame::Rotating);
}
void BM_Rk4Rotating(benchmark::State& s) { run_period(s, Integrator::Rk4, Frame::Rotating); }

BENCHMARK(BM_ExpMidpointBare)->Arg(32)->Arg(48)->Arg(96)->Complexity();
BENCHMARK(BM_ExpMidpointRotating)->Arg(32)->Arg(48)->Arg(96)->Complexity();
BENCHMARK(BM_Rk4Rotating)->Arg(32)->Arg(48);

void BM_RwaPeriod(benchmark::State& state) {
  const auto model = SpectrumModel::box(0.01);
  ResonanceParams p;
  p.hbar_eff = 0.01;
  p.r = 10.0;
  p.lambda = 0.02;
  const LevelWindow window{1, 60};
  const auto psi0 = init_gaussian(10.0, 2.0, window);
  EvolutionConfig ev;
  ev.frame = Frame::Rotating;
  ev.rwa = true;
  ev.dt = std::numbers::pi / 100.0;
  ev.t_max = 2.0 * std::numbers::pi;
  for (auto _ : state) {
    benchmark::DoNotOptimize(evolve_rwa(psi0, model, p, ev).max_norm_drift);
  }
}
BENCHMARK(BM_RwaPeriod);

}  // namespace
