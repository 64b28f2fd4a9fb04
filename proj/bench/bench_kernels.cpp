// Serial reference path against the OpenMP path for the hot kernels.

#include <benchmark/benchmark.h>

#include "dopfocus/detectors.hpp"

using namespace dopfocus;

namespace {

struct Fixture {
  RadarParams params = make_params(100, 10e-6, 2000, 5e-6);
  PulseShape shape{params};
  CoefficientSet kappa = select_kappa(params, 200, KappaMode::consecutive);
  Dictionary dict = build_dictionary(params, shape, kappa, half_bin_delay(params));
  std::vector<Target> scene = random_scene(params, 5, 3);
  XampleSet x = xample_analytic(params, shape, scene, nullptr, kappa, 1e-12, 4);
  Window rect = make_window(WindowKind::rectangular, params.pulse_count);
};

const Fixture& fixture() {
  static const Fixture f;
  return f;
}

Exec exec_of(const benchmark::State& state) {
  return state.range(0) == 0 ? Exec::serial : Exec::parallel;
}

void BM_FocusGrid(benchmark::State& state) {
  const auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(focus_grid(f.x, 200, f.rect, exec_of(state)));
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}

void BM_FocusingDetect(benchmark::State& state) {
  const auto& f = fixture();
  FocusingOptions o;
  o.targets = 5;
  o.M = 200;
  o.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(focusing_detect(f.x, f.dict, o));
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}

void BM_ClassicMap(benchmark::State& state) {
  static const auto p = make_params(100, 10e-6, 200, 5e-6);
  static const PulseShape shape(p);
  static const auto sig = synthesize(p, shape, random_scene(p, 5, 3));
  ClassicOptions o;
  o.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(classic_map(sig, p, shape, o));
  state.SetLabel(state.range(0) == 0 ? "serial" : "parallel");
}

}  // namespace

BENCHMARK(BM_FocusGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FocusingDetect)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ClassicMap)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
