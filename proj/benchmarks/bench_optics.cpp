#include <benchmark/benchmark.h>

#include "camsim/optics.hpp"
#include "camsim/scene.hpp"

namespace {

camsim::Scene bench_scene(std::size_t side) {
  camsim::SceneSpec s;
  s.width = side;
  s.height = side;
  s.grid = camsim::WavelengthGrid(400, 50, 7);
  s.texture = {0.4, 8};
  s.seed = 3;
  return camsim::synthesize(s);
}

void BM_Synthesize(benchmark::State& state) {
  camsim::SceneSpec s;
  s.width = s.height = static_cast<std::size_t>(state.range(0));
  s.grid = camsim::WavelengthGrid(400, 50, 7);
  s.texture = {0.4, 8};
  for (auto _ : state) benchmark::DoNotOptimize(camsim::synthesize(s));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_Synthesize)->Arg(256)->Arg(1024);

void BM_SensorIrradiance(benchmark::State& state) {
  const auto scene = bench_scene(static_cast<std::size_t>(state.range(0)));
  const camsim::LensSpec lens;
  for (auto _ : state) benchmark::DoNotOptimize(camsim::sensor_irradiance(scene, lens));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_SensorIrradiance)->Arg(256)->Arg(1024);

}  // namespace
