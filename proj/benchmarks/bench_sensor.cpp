#include <benchmark/benchmark.h>

#include "camsim/isp.hpp"
#include "camsim/optics.hpp"
#include "camsim/scene.hpp"
#include "camsim/sensor.hpp"

namespace {

struct Fixture {
  camsim::IrradianceCube irr;
  camsim::SensorSpec sensor;

  explicit Fixture(std::size_t side) {
    camsim::SceneSpec s;
    s.width = s.height = side;
    s.grid = camsim::WavelengthGrid(400, 50, 7);
    s.texture = {0.4, 8};
    const auto scene = camsim::synthesize(s);
    irr = camsim::sensor_irradiance(scene, camsim::LensSpec{});
    sensor = camsim::fit_dye_to_scene(camsim::SensorSpec{}, scene);
  }
};

void BM_Integrate(benchmark::State& state) {
  const Fixture f(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(camsim::integrate(f.irr, f.sensor, 1e-3));
}
BENCHMARK(BM_Integrate)->Arg(512)->Arg(1024);

void BM_ApplyNoise(benchmark::State& state) {
  const camsim::Plane<double> e(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(0)),
                                2000.0);
  const camsim::SensorSpec sensor;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(camsim::apply_noise(e, sensor, 1e-3, ++seed));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_ApplyNoise)->Arg(256)->Arg(1024);

void BM_Render(benchmark::State& state) {
  const Fixture f(static_cast<std::size_t>(state.range(0)));
  const auto frame = camsim::capture(f.irr, f.sensor, 1e-3, 1);
  const camsim::PipelineConfig isp;
  for (auto _ : state) benchmark::DoNotOptimize(camsim::render(frame, isp));
}
BENCHMARK(BM_Render)->Arg(512)->Arg(1024);

}  // namespace
