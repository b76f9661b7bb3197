#include <random>

#include <benchmark/benchmark.h>

#include "camsim/eval.hpp"

namespace {

void BM_AveragePrecision(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> pos(0.0, 1000.0), jitter(-4.0, 4.0), score(0.0, 1.0);
  std::vector<camsim::GroundTruth> gts;
  std::vector<camsim::Detection> dets;
  for (std::size_t i = 0; i < n; ++i) {
    const std::int64_t image = static_cast<std::int64_t>(i % 50);
    const double x = pos(rng), y = pos(rng);
    const double dx = jitter(rng), dy = jitter(rng), fx = pos(rng), fy = pos(rng);
    gts.push_back({image, {x, y, x + 30, y + 20}, 50.0});
    dets.push_back({image, {x + dx, y + dy, x + dx + 30, y + dy + 20}, score(rng)});
    dets.push_back({image, {fx, fy, fx + 30, fy + 20}, score(rng)});
  }
  for (auto _ : state) benchmark::DoNotOptimize(camsim::average_precision(dets, gts));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(dets.size()));
}
BENCHMARK(BM_AveragePrecision)->Arg(1000)->Arg(10000);

}  // namespace
