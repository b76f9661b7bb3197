#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "camsim/error.hpp"
#include "camsim/experiments.hpp"
#include "test_util.hpp"

using namespace camsim;
using nlohmann::json;

namespace {

// A few small random scenes; the sensor dye is fitted to the 240×160 raster.
json tiny_config(const std::filesystem::path& out, std::size_t count = 3) {
  return {{"seed", 5},
          {"output_dir", out.string()},
          {"scenes",
           {{"set", "random"},
            {"count", count},
            {"targets_per_scene", 2},
            {"min_distance_m", 10},
            {"max_distance_m", 40},
            {"spec",
             {{"width", 240},
              {"height", 160},
              {"focal_length_mm", 1.5},
              {"grid", {{"start_nm", 400}, {"step_nm", 100}, {"count", 4}}},
              {"texture", {{"amplitude", 0.3}, {"cell_px", 8}}}}}}},
          {"label_policy", {{"min_box_w", 1}, {"min_box_h", 1}}},
          {"detector", {{"proxy", {{"fp_rate_per_image", 1.0}}}}},
          {"fit_dye_to_scene", true},
          {"max_distance_m", 50}};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

class ScopedThreads {
 public:
  explicit ScopedThreads(const char* n) {
    if (const char* old = std::getenv("CAMSIM_THREADS")) old_ = old;
    setenv("CAMSIM_THREADS", n, 1);
  }
  ~ScopedThreads() {
    if (old_.empty()) {
      unsetenv("CAMSIM_THREADS");
    } else {
      setenv("CAMSIM_THREADS", old_.c_str(), 1);
    }
  }

 private:
  std::string old_;
};

}  // namespace

TEST(Seeds, CaptureSeedsDifferPerImage) {
  std::set<std::uint64_t> seen;
  for (std::int64_t id = 1; id <= 100; ++id) seen.insert(capture_seed(7, id));
  EXPECT_EQ(seen.size(), 100u);
}

TEST(Seeds, DetectorSeedSharedWithinGroup) {
  ProxyDetectorConfig p;
  EXPECT_EQ(detector_seed(p, 1, 3, 10), detector_seed(p, 1, 3, 11));
  EXPECT_NE(detector_seed(p, 1, 3, 10), detector_seed(p, 1, 4, 10));
  EXPECT_NE(detector_seed(p, 1, -1, 10), detector_seed(p, 1, -1, 11));
  EXPECT_NE(detector_seed(p, 1, 3, 10), detector_seed(p, 2, 3, 10));
}

TEST(Ladder, SlotsRepeatAcrossDistances) {
  SceneSource src;
  src.set = SceneSet::kDistanceLadder;
  src.base.width = 1440;
  src.base.height = 960;
  src.replicates = 10;
  src.distances_m = {15, 75, 145};
  const auto near = ladder_scene_spec(src, 3, 2, 0);
  const auto mid = ladder_scene_spec(src, 3, 2, 1);
  const auto far = ladder_scene_spec(src, 3, 2, 2);
  EXPECT_EQ(near.seed, far.seed);
  EXPECT_EQ(near.group, 2);
  ASSERT_LE(near.targets.size(), far.targets.size());
  EXPECT_EQ(far.targets.size(), src.max_slots);
  for (std::size_t i = 0; i < near.targets.size(); ++i) {
    EXPECT_EQ(near.targets[i].reflectance->values(), far.targets[i].reflectance->values());
  }
  // Once every slot fits, positions no longer move.
  ASSERT_EQ(mid.targets.size(), far.targets.size());
  for (std::size_t i = 0; i < far.targets.size(); ++i) {
    EXPECT_EQ(mid.targets[i].center_x, far.targets[i].center_x);
    EXPECT_EQ(mid.targets[i].center_y, far.targets[i].center_y);
    EXPECT_EQ(far.targets[i].distance_m, 145.0);
  }
}

TEST(Ladder, ContrastsAreStratifiedOverReplicates) {
  SceneSource src;
  src.set = SceneSet::kDistanceLadder;
  src.base.width = 1440;
  src.base.height = 960;
  src.replicates = 20;
  src.distances_m = {145};
  const double bg = 0.2;
  for (std::size_t slot = 0; slot < 3; ++slot) {
    std::set<int> strata;
    int darker = 0;
    for (std::size_t r = 0; r < src.replicates; ++r) {
      const double rho = ladder_scene_spec(src, 9, r, 0).targets.at(slot).reflectance->values().front();
      const double mag = std::abs(rho / bg - 1.0);
      darker += rho < bg ? 1 : 0;
      const double q = (mag - src.contrast_min) / (src.contrast_max - src.contrast_min);
      strata.insert(static_cast<int>(q * static_cast<double>(src.replicates)));
    }
    EXPECT_EQ(strata.size(), src.replicates) << "slot " << slot;
    EXPECT_EQ(darker, 10) << "slot " << slot;
  }
}

TEST(RandomScenes, DistancesInRangeAndDeterministic) {
  const auto cfg = parse_run_config(tiny_config("unused"), ".");
  for (std::size_t i = 0; i < 5; ++i) {
    const auto a = random_scene_spec(cfg.scenes, cfg.seed, i);
    const auto b = random_scene_spec(cfg.scenes, cfg.seed, i);
    EXPECT_EQ(a.seed, b.seed);
    ASSERT_EQ(a.targets.size(), 2u);
    for (std::size_t t = 0; t < 2; ++t) {
      EXPECT_EQ(a.targets[t].distance_m, b.targets[t].distance_m);
      // Raised from 10 m to where a 1.5 m tall car fills 90% of 160 rows.
      EXPECT_GE(a.targets[t].distance_m, 1.5 * 1.5e-3 / (0.9 * 160 * 0.75e-6));
      EXPECT_LE(a.targets[t].distance_m, 40.0);
    }
  }
}

TEST(Variants, LabelsPerAxis) {
  auto cfg = parse_run_config(tiny_config("unused"), ".");
  EXPECT_EQ(sweep_variants(cfg).size(), 1u);
  cfg.sweep.axis = SweepAxis::kPixelSize;
  cfg.sweep.pixel_sizes_um = {1.5, 6.0};
  const auto v = sweep_variants(cfg);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].label, "pixel_1.5um");
  EXPECT_EQ(v[1].sensor.pixel.size_um, 6.0);
  EXPECT_EQ(v[1].sensor.pixel.well_capacity_e, 4 * cfg.sensor.pixel.well_capacity_e);
}

TEST(CmdRun, WritesOutputsAndIsThreadCountInvariant) {
  camsim::testing::TempDir dir;
  std::string csv1, csv4, summary1;
  {
    ScopedThreads t("1");
    const auto st = cmd_run(parse_run_config(tiny_config(dir / "a"), "."));
    EXPECT_EQ(st.exit_code, 0);
    csv1 = slurp(dir / "a" / "metrics.csv");
    summary1 = slurp(dir / "a" / "summary.json");
  }
  {
    ScopedThreads t("4");
    EXPECT_EQ(cmd_run(parse_run_config(tiny_config(dir / "b"), ".")).exit_code, 0);
    csv4 = slurp(dir / "b" / "metrics.csv");
  }
  EXPECT_FALSE(csv1.empty());
  EXPECT_EQ(csv1, csv4);
  EXPECT_EQ(slurp(dir / "a" / "detections.json"), slurp(dir / "b" / "detections.json"));
  const auto summary = json::parse(summary1);
  EXPECT_EQ(summary.at("n_images"), 3);
  EXPECT_EQ(summary.at("n_failed"), 0);
  EXPECT_TRUE(summary.contains("ap_overall"));
  EXPECT_TRUE(summary.contains("od50_m"));
  EXPECT_TRUE(std::filesystem::exists(dir / "a" / "dataset.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "a" / "ap_curve.svg"));
}

TEST(CmdRun, EmptySceneListSucceeds) {
  camsim::testing::TempDir dir;
  const auto st = cmd_run(parse_run_config(tiny_config(dir / "o", 0), "."));
  EXPECT_EQ(st.exit_code, 0);
  const auto summary = json::parse(slurp(dir / "o" / "summary.json"));
  EXPECT_EQ(summary.at("n_images"), 0);
  EXPECT_TRUE(summary.at("ap_overall").is_null());
}

TEST(CmdEval, ReproducesRunMetrics) {
  camsim::testing::TempDir dir;
  const auto cfg = parse_run_config(tiny_config(dir / "run"), ".");
  ASSERT_EQ(cmd_run(cfg).exit_code, 0);
  const auto st = cmd_eval(dir / "run" / "detections.json", dir / "run" / "dataset.json", dir / "eval", cfg.bin_m,
                           cfg.max_distance_m);
  EXPECT_EQ(st.exit_code, 0);
  EXPECT_EQ(slurp(dir / "eval" / "metrics.csv"), slurp(dir / "run" / "metrics.csv"));
}

TEST(CmdEval, UnknownImageIdsFail) {
  camsim::testing::TempDir dir;
  const auto cfg = parse_run_config(tiny_config(dir / "run", 1), ".");
  ASSERT_EQ(cmd_run(cfg).exit_code, 0);
  std::ofstream(dir / "dets.json") << R"([{"image_id": 42, "bbox": [0, 0, 5, 5], "score": 0.5}])";
  EXPECT_THROW(cmd_eval(dir / "dets.json", dir / "run" / "dataset.json", dir / "eval", 10.0, std::nullopt), Error);
}

TEST(CmdSynth, WritesRequestedSceneCount) {
  camsim::testing::TempDir dir;
  for (std::size_t n : {0u, 5u}) {
    const auto out = dir / ("s" + std::to_string(n));
    EXPECT_EQ(cmd_synth(parse_run_config(tiny_config(dir / "x", n), "."), out).exit_code, 0);
    const auto manifest = json::parse(slurp(out / "manifest.json"));
    ASSERT_EQ(manifest.at("scenes").size(), n);
    for (const auto& e : manifest.at("scenes")) {
      const Scene s = load_scene(out / e.at("dir").get<std::string>());
      EXPECT_EQ(s.rows(), 160u);
      EXPECT_EQ(s.classes.size(), e.at("targets").get<std::size_t>());
    }
  }
}

TEST(CmdSynth, DirectoryScenesRunLikeSynthesizedOnes) {
  camsim::testing::TempDir dir;
  const auto cfg = parse_run_config(tiny_config(dir / "direct", 2), ".");
  ASSERT_EQ(cmd_synth(cfg, dir / "scenes").exit_code, 0);
  ASSERT_EQ(cmd_run(cfg).exit_code, 0);
  auto j = tiny_config(dir / "loaded", 2);
  j["scenes"] = {{"set", "directory"}, {"manifest", (dir / "scenes" / "manifest.json").string()}};
  j["scenes"]["spec"] = tiny_config("", 2)["scenes"]["spec"];
  const auto loaded = parse_run_config(j, "/");
  EXPECT_EQ(loaded.scenes.dirs.size(), 2u);
  ASSERT_EQ(cmd_run(loaded).exit_code, 0);
  EXPECT_EQ(slurp(dir / "loaded" / "metrics.csv"), slurp(dir / "direct" / "metrics.csv"));
  EXPECT_THROW(cmd_synth(loaded, dir / "again"), Error);
}

TEST(CmdSweepExposure, HistogramCountsEveryCenterWeightedImage) {
  camsim::testing::TempDir dir;
  auto j = tiny_config(dir / "exp", 4);
  j["sweep"] = {{"illuminance_lux", {30, 300}}};
  const auto st = cmd_sweep_exposure(parse_run_config(j, "."));
  EXPECT_EQ(st.exit_code, 0);
  std::istringstream hist(slurp(dir / "exp" / "cw_histogram.csv"));
  std::string line;
  std::getline(hist, line);
  EXPECT_EQ(line, "illuminance_lux,bin_low_ms,bin_high_ms,count");
  std::map<std::string, int> per_lux;
  int rows = 0;
  while (std::getline(hist, line)) {
    ++rows;
    per_lux[line.substr(0, line.find(','))] += std::stoi(line.substr(line.rfind(',') + 1));
  }
  EXPECT_EQ(rows, 2 * 16);
  EXPECT_EQ(per_lux["30"], 4);
  EXPECT_EQ(per_lux["300"], 4);
  const std::string csv = slurp(dir / "exp" / "sweep_exposure.csv");
  EXPECT_NE(csv.find("bracketed"), std::string::npos);
  EXPECT_NE(csv.find("center_weighted"), std::string::npos);
}

TEST(CmdSweepPixel, OneRowPerSize) {
  camsim::testing::TempDir dir;
  auto j = tiny_config(dir / "pix", 2);
  j["sweep"] = {{"pixel_size_um", {1.5, 3.0, 6.0}}};
  ASSERT_EQ(cmd_sweep_pixel(parse_run_config(j, ".")).exit_code, 0);
  std::istringstream csv(slurp(dir / "pix" / "sweep_pixel.csv"));
  std::string line;
  std::getline(csv, line);
  EXPECT_EQ(line, "pixel_size_um,rows,cols,well_capacity_e,dynamic_range_db,ap_overall,od50_m");
  std::vector<std::string> rows;
  while (std::getline(csv, line)) rows.push_back(line);
  ASSERT_EQ(rows.size(), 3u);
  // Fitted dye: 240×160 cells at 0.75 µm give 80×120 / 40×60 / 20×30 pixels.
  EXPECT_EQ(rows[0].substr(0, 11), "1.5,80,120,");
  EXPECT_EQ(rows[1].substr(0, 8), "3,40,60,");
  EXPECT_EQ(rows[2].substr(0, 8), "6,20,30,");
}

TEST(CmdPlot, WritesSvgFromCsv) {
  camsim::testing::TempDir dir;
  std::ofstream(dir / "m.csv") << "bin_low_m,bin_high_m,gt_count,ap\n0,10,3,1\n10,20,2,0.5\n20,30,0,\n";
  EXPECT_EQ(cmd_plot({dir / "m.csv"}, {"demo"}, dir / "p.svg", "title").exit_code, 0);
  EXPECT_NE(slurp(dir / "p.svg").find("<polyline"), std::string::npos);
}
