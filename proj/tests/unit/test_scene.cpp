#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

#include <gtest/gtest.h>

#include "camsim/error.hpp"
#include "camsim/scene.hpp"
#include "test_util.hpp"

using namespace camsim;

namespace {

SceneSpec small_spec() {
  SceneSpec s;
  s.width = 320;
  s.height = 240;
  s.grid = WavelengthGrid(400, 50, 7);
  s.illuminant_lux = 1000.0;
  s.seed = 5;
  TargetSpec t;
  t.distance_m = 80.0;
  t.center_x = 0.5;
  t.center_y = 0.5;
  s.targets = {t};
  return s;
}

}  // namespace

TEST(Scene, ProjectedSizeIsPinhole) {
  // 1.8 m at 60 m through 6 mm: 180 µm on the sensor, 240 cells at 0.75 µm.
  EXPECT_NEAR(projected_size_px(1.8, 6.0, 60.0, 0.75), 1.8 * 6e-3 / 60.0 / 0.75e-6, 1e-9);
  EXPECT_NEAR(projected_size_px(1.8, 6.0, 60.0, 0.75), 240.0, 1e-9);
}

TEST(Scene, LambertianBackgroundLuminance) {
  // Flat reflectance ρ under illuminance E gives L = ρE/π.
  SceneSpec s = small_spec();
  s.targets.clear();
  const Scene scene = synthesize(s);
  EXPECT_NEAR(scene.meta.mean_luminance / (0.2 * 1000.0 / std::numbers::pi), 1.0, 1e-5);
  EXPECT_NEAR(scene.meta.dynamic_range_log10, 0.0, 1e-6);
}

TEST(Scene, TargetFootprintIdsAndDepth) {
  const Scene scene = synthesize(small_spec());
  scene.validate();
  const double w = projected_size_px(1.8, 6.0, 80.0, 0.75);
  const double h = projected_size_px(1.5, 6.0, 80.0, 0.75);
  std::size_t count = 0;
  for (std::size_t r = 0; r < scene.rows(); ++r) {
    for (std::size_t c = 0; c < scene.cols(); ++c) {
      if (scene.instances(r, c) == 1) {
        ++count;
        EXPECT_FLOAT_EQ(scene.depth(r, c), 80.0f);
      } else {
        EXPECT_EQ(scene.instances(r, c), 0);
        EXPECT_FLOAT_EQ(scene.depth(r, c), kBackgroundDepthM);
      }
    }
  }
  EXPECT_EQ(count, static_cast<std::size_t>(std::lround(w) * std::lround(h)));
  EXPECT_EQ(scene.classes.at(1), "car");
}

TEST(Scene, SameSeedSameScene) {
  SceneSpec s = small_spec();
  s.texture = {0.4, 8};
  s.targets[0].center_x.reset();
  s.targets[0].center_y.reset();
  const Scene a = synthesize(s);
  const Scene b = synthesize(s);
  EXPECT_EQ(a.radiance, b.radiance);
  EXPECT_EQ(a.instances, b.instances);
  s.seed = 6;
  const Scene c = synthesize(s);
  EXPECT_NE(a.radiance, c.radiance);
}

TEST(Scene, TextureStaysWithinAmplitude) {
  SceneSpec s = small_spec();
  s.targets.clear();
  s.texture = {0.5, 16};
  const Scene scene = synthesize(s);
  const Scene flat = synthesize(small_spec());
  const float ref = flat.radiance.pixel(0, 0)[3];
  for (std::size_t r = 0; r < scene.rows(); ++r) {
    for (std::size_t c = 0; c < scene.cols(); ++c) {
      const double f = scene.radiance.pixel(r, c)[3] / ref;
      EXPECT_GE(f, 0.5 - 1e-6);
      EXPECT_LE(f, 1.5 + 1e-6);
      // Constant inside each block.
      EXPECT_FLOAT_EQ(scene.radiance.pixel(r, c)[3],
                      scene.radiance.pixel(r - r % 16, c - c % 16)[3]);
    }
  }
}

TEST(Scene, NearerTargetOccludesFarther) {
  SceneSpec s = small_spec();
  TargetSpec near = s.targets[0];
  near.distance_m = 60.0;
  s.targets.push_back(near);
  const Scene scene = synthesize(s);
  EXPECT_EQ(scene.instances(60, 80), 2);
  EXPECT_FLOAT_EQ(scene.depth(60, 80), 60.0f);
}

TEST(Scene, ShadowAndSpecularScaleRadiance) {
  SceneSpec s = small_spec();
  s.targets.clear();
  s.shadows = {{{0.0, 0.0, 0.5, 1.0}, 0.1}};
  s.speculars = {{{0.5, 0.0, 1.0, 1.0}, 4.0}};
  const Scene scene = synthesize(s);
  const Scene plain = synthesize(small_spec());
  const double base = plain.radiance.pixel(0, 0)[2];
  EXPECT_NEAR(scene.radiance.pixel(10, 10)[2] / base, 0.1, 1e-6);
  EXPECT_NEAR(scene.radiance.pixel(10, 300)[2] / base, 4.0, 1e-6);
}

TEST(Scene, TinyTargetDroppedWithWarning) {
  SceneSpec s = small_spec();
  s.targets[0].distance_m = 300.0;
  s.grid_pitch_um = 50.0;
  const Scene scene = synthesize(s);
  EXPECT_TRUE(scene.classes.empty());
  ASSERT_FALSE(scene.meta.warnings.empty());
}

TEST(Scene, ExplicitPlacementOutOfBoundsThrows) {
  SceneSpec s = small_spec();
  s.targets[0].center_x = 0.01;
  EXPECT_THROW(synthesize(s), Error);
}

TEST(Scene, InvalidSpecRejected) {
  SceneSpec s = small_spec();
  s.targets[0].distance_m = 400.0;
  EXPECT_THROW(synthesize(s), Error);
  s = small_spec();
  s.shadows = {{{0, 0, 1, 1}, 0.0}};
  EXPECT_THROW(synthesize(s), Error);
}

TEST(Scene, EdgeCaseSceneLayout) {
  const Scene scene = edge_case_scene();
  EXPECT_EQ(scene.cols(), 1280u);
  EXPECT_EQ(scene.rows(), 720u);
  ASSERT_EQ(scene.classes.size(), 3u);
  EXPECT_EQ(scene.instances(360, 640), kEdgeSpecularCarId);
  EXPECT_EQ(scene.instances(480, 1100), kEdgeShadowCarId);
  EXPECT_EQ(scene.instances(450, 250), kEdgeControlCarId);
  // More than four decades between the specular highlight and the shadow.
  EXPECT_GT(scene.meta.dynamic_range_log10, 2.5);
}

TEST(Scene, SaveLoadRoundTrip) {
  camsim::testing::TempDir tmp;
  SceneSpec s = small_spec();
  s.texture = {0.3, 8};
  const Scene a = synthesize(s);
  save_scene(a, tmp.path() / "s");
  const Scene b = load_scene(tmp.path() / "s");
  EXPECT_EQ(a.radiance, b.radiance);
  EXPECT_EQ(a.depth, b.depth);
  EXPECT_EQ(a.instances, b.instances);
  EXPECT_EQ(a.classes, b.classes);
  EXPECT_EQ(a.meta.seed, b.meta.seed);
}

TEST(Scene, LoadDetectsCorruption) {
  camsim::testing::TempDir tmp;
  const Scene a = synthesize(small_spec());
  save_scene(a, tmp.path() / "s");
  const auto sic = tmp.path() / "s" / "radiance.sic";
  ASSERT_TRUE(std::filesystem::exists(sic));
  const auto size = std::filesystem::file_size(sic);

  std::filesystem::resize_file(sic, size - 16);
  try {
    load_scene(tmp.path() / "s");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTruncatedPayload);
  }
  {
    std::fstream f(sic, std::ios::in | std::ios::out | std::ios::binary);
    f.write("XXXX", 4);
  }
  try {
    load_scene(tmp.path() / "s");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBadMagic);
  }
}

TEST(Scene, SpecJsonRoundTrip) {
  SceneSpec s = small_spec();
  s.shadows = {{{0.1, 0.2, 0.3, 0.4}, 0.5}};
  s.texture = {0.2, 4};
  const nlohmann::json j = s;
  const SceneSpec back = j.get<SceneSpec>();
  EXPECT_EQ(nlohmann::json(back), j);
}
