#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "camsim/detector.hpp"
#include "camsim/error.hpp"

using namespace camsim;

namespace {

// Gray RGB image with a square patch at `level`, optional Gaussian noise.
Image patch_image(std::size_t n, double bg, double level, std::size_t x0, std::size_t side, double sigma,
                  std::uint64_t seed = 1) {
  Image img(n, n, 3, ColorSpace::kSRGBEncoded, bg);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, sigma);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      const bool in = r >= x0 && r < x0 + side && c >= x0 && c < x0 + side;
      const double v = (in ? level : bg) + (sigma > 0 ? noise(rng) : 0.0);
      for (std::size_t ch = 0; ch < 3; ++ch) img.at(r, c, ch) = v;
    }
  }
  return img;
}

GroundTruthBox gt_box(std::size_t x0, std::size_t side, std::uint16_t id = 1) {
  GroundTruthBox g;
  g.instance_id = id;
  g.bbox = {static_cast<double>(x0), static_cast<double>(x0), static_cast<double>(x0 + side),
            static_cast<double>(x0 + side)};
  g.pixel_count = side * side;
  g.distance_m = 30.0;
  return g;
}

}  // namespace

TEST(NormalCdf, KnownValues) {
  EXPECT_DOUBLE_EQ(normal_cdf(0.0), 0.5);
  EXPECT_NEAR(normal_cdf(-1.0), 0.15865525393145707, 1e-15);
  EXPECT_NEAR(normal_cdf(1.96), 0.9750021048517795, 1e-15);
}

TEST(Detectability, ZeroContrastGivesPhiMinusOne) {
  const Image img = patch_image(64, 0.3, 0.3, 20, 20, 0.0);
  ProxyDetectorConfig cfg;
  const auto d = detectability(gray_plane(img), gt_box(20, 20), cfg);
  EXPECT_NEAR(d.contrast, 0.0, 1e-6);
  EXPECT_NEAR(d.probability, 0.15865525393145707, 1e-6);
}

TEST(Detectability, HugeHighContrastTargetIsCertain) {
  const Image img = patch_image(256, 0.2, 0.8, 20, 200, 0.01);
  ProxyDetectorConfig cfg;
  const auto d = detectability(gray_plane(img), gt_box(20, 200), cfg);
  EXPECT_GT(d.d_prime, 30.0);
  EXPECT_GT(d.probability, 1.0 - 1e-12);
  const auto dets = proxy_detect(img, {gt_box(20, 200)}, 1, cfg);
  ASSERT_FALSE(dets.empty());
  EXPECT_GT(dets[0].score, 1.0 - 1e-12);
}

TEST(Detectability, ContrastMatchesHandComputation) {
  // Noise-free patch on a ring with two levels: σ_ring is computable by hand.
  Image img = patch_image(40, 0.2, 0.6, 10, 10, 0.0);
  for (std::size_t c = 0; c < 40; ++c) {
    for (std::size_t ch = 0; ch < 3; ++ch) img.at(8, c, ch) = 0.4;
  }
  ProxyDetectorConfig cfg;
  const auto d = detectability(gray_plane(img), gt_box(10, 10), cfg);
  // Guard 1, margin 2: ring is 16×16 minus 12×12 = 112 cells, 16 of them in row 8 at 0.4.
  const double n = 112, k = 16;
  const double mean = (k * 0.4 + (n - k) * 0.2) / n;
  const double var = (k * (0.4 - mean) * (0.4 - mean) + (n - k) * (0.2 - mean) * (0.2 - mean)) / (n - 1);
  EXPECT_NEAR(d.contrast, (0.6 - mean) / (std::sqrt(var) + 1e-9), 1e-9);
  EXPECT_NEAR(d.d_prime, cfg.snr_scale * 10.0 * d.contrast, 1e-12);
}

TEST(Detectability, GuardBandIsIgnored) {
  Image img = patch_image(40, 0.2, 0.6, 10, 10, 0.01);
  const auto before = detectability(gray_plane(img), gt_box(10, 10), ProxyDetectorConfig{});
  // Paint the one-pixel band hugging the box.
  for (std::size_t i = 9; i <= 20; ++i) {
    for (std::size_t ch = 0; ch < 3; ++ch) {
      img.at(9, i, ch) = img.at(20, i, ch) = img.at(i, 9, ch) = img.at(i, 20, ch) = 0.6;
    }
  }
  const auto after = detectability(gray_plane(img), gt_box(10, 10), ProxyDetectorConfig{});
  EXPECT_DOUBLE_EQ(after.contrast, before.contrast);
}

TEST(Detectability, BelowMinPixelsIsNeverDetected) {
  const Image img = patch_image(64, 0.2, 0.9, 20, 12, 0.01);
  ProxyDetectorConfig cfg;
  auto g = gt_box(20, 12);
  ASSERT_LT(static_cast<double>(g.pixel_count), cfg.min_pixels);
  EXPECT_EQ(detectability(gray_plane(img), g, cfg).probability, 0.0);
}

TEST(Detectability, MonotoneInPixelCount) {
  const Image img = patch_image(96, 0.2, 0.5, 20, 40, 0.05);
  ProxyDetectorConfig cfg;
  const auto gray = gray_plane(img);
  auto g = gt_box(20, 40);
  double prev = -1.0;
  for (std::size_t count : {100, 150, 400, 1600, 6400}) {
    g.pixel_count = count;
    const double p = detectability(gray, g, cfg).probability;
    EXPECT_GE(p, prev) << count;
    prev = p;
  }
}

TEST(Detectability, NoiseLowersMeanDPrime) {
  ProxyDetectorConfig cfg;
  double prev = INFINITY;
  for (double sigma : {0.01, 0.03, 0.1, 0.3}) {
    double sum = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const Image img = patch_image(96, 0.2, 0.5, 20, 40, sigma, s);
      sum += detectability(gray_plane(img), gt_box(20, 40), cfg).d_prime;
    }
    EXPECT_LE(sum / 10.0, prev) << sigma;
    prev = sum / 10.0;
  }
}

TEST(GrayPlane, RawMosaicUsesBoxMean) {
  Image raw(2, 2, 1, ColorSpace::kSensorLinear);
  raw.data = {1, 2, 3, 4};
  const auto g = gray_plane(raw);
  EXPECT_DOUBLE_EQ(g(0, 0), 2.5);
  EXPECT_DOUBLE_EQ(g(1, 1), 4.0);
}

TEST(ProxyDetect, DeterministicForSeed) {
  const Image img = patch_image(128, 0.2, 0.4, 30, 40, 0.1);
  ProxyDetectorConfig cfg;
  cfg.fp_rate_per_image = 3.0;
  const std::vector<GroundTruthBox> truths{gt_box(30, 40, 1), gt_box(80, 30, 2)};
  const auto a = proxy_detect(img, truths, 5, cfg);
  EXPECT_EQ(a, proxy_detect(img, truths, 5, cfg));
  cfg.seed = 99;
  EXPECT_NE(a, proxy_detect(img, truths, 5, cfg));
}

TEST(ProxyDetect, BoxesStayInsideImage) {
  ProxyDetectorConfig cfg;
  cfg.jitter_px = 5.0;
  cfg.fp_rate_per_image = 5.0;
  const Image img = patch_image(64, 0.2, 0.9, 0, 64, 0.01);
  for (std::uint64_t s = 0; s < 50; ++s) {
    cfg.seed = s;
    std::vector<Detectability> report;
    const auto dets = proxy_detect(img, {gt_box(0, 64)}, 1, cfg, &report);
    ASSERT_EQ(report.size(), 1u);
    for (const auto& d : dets) {
      EXPECT_TRUE(d.bbox.valid());
      EXPECT_GE(d.bbox.x_min, 0.0);
      EXPECT_GE(d.bbox.y_min, 0.0);
      EXPECT_LE(d.bbox.x_max, 64.0);
      EXPECT_LE(d.bbox.y_max, 64.0);
      EXPECT_GE(d.score, 0.0);
      EXPECT_LE(d.score, 1.0);
      EXPECT_EQ(d.image_id, 1);
    }
  }
}

TEST(ProxyDetect, DetectionRateFollowsProbability) {
  // Zero-contrast targets detect at Φ(−1) across many instance ids.
  const Image img = patch_image(64, 0.3, 0.3, 10, 20, 0.0);
  ProxyDetectorConfig cfg;
  cfg.fp_rate_per_image = 0.0;
  cfg.min_pixels = 0.0;
  int hits = 0;
  const int n = 4000;
  for (int id = 1; id <= n; ++id) {
    hits += proxy_detect(img, {gt_box(10, 20, static_cast<std::uint16_t>(id))}, 1, cfg).size() == 1 ? 1 : 0;
  }
  const double p = normal_cdf(-1.0);
  EXPECT_NEAR(hits / static_cast<double>(n), p, 4.0 * std::sqrt(p * (1 - p) / n));
}

TEST(ProxyDetect, FalsePositivesScoreBelowChanceLevel) {
  const Image img = patch_image(200, 0.3, 0.3, 10, 20, 0.0);
  ProxyDetectorConfig cfg;
  cfg.fp_rate_per_image = 4.0;
  std::size_t total = 0;
  for (std::int64_t id = 0; id < 100; ++id) {
    for (const auto& d : proxy_detect(img, {}, id, cfg)) {
      EXPECT_LE(d.score, normal_cdf(-1.0));
      ++total;
    }
  }
  EXPECT_NEAR(static_cast<double>(total) / 100.0, 4.0, 0.8);
}

TEST(ProxyConfig, ValidationAndJson) {
  ProxyDetectorConfig c;
  c.snr_scale = -1.0;
  EXPECT_THROW(c.validate(), Error);
  c = {};
  c.seed = 12;
  c.jitter_px = 2.5;
  nlohmann::json j = c;
  const auto back = j.get<ProxyDetectorConfig>();
  EXPECT_EQ(back.seed, 12u);
  EXPECT_EQ(back.jitter_px, 2.5);
  EXPECT_THROW((nlohmann::json{{"min_pixels", -3}}.get<ProxyDetectorConfig>()), Error);
}
