#include "camsim/detector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "camsim/error.hpp"
#include "camsim/rng.hpp"

namespace camsim {

void ProxyDetectorConfig::validate() const {
  if (min_pixels < 0.0 || snr_scale < 0.0 || jitter_px < 0.0 || fp_rate_per_image < 0.0 ||
      threshold_offset < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "proxy detector parameters must be non-negative");
  }
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

Plane<double> gray_plane(const Image& img) {
  Plane<double> g(img.rows, img.cols);
  if (img.channels == 1) {
    // 2×2 box mean removes the CFA pattern from a raw mosaic.
    for (std::size_t r = 0; r < img.rows; ++r) {
      const std::size_t r1 = std::min(r + 1, img.rows - 1);
      for (std::size_t c = 0; c < img.cols; ++c) {
        const std::size_t c1 = std::min(c + 1, img.cols - 1);
        g(r, c) = 0.25 * (img.at(r, c, 0) + img.at(r, c1, 0) + img.at(r1, c, 0) + img.at(r1, c1, 0));
      }
    }
    return g;
  }
  for (std::size_t p = 0; p < img.rows * img.cols; ++p) {
    double s = 0.0;
    for (std::size_t ch = 0; ch < img.channels; ++ch) s += img.data[p * img.channels + ch];
    g.data()[p] = s / static_cast<double>(img.channels);
  }
  return g;
}

Detectability detectability(const Plane<double>& gray, const GroundTruthBox& gt,
                            const ProxyDetectorConfig& cfg) {
  Detectability d;
  d.instance_id = gt.instance_id;
  const long H = static_cast<long>(gray.rows()), W = static_cast<long>(gray.cols());
  const long x0 = std::clamp(static_cast<long>(std::floor(gt.bbox.x_min)), 0L, W);
  const long y0 = std::clamp(static_cast<long>(std::floor(gt.bbox.y_min)), 0L, H);
  const long x1 = std::clamp(static_cast<long>(std::ceil(gt.bbox.x_max)), 0L, W);
  const long y1 = std::clamp(static_cast<long>(std::ceil(gt.bbox.y_max)), 0L, H);
  const double side = std::min(gt.bbox.width(), gt.bbox.height());
  const long margin = std::max(2L, static_cast<long>(std::lround(0.2 * side)));

  double sum_in = 0.0;
  std::size_t n_in = 0;
  for (long y = y0; y < y1; ++y) {
    for (long x = x0; x < x1; ++x) {
      sum_in += gray(static_cast<std::size_t>(y), static_cast<std::size_t>(x));
      ++n_in;
    }
  }
  // The surround starts one pixel out: majority-vote boxes leave partly
  // covered target pixels just outside the box.
  const long g = kSurroundGuardPx;
  double sum_ring = 0.0, sum_ring2 = 0.0;
  std::size_t n_ring = 0;
  for (long y = std::max(0L, y0 - g - margin); y < std::min(H, y1 + g + margin); ++y) {
    for (long x = std::max(0L, x0 - g - margin); x < std::min(W, x1 + g + margin); ++x) {
      if (y >= y0 - g && y < y1 + g && x >= x0 - g && x < x1 + g) continue;
      const double v = gray(static_cast<std::size_t>(y), static_cast<std::size_t>(x));
      sum_ring += v;
      sum_ring2 += v * v;
      ++n_ring;
    }
  }
  if (n_in > 0 && n_ring > 1) {
    const double m_in = sum_in / static_cast<double>(n_in);
    const double m_ring = sum_ring / static_cast<double>(n_ring);
    const double var = std::max(0.0, (sum_ring2 - sum_ring * m_ring) / static_cast<double>(n_ring - 1));
    constexpr double kEps = 1e-9;
    d.contrast = std::abs(m_in - m_ring) / (std::sqrt(var) + kEps);
  }
  d.d_prime = cfg.snr_scale * std::sqrt(static_cast<double>(gt.pixel_count)) * d.contrast;
  d.probability = static_cast<double>(gt.pixel_count) < cfg.min_pixels
                      ? 0.0
                      : normal_cdf(d.d_prime - cfg.threshold_offset);
  return d;
}

namespace {

Box clip(Box b, double W, double H) {
  b.x_min = std::clamp(b.x_min, 0.0, W);
  b.x_max = std::clamp(b.x_max, 0.0, W);
  b.y_min = std::clamp(b.y_min, 0.0, H);
  b.y_max = std::clamp(b.y_max, 0.0, H);
  return b;
}

}  // namespace

std::vector<Detection> proxy_detect(const Image& img, const std::vector<GroundTruthBox>& truths,
                                    std::int64_t image_id, const ProxyDetectorConfig& cfg,
                                    std::vector<Detectability>* report) {
  cfg.validate();
  const Plane<double> gray = gray_plane(img);
  const double W = static_cast<double>(img.cols), H = static_cast<double>(img.rows);
  std::vector<Detection> out;
  for (const auto& gt : truths) {
    Detectability d = detectability(gray, gt, cfg);
    CounterRng rng{cfg.seed, 0x4445544543ull, gt.instance_id};
    d.detected = rng.uniform() < d.probability;
    if (d.detected) {
      auto jitter = [&] { return cfg.jitter_px * (2.0 * rng.uniform() - 1.0); };
      Box b = gt.bbox;
      b.x_min += jitter();
      b.y_min += jitter();
      b.x_max += jitter();
      b.y_max += jitter();
      b = clip(b, W, H);
      if (b.valid()) out.push_back({image_id, b, d.probability, gt.cls});
    }
    if (report) report->push_back(d);
  }

  if (cfg.fp_rate_per_image > 0.0 && W >= 2.0 && H >= 2.0) {
    CounterRng rng{cfg.seed, 0x46414C5345ull, static_cast<std::uint64_t>(image_id)};
    std::poisson_distribution<int> count(cfg.fp_rate_per_image);
    const int n = count(rng);
    const double max_score = normal_cdf(-cfg.threshold_offset);
    for (int i = 0; i < n; ++i) {
      const double w = std::min(W, 10.0 + 50.0 * rng.uniform());
      const double h = std::min(H, w * (0.6 + 0.4 * rng.uniform()));
      const double x = rng.uniform() * (W - w);
      const double y = rng.uniform() * (H - h);
      const double score = max_score * rng.uniform();
      out.push_back({image_id, {x, y, x + w, y + h}, score, "car"});
    }
  }
  return out;
}

void to_json(nlohmann::json& j, const ProxyDetectorConfig& c) {
  j = {{"seed", c.seed},
       {"min_pixels", c.min_pixels},
       {"snr_scale", c.snr_scale},
       {"jitter_px", c.jitter_px},
       {"fp_rate_per_image", c.fp_rate_per_image},
       {"threshold_offset", c.threshold_offset}};
}

void from_json(const nlohmann::json& j, ProxyDetectorConfig& c) {
  c = ProxyDetectorConfig{};
  c.seed = j.value("seed", c.seed);
  c.min_pixels = j.value("min_pixels", c.min_pixels);
  c.snr_scale = j.value("snr_scale", c.snr_scale);
  c.jitter_px = j.value("jitter_px", c.jitter_px);
  c.fp_rate_per_image = j.value("fp_rate_per_image", c.fp_rate_per_image);
  c.threshold_offset = j.value("threshold_offset", c.threshold_offset);
  c.validate();
}

}  // namespace camsim
