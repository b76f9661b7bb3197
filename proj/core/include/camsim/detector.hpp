#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include <json.hpp>

#include "camsim/annotation.hpp"
#include "camsim/eval.hpp"
#include "camsim/isp.hpp"

namespace camsim {

/// Any detector: (image, image id) → detections inside the image bounds.
using DetectorFn = std::function<std::vector<Detection>(const Image&, std::int64_t)>;

struct ProxyDetectorConfig {
  std::uint64_t seed = 0;
  double min_pixels = 150.0;       // smaller GTs are never detected
  double snr_scale = 0.02;
  double jitter_px = 1.0;
  double fp_rate_per_image = 0.1;
  double threshold_offset = 1.0;   // detection probability Φ(d' − offset)

  void validate() const;
};

/// Standard normal CDF.
double normal_cdf(double x);

/// Luminance proxy: channel mean for RGB, 2×2 box mean for a raw mosaic.
Plane<double> gray_plane(const Image& img);

/// Surround ring: a band max(2, 0.2·min side) pixels wide, separated from the
/// box by this gap.
inline constexpr long kSurroundGuardPx = 1;

struct Detectability {
  std::uint16_t instance_id = 0;
  double contrast = 0.0;     // |mean_in − mean_ring| / (σ_ring + ε)
  double d_prime = 0.0;
  double probability = 0.0;
  bool detected = false;
};

/// d' for one GT box on a gray plane.
Detectability detectability(const Plane<double>& gray, const GroundTruthBox& gt,
                            const ProxyDetectorConfig& cfg);

/// Ground-truth-driven proxy: each GT is detected with probability Φ(d' − 1)
/// from a stream keyed by (seed, instance id), jittered by ±jitter_px, and
/// Poisson(fp_rate) false boxes are added per image.
std::vector<Detection> proxy_detect(const Image& img, const std::vector<GroundTruthBox>& truths,
                                    std::int64_t image_id, const ProxyDetectorConfig& cfg,
                                    std::vector<Detectability>* report = nullptr);

void to_json(nlohmann::json& j, const ProxyDetectorConfig& c);
void from_json(const nlohmann::json& j, ProxyDetectorConfig& c);

}  // namespace camsim
