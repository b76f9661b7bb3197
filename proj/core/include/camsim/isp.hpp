#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "camsim/colorimetry.hpp"
#include "camsim/exposure.hpp"
#include "camsim/sensor.hpp"

namespace camsim {

enum class ColorSpace { kSensorLinear, kLinearSRGB, kSRGBEncoded };
const char* to_string(ColorSpace cs);

/// Interleaved H×W×C raster of doubles, C = 1 (mosaic or mono) or 3.
struct Image {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::size_t channels = 0;
  ColorSpace space = ColorSpace::kSensorLinear;
  std::vector<double> data;

  Image() = default;
  Image(std::size_t r, std::size_t c, std::size_t ch, ColorSpace cs, double fill = 0.0)
      : rows(r), cols(c), channels(ch), space(cs), data(r * c * ch, fill) {}

  double& at(std::size_t r, std::size_t c, std::size_t ch) { return data[(r * cols + c) * channels + ch]; }
  double at(std::size_t r, std::size_t c, std::size_t ch) const { return data[(r * cols + c) * channels + ch]; }
};

enum class GammaMode { kFixed, kAdaptive, kAdaptiveMeanOfPowers, kSRGBStandard, kNone };

struct GammaSpec {
  GammaMode mode = GammaMode::kAdaptive;
  double gamma = 1.0;   // fixed
  double target = 0.2;  // adaptive

  void validate() const;
};

struct GammaInfo {
  double gamma = 1.0;  // exponent applied (1 for SRGBStandard/None)
  std::vector<std::string> warnings;
};

/// dn / max_code, mosaic untouched.
Image raw_passthrough(const RawFrame& frame);

/// Bilinear demosaic of a normalized mosaic: every missing sample is the mean
/// of the in-bounds same-colour samples in its 3×3 neighbourhood. MONO is
/// replicated to three channels; RCCC throws kUnsupportedCfa.
Image demosaic_bilinear(const Plane<double>& mosaic, Cfa cfa);
Image demosaic_bilinear(const RawFrame& frame);

/// Per-pixel 3×3 multiply, clamped to [0,1]. Throws kSingularMatrix.
Image color_correct(const Image& img, const Mat3& m);

/// Least-squares sensor→linear-sRGB matrix over the reference patches under
/// D65, constrained so that neutrals stay neutral. Includes the white
/// balance gains (green channel gain 1).
Mat3 default_color_matrix(const SensorSpec& sensor);

/// The exponent the adaptive modes would choose, or nullopt when the mean is
/// outside (0, 1).
std::optional<double> adaptive_gamma(const Image& img, const GammaSpec& spec);

Image apply_gamma(const Image& img, const GammaSpec& spec, GammaInfo* info = nullptr);

double srgb_encode(double v);
double srgb_decode(double v);

struct PipelineConfig {
  std::vector<std::string> stages = {"demosaic", "color", "gamma"};  // or {"raw"}
  GammaSpec gamma;
  std::optional<Mat3> color_matrix;  // default_color_matrix when absent
  double hdr_percentile = 0.999;

  bool raw() const;
  void validate() const;
};

Image render(const RawFrame& frame, const PipelineConfig& cfg, GammaInfo* info = nullptr);
/// HDR input is first divided by its p99.9 rate and clamped.
Image render(const HDRFrame& frame, const PipelineConfig& cfg, GammaInfo* info = nullptr);

void to_json(nlohmann::json& j, const GammaSpec& g);
void from_json(const nlohmann::json& j, GammaSpec& g);
void to_json(nlohmann::json& j, const PipelineConfig& p);
void from_json(const nlohmann::json& j, PipelineConfig& p);

}  // namespace camsim
