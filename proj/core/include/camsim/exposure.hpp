#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "camsim/sensor.hpp"

namespace camsim {

inline constexpr double kDefaultExposureCapS = 16e-3;
inline const std::vector<double> kDefaultBracketS = {12e-3, 0.12e-3, 12e-6};

enum class ExposureMode { kFixed, kCenterWeighted, kBracketed };
enum class MeterStatistic { kMax, kP99 };

struct ExposurePlan {
  ExposureMode mode = ExposureMode::kCenterWeighted;
  double t_s = 12e-3;                         // fixed
  double cap_s = kDefaultExposureCapS;        // center-weighted
  double window_fraction = 0.01;
  double target_fraction = 0.90;
  MeterStatistic statistic = MeterStatistic::kMax;
  std::vector<double> durations_s = kDefaultBracketS;  // bracketed

  /// Throws kInvalidArgument when the invariants do not hold.
  void validate() const;
  /// Short label for reports, e.g. "fixed_12ms", "center_weighted".
  std::string label() const;
};

struct Window {
  std::size_t r0 = 0, c0 = 0, r1 = 0, c1 = 0;  // half-open
};

/// Centered rectangle covering `fraction` of the image area.
Window metering_window(std::size_t rows, std::size_t cols, double fraction);

/// t = min(cap, target·well / window statistic) from the noise-free expected
/// electron rate. An all-zero window returns the cap.
double center_weighted_duration(const Plane<double>& expected_rate, const SensorSpec& sensor,
                                const ExposurePlan& plan);
double center_weighted_duration(const IrradianceCube& irr, const SensorSpec& sensor,
                                const ExposurePlan& plan);
double center_weighted_duration(const Scene& scene, const LensSpec& lens, const SensorSpec& sensor,
                                const ExposurePlan& plan);

/// Seed of the i-th bracket frame.
std::uint64_t bracket_seed(std::uint64_t seed, std::size_t index);

std::vector<RawFrame> bracketed_capture(const IrradianceCube& irr, const SensorSpec& sensor,
                                        const std::vector<double>& durations_s, std::uint64_t seed);
std::vector<RawFrame> bracketed_capture(const Scene& scene, const LensSpec& lens,
                                        const SensorSpec& sensor,
                                        const std::vector<double>& durations_s, std::uint64_t seed);

struct HDRFrame {
  Plane<double> rate;                // electrons/s
  Plane<std::uint8_t> valid;
  Plane<std::uint8_t> source_index;  // which frame supplied the value
  SensorSpec sensor;

  std::size_t rows() const noexcept { return rate.rows(); }
  std::size_t cols() const noexcept { return rate.cols(); }
};

/// Per pixel, the longest unsaturated frame's dn_to_electrons / duration.
/// Durations must be non-increasing.
HDRFrame hdr_combine(const std::vector<RawFrame>& frames);

/// Sensor dynamic range plus 20·log10(longest / shortest).
double effective_dynamic_range(const SensorSpec& sensor, const std::vector<double>& durations_s);
/// The bracketing term alone.
double bracket_extension_db(const std::vector<double>& durations_s);

void to_json(nlohmann::json& j, const ExposurePlan& p);
void from_json(const nlohmann::json& j, ExposurePlan& p);

}  // namespace camsim
