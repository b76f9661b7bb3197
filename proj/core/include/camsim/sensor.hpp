#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>

#include <json.hpp>

#include "camsim/optics.hpp"
#include "camsim/raster.hpp"
#include "camsim/scene.hpp"

namespace camsim {

enum class Cfa { kRGGB, kMono, kRCCC };
enum class Channel { kR, kG, kB, kC, kM };

const char* to_string(Cfa cfa);
Cfa cfa_from_string(const std::string& s);
const char* to_string(Channel ch);
Channel channel_from_string(const std::string& s);

/// Channel sampled at (row, col) for a 2×2 (or 1×1) pattern.
Channel cfa_channel(Cfa cfa, std::size_t row, std::size_t col) noexcept;

struct PixelSpec {
  double size_um = 3.0;
  double well_capacity_e = 13500.0;
  double read_noise_e = 24.0;
  double dark_current_e_per_s = 50.0;
  double conversion_gain_uV_per_e = 0.0;  // 0 → voltage_swing / well
  double voltage_swing_V = 1.0;
  double fill_factor = 1.0;
};

struct SensorSpec {
  PixelSpec pixel;
  double dye_width_mm = 3.84;
  double dye_height_mm = 2.16;
  Cfa cfa = Cfa::kRGGB;
  std::map<Channel, Spectrum> qe;  // missing channels fall back to default_qe
  int adc_bits = 10;
  double analog_gain = 1.0;
  bool scale_well_with_area = true;
  bool noise = true;        // false: expected electrons only, no dark signal
  double prnu_sigma = 0.0;  // relative gain spread, fixed pattern
  double dsnu_e = 0.0;      // dark offset spread in electrons, fixed pattern
  std::uint64_t fixed_pattern_seed = 0;

  /// Throws kInvalidArgument on out-of-range fields.
  void validate() const;
  double conversion_gain_uV_per_e() const;
  int max_code() const { return (1 << adc_bits) - 1; }
  /// Electrons per DN step.
  double electrons_per_dn() const;
  /// Returns a copy at pixel size p, scaling the well with pixel area when
  /// scale_well_with_area is set.
  SensorSpec with_pixel_size(double p_um) const;
};

/// Gaussian QE defaults; C and M are the clipped sum of R, G and B.
Spectrum default_qe(Channel ch, const WavelengthGrid& grid);
Spectrum sensor_qe(const SensorSpec& sensor, Channel ch, const WavelengthGrid& grid);

struct Geometry {
  std::size_t rows = 0;
  std::size_t cols = 0;
  friend bool operator==(const Geometry&, const Geometry&) = default;
};

/// floor(dye / p) per axis, rounded down to even.
Geometry derive_geometry(double pixel_size_um, const SensorSpec& sensor);

double dynamic_range_db(const SensorSpec& sensor);

/// Integer scene-cells-per-pixel factor; throws when p / pitch is not integral.
std::size_t binning_factor(double pixel_size_um, double pitch_um);

/// Where a sensor sits on a scene grid: b×b cells per pixel, centered crop.
struct Footprint {
  std::size_t binning = 1;
  Geometry geometry;
  std::size_t row0 = 0;
  std::size_t col0 = 0;
};

/// Throws kDimensionMismatch when the sensor does not fit on the grid.
Footprint sensor_footprint(std::size_t grid_rows, std::size_t grid_cols, double pitch_um,
                           const SensorSpec& sensor);

/// Expected signal electrons per second per pixel, centered crop when the
/// cube is larger than the sensor footprint.
Plane<double> expected_rate(const IrradianceCube& irr, const SensorSpec& sensor);
/// Expected signal electrons for an exposure of t seconds.
Plane<double> integrate(const IrradianceCube& irr, const SensorSpec& sensor, double exposure_s);

/// Poisson(expected + dark·t) + N(0, read noise), clamped to [0, well].
/// Keyed by (seed, row, col). With sensor.noise off: clamp(expected).
Plane<double> apply_noise(const Plane<double>& expected_e, const SensorSpec& sensor,
                          double exposure_s, std::uint64_t seed);

struct RawFrame {
  Plane<std::uint16_t> dn;
  Plane<std::uint8_t> saturated;
  double exposure_s = 0.0;
  SensorSpec sensor;
  std::uint64_t seed = 0;

  std::size_t rows() const noexcept { return dn.rows(); }
  std::size_t cols() const noexcept { return dn.cols(); }
};

RawFrame adc(const Plane<double>& electrons, const SensorSpec& sensor, double exposure_s,
             std::uint64_t seed);

/// Inverse of the ADC transfer for unsaturated codes.
Plane<double> dn_to_electrons(const RawFrame& frame);

RawFrame capture(const IrradianceCube& irr, const SensorSpec& sensor, double exposure_s,
                 std::uint64_t seed);
RawFrame capture(const Scene& scene, const LensSpec& lens, const SensorSpec& sensor,
                 double exposure_s, std::uint64_t seed);

/// Copy of `sensor` whose dye covers the scene extent at the given pixel size.
SensorSpec fit_dye_to_scene(const SensorSpec& sensor, const Scene& scene);

void save_frame(const RawFrame& frame, const std::filesystem::path& dir);
RawFrame load_frame(const std::filesystem::path& dir);

void to_json(nlohmann::json& j, const PixelSpec& p);
void from_json(const nlohmann::json& j, PixelSpec& p);
void to_json(nlohmann::json& j, const SensorSpec& s);
void from_json(const nlohmann::json& j, SensorSpec& s);

}  // namespace camsim
