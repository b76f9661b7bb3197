#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "camsim/raster.hpp"
#include "camsim/spectral.hpp"
#include "camsim/spectral_cube.hpp"

namespace camsim {

inline constexpr float kBackgroundDepthM = 10000.0f;

/// Axis-aligned rectangle in fractional scene coordinates, [x0,x1)×[y0,y1) ⊂ [0,1]².
struct FracRect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

struct ShadowRegion {
  FracRect rect;
  double attenuation = 1.0;  // (0, 1]
};

struct SpecularPatch {
  FracRect rect;
  double gain = 1.0;  // >= 1
};

struct TargetSpec {
  std::string cls = "car";
  double distance_m = 50.0;   // (0, 300]
  double width_m = 1.8;
  double height_m = 1.5;
  double albedo = 1.0;        // reflectance multiplier, result clamped to 1
  std::optional<Spectrum> reflectance;  // defaults to flat 0.4
  // Footprint center as a fraction of scene width/height; placed by seed when absent.
  std::optional<double> center_x;
  std::optional<double> center_y;
};

/// Multiplicative blocky reflectance clutter on the background.
struct TextureSpec {
  double amplitude = 0.0;     // block factor uniform in [1-a, 1+a]
  std::size_t cell_px = 32;   // block edge in scene cells
};

struct SceneSpec {
  std::size_t width = 256;
  std::size_t height = 256;
  double grid_pitch_um = 0.75;
  double focal_length_mm = 6.0;
  WavelengthGrid grid = default_grid();
  double illuminant_lux = 10000.0;          // used when `illuminant` is empty (D65)
  std::optional<Spectrum> illuminant;       // photon or energy irradiance
  std::optional<Spectrum> background;       // defaults to flat 0.2
  TextureSpec texture;
  std::vector<TargetSpec> targets;
  std::vector<ShadowRegion> shadows;
  std::vector<SpecularPatch> speculars;
  std::uint64_t seed = 0;
  std::string description;
  int group = -1;  // replicate group shared by scenes that reuse detector randomness
};

struct SceneMeta {
  double mean_luminance = 0.0;         // cd/m²
  double dynamic_range_log10 = 0.0;
  std::string description;
  std::uint64_t seed = 0;
  int group = -1;
  std::vector<std::string> warnings;
};

struct Scene {
  SpectralCube radiance;               // photon radiance
  Plane<float> depth;                  // metres
  Plane<std::uint16_t> instances;      // 0 = background
  std::map<std::uint16_t, std::string> classes;
  SceneMeta meta;
  nlohmann::json spec_echo;

  std::size_t rows() const noexcept { return radiance.rows(); }
  std::size_t cols() const noexcept { return radiance.cols(); }
  /// Throws kValidation when the raster invariants do not hold.
  void validate() const;
};

/// Pinhole footprint in scene cells: size_m · f / (distance_m · pitch).
double projected_size_px(double size_m, double focal_length_mm, double distance_m,
                         double pitch_um);

Scene synthesize(const SceneSpec& spec);

/// Fixed high-dynamic-range scene: a specular white car covering the central
/// metering window, a dark car inside a deep shadow, and a control car in
/// plain light.
Scene edge_case_scene();
/// Instance ids used by edge_case_scene().
inline constexpr std::uint16_t kEdgeSpecularCarId = 1;
inline constexpr std::uint16_t kEdgeShadowCarId = 2;
inline constexpr std::uint16_t kEdgeControlCarId = 3;

/// Mean luminance and log10(p99.9 / p0.1) of per-pixel luminance.
SceneMeta scene_statistics(const Scene& scene);
/// Per-pixel luminance in cd/m².
Plane<double> luminance_map(const Scene& scene);

void save_scene(const Scene& scene, const std::filesystem::path& dir);
Scene load_scene(const std::filesystem::path& dir);

void to_json(nlohmann::json& j, const SceneSpec& s);
void from_json(const nlohmann::json& j, SceneSpec& s);

}  // namespace camsim
