#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "camsim/annotation.hpp"
#include "camsim/detector.hpp"
#include "camsim/exposure.hpp"
#include "camsim/isp.hpp"
#include "camsim/optics.hpp"
#include "camsim/scene.hpp"
#include "camsim/sensor.hpp"

namespace camsim {

enum class SceneSet { kRandom, kDistanceLadder, kDirectory };

/// Where scenes come from: a procedural set or scene directories on disk.
struct SceneSource {
  SceneSet set = SceneSet::kRandom;
  SceneSpec base;  // raster, pitch, grid, illuminant, background, texture

  // random: `count` scenes of `targets_per_scene` cars at uniform distances
  std::size_t count = 8;
  std::size_t targets_per_scene = 4;
  double min_distance_m = 20.0;
  double max_distance_m = 150.0;

  // distance_ladder: per replicate, one scene per distance with up to
  // `max_slots` cars whose ids and reflectances repeat across distances
  std::size_t replicates = 20;
  std::vector<double> distances_m = {15, 25, 35, 45, 55, 65, 75, 85, 95, 105, 115, 125, 135, 145};
  std::size_t max_slots = 12;

  // reflectance = background · (1 ± U[contrast_min, contrast_max])
  double contrast_min = 0.3;
  double contrast_max = 0.9;

  // directory: scene directories (each with radiance.sic etc.)
  std::vector<std::filesystem::path> dirs;
};

enum class SweepAxis { kNone, kPixelSize, kExposure, kGamma };

struct SweepSpec {
  SweepAxis axis = SweepAxis::kNone;
  std::vector<double> pixel_sizes_um;
  std::vector<ExposurePlan> plans;
  std::vector<double> illuminance_lux;  // exposure sweep levels
  std::vector<GammaSpec> gammas;
};

struct Artifacts {
  bool images = false;   // PPM per scene and variant
  bool frames = false;   // raw frames
  bool svg = true;
  bool dataset = true;
};

enum class CurveMode { kPooled, kGroupMean };

struct RunConfig {
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = "camsim_out";
  SceneSource scenes;
  LensSpec lens;
  SensorSpec sensor;
  ExposurePlan exposure;
  PipelineConfig isp;
  LabelPolicy policy;
  ProxyDetectorConfig proxy;
  std::optional<std::filesystem::path> detections_path;  // external detector output
  SweepSpec sweep;
  std::optional<double> illuminance_lux;  // sensor-plane mean, applied by scaling
  bool fit_dye_to_scene = false;
  double bin_m = 10.0;
  std::optional<double> max_distance_m = 150.0;
  CurveMode curve_mode = CurveMode::kPooled;
  Artifacts artifacts;
};

/// Parses a run config. String values for "lens", "sensor", "exposure" and
/// "isp" name JSON files relative to `base_dir`. Throws kConfig on any
/// problem, including missing files.
RunConfig parse_run_config(const nlohmann::json& j, const std::filesystem::path& base_dir);
RunConfig load_run_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& cfg);

/// Reads a JSON file, mapping I/O and parse failures to kConfig.
nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace camsim
