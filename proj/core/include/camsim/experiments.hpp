#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "camsim/config.hpp"
#include "camsim/eval.hpp"

namespace camsim {

/// One scene to process; `make` synthesizes or loads it on demand so only
/// the scenes in flight are resident.
struct SceneJob {
  std::int64_t image_id = 0;
  int group = -1;
  std::string name;
  std::function<Scene()> make;
};

/// Scene spec of a distance-ladder scene (replicate r, distance index k).
SceneSpec ladder_scene_spec(const SceneSource& src, std::uint64_t seed, std::size_t replicate,
                            std::size_t distance_index);
/// Scene spec of the i-th random scene.
SceneSpec random_scene_spec(const SceneSource& src, std::uint64_t seed, std::size_t index);

std::vector<SceneJob> scene_jobs(const RunConfig& cfg);

/// One point on a sweep axis.
struct Variant {
  std::string label;
  SensorSpec sensor;
  ExposurePlan plan;
  PipelineConfig isp;
  std::optional<double> illuminance_lux;
};

std::vector<Variant> sweep_variants(const RunConfig& cfg);

struct SceneOutcome {
  std::int64_t image_id = 0;
  int group = -1;
  std::string name;
  Geometry geometry;
  std::vector<GroundTruthBox> truths;
  std::vector<Detection> detections;
  std::vector<double> exposures_s;
  std::vector<Detectability> report;
  std::vector<std::string> warnings;
  std::string error;  // non-empty when the scene failed
};

struct VariantResult {
  Variant variant;
  std::vector<SceneOutcome> scenes;  // in image-id order
  APCurve curve;
  std::optional<double> ap_overall;
  OD50Result od50;
};

/// Seeds used per image: sensor noise and proxy detector.
std::uint64_t capture_seed(std::uint64_t run_seed, std::int64_t image_id);
std::uint64_t detector_seed(const ProxyDetectorConfig& proxy, std::uint64_t run_seed, int group,
                            std::int64_t image_id);

/// Runs every scene through every variant on a worker pool. Scene failures
/// are recorded in SceneOutcome::error and do not stop other scenes.
/// `image_dir`, when set, receives one PPM per scene and variant.
std::vector<VariantResult> run_variants(const RunConfig& cfg, const std::vector<Variant>& variants,
                                        const std::vector<SceneJob>& jobs,
                                        const std::optional<std::filesystem::path>& image_dir = std::nullopt);

/// Fills curve / ap_overall / od50 from the scene outcomes (or from imported
/// detections when the config names a detections file).
void score_variant(const RunConfig& cfg, VariantResult& result,
                   const std::vector<Detection>* imported = nullptr);

struct CommandStatus {
  int exit_code = 0;  // 0 ok, 2 config error, 3 runtime error
  std::vector<std::string> errors;
};

/// Writes N scene directories plus manifest.json.
CommandStatus cmd_synth(const RunConfig& cfg, const std::filesystem::path& out_dir);
/// Full pipeline, plus any sweep axis in the config.
CommandStatus cmd_run(const RunConfig& cfg);
/// Pixel-size sweep, default sizes 1.5 / 3 / 6 µm.
CommandStatus cmd_sweep_pixel(const RunConfig& cfg);
/// Exposure plans × illuminance levels with centre-weighted histograms.
CommandStatus cmd_sweep_exposure(const RunConfig& cfg);

struct EdgeCaseRow {
  std::string algorithm;
  std::vector<double> exposures_s;
  std::uint16_t instance_id = 0;
  std::string role;
  Detectability detectability;
};

struct EdgeCaseReport {
  std::vector<EdgeCaseRow> rows;
  nlohmann::json to_json() const;
  const EdgeCaseRow* find(const std::string& algorithm, std::uint16_t id) const;
};

/// Edge-case scene under centre-weighted and bracketed exposure.
EdgeCaseReport edge_case_report(const RunConfig& cfg);
CommandStatus cmd_edge_case(const RunConfig& cfg);

/// detections.json + dataset.json → metrics.csv + summary.json.
CommandStatus cmd_eval(const std::filesystem::path& detections, const std::filesystem::path& dataset,
                       const std::filesystem::path& out_dir, double bin_m,
                       std::optional<double> max_distance_m);
/// Metrics CSVs → one SVG.
CommandStatus cmd_plot(const std::vector<std::filesystem::path>& csvs, const std::vector<std::string>& labels,
                       const std::filesystem::path& out_svg, const std::string& title);

}  // namespace camsim
