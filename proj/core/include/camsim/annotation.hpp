#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "camsim/box.hpp"
#include "camsim/scene.hpp"
#include "camsim/sensor.hpp"

namespace camsim {

struct GroundTruthBox {
  std::uint16_t instance_id = 0;
  std::string cls = "car";
  Box bbox;
  double distance_m = 0.0;
  std::size_t pixel_count = 0;
  bool visible = true;

  friend bool operator==(const GroundTruthBox&, const GroundTruthBox&) = default;
};

struct LabelPolicy {
  double min_box_w = 10.0;
  double min_box_h = 15.0;
  double max_distance_m = 150.0;
  bool apply_visibility = true;

  void validate() const;
};

/// Instance map binned to sensor pixels by majority vote (ties go to the
/// lowest id, background included).
Plane<std::uint16_t> bin_instances(const Scene& scene, const Footprint& fp);

/// Tight boxes over each instance's sensor pixels, distance = median depth of
/// the instance's scene cells inside those pixels. Sorted by instance id.
std::vector<GroundTruthBox> project_truth(const Scene& scene, const Footprint& fp);
std::vector<GroundTruthBox> project_truth(const Scene& scene, const SensorSpec& sensor);

/// visible = w ≥ min_w && h ≥ min_h && distance ≤ max (all inclusive); drops
/// non-visible boxes when apply_visibility is set.
std::vector<GroundTruthBox> apply_policy(const std::vector<GroundTruthBox>& boxes,
                                         const LabelPolicy& policy);

struct DatasetImage {
  std::int64_t id = 0;
  std::string file;
  std::size_t width = 0;
  std::size_t height = 0;
};

struct SplitFractions {
  double train = 3000.0;
  double val = 700.0;
  double test = 750.0;
};

struct Split {
  std::vector<std::int64_t> train, val, test;
};

/// Seeded shuffle, then round(n·train) / round(n·val) / remainder.
Split split_ids(std::vector<std::int64_t> ids, const SplitFractions& fractions, std::uint64_t seed);

struct Dataset {
  std::vector<DatasetImage> images;
  std::map<std::int64_t, std::vector<GroundTruthBox>> truths;  // by image id
  Split split;
};

/// COCO-style manifest with a nonstandard `distance_m` field per annotation.
/// Throws kValidation on duplicate image ids.
nlohmann::json export_dataset(const std::vector<DatasetImage>& images,
                              const std::map<std::int64_t, std::vector<GroundTruthBox>>& truths,
                              const SplitFractions& fractions, std::uint64_t seed);
void write_dataset(const nlohmann::json& manifest, const std::filesystem::path& path);
Dataset import_dataset(const nlohmann::json& manifest);
Dataset read_dataset(const std::filesystem::path& path);

void to_json(nlohmann::json& j, const LabelPolicy& p);
void from_json(const nlohmann::json& j, LabelPolicy& p);

}  // namespace camsim
