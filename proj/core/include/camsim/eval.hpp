#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "camsim/box.hpp"

namespace camsim {

struct Detection {
  std::int64_t image_id = 0;
  Box bbox;
  double score = 0.0;
  std::string cls = "car";

  friend bool operator==(const Detection&, const Detection&) = default;
};

struct GroundTruth {
  std::int64_t image_id = 0;
  Box bbox;
  double distance_m = 0.0;
};

double iou(const Box& a, const Box& b);

struct MatchResult {
  std::vector<bool> tp;              // per detection, input order
  std::vector<long> matched_gt;      // per detection, -1 if none
  std::vector<bool> gt_matched;      // per GT, input order
};

/// Single-image greedy matching: detections by descending score (ties by
/// input order) each take the highest-IoU unmatched GT with IoU ≥ threshold
/// (ties by lowest GT index).
MatchResult match(const std::vector<Box>& dets, const std::vector<double>& scores,
                  const std::vector<Box>& gts, double iou_threshold = 0.5);

enum class ApMethod { kAllPoints, kElevenPoint };

/// AP from score-ordered TP flags and the GT count. nullopt when n_gt == 0.
std::optional<double> ap_from_flags(const std::vector<bool>& tp_in_rank_order, std::size_t n_gt,
                                    ApMethod method = ApMethod::kAllPoints);

/// Pooled PASCAL AP: matching per image, then one PR curve over all
/// detections sorted by score (stable in image-id, then input order).
std::optional<double> average_precision(const std::vector<Detection>& dets,
                                        const std::vector<GroundTruth>& gts,
                                        double iou_threshold = 0.5,
                                        ApMethod method = ApMethod::kAllPoints);

struct APBin {
  double low_m = 0.0;
  double high_m = 0.0;
  std::optional<double> ap;
  std::size_t gt_count = 0;

  double center() const noexcept { return 0.5 * (low_m + high_m); }
};

struct APCurve {
  std::vector<APBin> bins;
};

/// Per-bin AP. Matched detections go to their GT's bin; unmatched ones to the
/// bin of the highest-IoU GT in the same image, or are dropped when they
/// overlap no GT. Bins run contiguously from 0 to the farthest GT (or to
/// max_distance_m when given).
APCurve ap_vs_distance(const std::vector<Detection>& dets, const std::vector<GroundTruth>& gts,
                       double bin_m = 10.0, std::optional<double> max_distance_m = std::nullopt,
                       double iou_threshold = 0.5, ApMethod method = ApMethod::kAllPoints);

struct OD50Result {
  std::optional<double> od50_m;          // empty when beyond range
  bool beyond_range = false;
  std::optional<std::size_t> crossing_bin;

  std::string to_string() const;
};

OD50Result od50(const APCurve& curve);

/// Shortest round-trip decimal form.
std::string format_number(double v);

void write_metrics_csv(const APCurve& curve, const std::filesystem::path& path);
std::string metrics_csv(const APCurve& curve);
APCurve parse_metrics_csv(const std::string& text);
APCurve read_metrics_csv(const std::filesystem::path& path);

struct CurveSeries {
  std::string label;
  APCurve curve;
};

/// AP-vs-distance plot: one polyline per series, axes, 0.5 reference line.
std::string curves_svg(const std::vector<CurveSeries>& series, const std::string& title);
void write_curves_svg(const std::vector<CurveSeries>& series, const std::string& title,
                      const std::filesystem::path& path);

nlohmann::json detections_to_json(const std::vector<Detection>& dets);
/// Validates boxes and scores; throws kValidation listing unknown image ids
/// when `known_image_ids` is non-empty.
std::vector<Detection> detections_from_json(const nlohmann::json& j,
                                            const std::vector<std::int64_t>& known_image_ids = {});
void export_detections(const std::vector<Detection>& dets, const std::filesystem::path& path);
std::vector<Detection> import_detections(const std::filesystem::path& path,
                                         const std::vector<std::int64_t>& known_image_ids = {});

}  // namespace camsim
