#include "camsim/annotation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>

#include "camsim/error.hpp"

namespace camsim {

void LabelPolicy::validate() const {
  if (!(min_box_w > 0.0) || !(min_box_h > 0.0) || !(max_distance_m > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "label policy thresholds must be positive");
  }
}

Plane<std::uint16_t> bin_instances(const Scene& scene, const Footprint& fp) {
  const std::size_t b = fp.binning;
  Plane<std::uint16_t> out(fp.geometry.rows, fp.geometry.cols);
  std::vector<std::pair<std::uint16_t, std::size_t>> counts;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    for (std::size_t c = 0; c < out.cols(); ++c) {
      counts.clear();
      for (std::size_t dy = 0; dy < b; ++dy) {
        for (std::size_t dx = 0; dx < b; ++dx) {
          const auto id = scene.instances(fp.row0 + r * b + dy, fp.col0 + c * b + dx);
          auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& e) { return e.first == id; });
          if (it == counts.end()) {
            counts.emplace_back(id, 1);
          } else {
            ++it->second;
          }
        }
      }
      auto best = counts.front();
      for (const auto& e : counts) {
        if (e.second > best.second || (e.second == best.second && e.first < best.first)) best = e;
      }
      out(r, c) = best.first;
    }
  }
  return out;
}

std::vector<GroundTruthBox> project_truth(const Scene& scene, const Footprint& fp) {
  const Plane<std::uint16_t> labels = bin_instances(scene, fp);
  const std::size_t b = fp.binning;
  struct Acc {
    std::size_t x0 = SIZE_MAX, y0 = SIZE_MAX, x1 = 0, y1 = 0, count = 0;
    std::vector<float> depths;
  };
  std::map<std::uint16_t, Acc> acc;
  for (std::size_t r = 0; r < labels.rows(); ++r) {
    for (std::size_t c = 0; c < labels.cols(); ++c) {
      const auto id = labels(r, c);
      if (id == 0) continue;
      Acc& a = acc[id];
      a.x0 = std::min(a.x0, c);
      a.y0 = std::min(a.y0, r);
      a.x1 = std::max(a.x1, c + 1);
      a.y1 = std::max(a.y1, r + 1);
      ++a.count;
      for (std::size_t dy = 0; dy < b; ++dy) {
        for (std::size_t dx = 0; dx < b; ++dx) {
          const std::size_t sr = fp.row0 + r * b + dy, sc = fp.col0 + c * b + dx;
          if (scene.instances(sr, sc) == id) a.depths.push_back(scene.depth(sr, sc));
        }
      }
    }
  }
  std::vector<GroundTruthBox> out;
  for (auto& [id, a] : acc) {
    GroundTruthBox g;
    g.instance_id = id;
    auto cls = scene.classes.find(id);
    g.cls = cls == scene.classes.end() ? "car" : cls->second;
    g.bbox = {static_cast<double>(a.x0), static_cast<double>(a.y0), static_cast<double>(a.x1),
              static_cast<double>(a.y1)};
    g.pixel_count = a.count;
    auto& d = a.depths;
    std::sort(d.begin(), d.end());
    const std::size_t n = d.size();
    g.distance_m = n % 2 == 1 ? d[n / 2] : 0.5 * (static_cast<double>(d[n / 2 - 1]) + d[n / 2]);
    out.push_back(std::move(g));
  }
  return out;
}

std::vector<GroundTruthBox> project_truth(const Scene& scene, const SensorSpec& sensor) {
  return project_truth(scene, sensor_footprint(scene.rows(), scene.cols(), scene.radiance.pitch_um(), sensor));
}

std::vector<GroundTruthBox> apply_policy(const std::vector<GroundTruthBox>& boxes,
                                         const LabelPolicy& policy) {
  policy.validate();
  std::vector<GroundTruthBox> out;
  for (auto g : boxes) {
    g.visible = g.bbox.width() >= policy.min_box_w && g.bbox.height() >= policy.min_box_h &&
                g.distance_m <= policy.max_distance_m;
    if (g.visible || !policy.apply_visibility) out.push_back(std::move(g));
  }
  return out;
}

Split split_ids(std::vector<std::int64_t> ids, const SplitFractions& f, std::uint64_t seed) {
  const double total = f.train + f.val + f.test;
  if (f.train < 0.0 || f.val < 0.0 || f.test < 0.0 || !(total > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "split fractions must be non-negative with a positive sum");
  }
  std::sort(ids.begin(), ids.end());
  std::mt19937_64 rng(seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  const double n = static_cast<double>(ids.size());
  const auto n_train = std::min(ids.size(), static_cast<std::size_t>(std::llround(n * f.train / total)));
  const auto n_val = std::min(ids.size() - n_train, static_cast<std::size_t>(std::llround(n * f.val / total)));
  Split s;
  s.train.assign(ids.begin(), ids.begin() + static_cast<long>(n_train));
  s.val.assign(ids.begin() + static_cast<long>(n_train), ids.begin() + static_cast<long>(n_train + n_val));
  s.test.assign(ids.begin() + static_cast<long>(n_train + n_val), ids.end());
  for (auto* v : {&s.train, &s.val, &s.test}) std::sort(v->begin(), v->end());
  return s;
}

nlohmann::json export_dataset(const std::vector<DatasetImage>& images,
                              const std::map<std::int64_t, std::vector<GroundTruthBox>>& truths,
                              const SplitFractions& fractions, std::uint64_t seed) {
  std::set<std::int64_t> seen;
  std::vector<std::int64_t> ids;
  auto jimages = nlohmann::json::array();
  for (const auto& img : images) {
    if (!seen.insert(img.id).second) {
      throw Error(ErrorCode::kValidation, "duplicate image id " + std::to_string(img.id));
    }
    ids.push_back(img.id);
    jimages.push_back({{"id", img.id}, {"file", img.file}, {"width", img.width}, {"height", img.height}});
  }
  auto anns = nlohmann::json::array();
  std::int64_t ann_id = 1;
  for (const auto& img : images) {
    auto it = truths.find(img.id);
    if (it == truths.end()) continue;
    for (const auto& g : it->second) {
      anns.push_back({{"id", ann_id++},
                      {"image_id", img.id},
                      {"category_id", 1},
                      {"bbox", {g.bbox.x_min, g.bbox.y_min, g.bbox.width(), g.bbox.height()}},
                      {"area", g.bbox.area()},
                      {"iscrowd", 0},
                      {"distance_m", g.distance_m},
                      {"instance_id", g.instance_id},
                      {"pixel_count", g.pixel_count},
                      {"visible", g.visible}});
    }
  }
  for (const auto& [id, boxes] : truths) {
    if (!seen.contains(id) && !boxes.empty()) {
      throw Error(ErrorCode::kValidation, "annotations reference unknown image id " + std::to_string(id));
    }
  }
  const Split split = split_ids(ids, fractions, seed);
  return {{"images", jimages},
          {"annotations", anns},
          {"categories", nlohmann::json::array({{{"id", 1}, {"name", "car"}}})},
          {"split", {{"train", split.train}, {"val", split.val}, {"test", split.test}}},
          {"split_fractions", {fractions.train, fractions.val, fractions.test}},
          {"split_seed", seed}};
}

void write_dataset(const nlohmann::json& manifest, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  f << manifest.dump(2) << '\n';
}

Dataset import_dataset(const nlohmann::json& m) {
  Dataset ds;
  std::set<std::int64_t> seen;
  for (const auto& ji : m.at("images")) {
    DatasetImage img{ji.at("id").get<std::int64_t>(), ji.value("file", std::string{}),
                     ji.value("width", std::size_t{0}), ji.value("height", std::size_t{0})};
    if (!seen.insert(img.id).second) {
      throw Error(ErrorCode::kValidation, "duplicate image id " + std::to_string(img.id));
    }
    ds.truths[img.id];
    ds.images.push_back(std::move(img));
  }
  for (const auto& ja : m.at("annotations")) {
    const auto image_id = ja.at("image_id").get<std::int64_t>();
    if (!seen.contains(image_id)) {
      throw Error(ErrorCode::kValidation, "annotation references unknown image id " + std::to_string(image_id));
    }
    const auto bb = ja.at("bbox").get<std::vector<double>>();
    if (bb.size() != 4) throw Error(ErrorCode::kValidation, "bbox must be [x, y, w, h]");
    GroundTruthBox g;
    g.bbox = {bb[0], bb[1], bb[0] + bb[2], bb[1] + bb[3]};
    g.distance_m = ja.value("distance_m", 0.0);
    g.instance_id = ja.value("instance_id", std::uint16_t{0});
    g.pixel_count = ja.value("pixel_count", static_cast<std::size_t>(std::llround(g.bbox.area())));
    g.visible = ja.value("visible", true);
    ds.truths[image_id].push_back(std::move(g));
  }
  if (m.contains("split")) {
    const auto& s = m.at("split");
    ds.split.train = s.value("train", std::vector<std::int64_t>{});
    ds.split.val = s.value("val", std::vector<std::int64_t>{});
    ds.split.test = s.value("test", std::vector<std::int64_t>{});
  }
  return ds;
}

Dataset read_dataset(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  try {
    return import_dataset(nlohmann::json::parse(f));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kValidation, "malformed dataset " + path.string() + ": " + e.what());
  }
}

void to_json(nlohmann::json& j, const LabelPolicy& p) {
  j = {{"min_box_w", p.min_box_w},
       {"min_box_h", p.min_box_h},
       {"max_distance_m", p.max_distance_m},
       {"apply_visibility", p.apply_visibility}};
}

void from_json(const nlohmann::json& j, LabelPolicy& p) {
  p = LabelPolicy{};
  p.min_box_w = j.value("min_box_w", p.min_box_w);
  p.min_box_h = j.value("min_box_h", p.min_box_h);
  p.max_distance_m = j.value("max_distance_m", p.max_distance_m);
  p.apply_visibility = j.value("apply_visibility", p.apply_visibility);
  p.validate();
}

}  // namespace camsim
