#include "camsim/config.hpp"

#include <algorithm>
#include <fstream>

#include "camsim/error.hpp"

namespace camsim {

namespace fs = std::filesystem;

nlohmann::json read_json_file(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kConfig, "config error: cannot open " + path.string());
  try {
    return nlohmann::json::parse(f);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, "config error: " + path.string() + ": " + e.what());
  }
}

namespace {

// A section may be inline JSON or a path to a JSON file.
nlohmann::json section(const nlohmann::json& j, const char* key, const fs::path& base) {
  if (!j.contains(key)) return nlohmann::json::object();
  const auto& v = j.at(key);
  if (v.is_string()) {
    const fs::path p = base / v.get<std::string>();
    if (!fs::exists(p)) throw Error(ErrorCode::kConfig, std::string("config error: ") + key + " file " + p.string() + " not found");
    return read_json_file(p);
  }
  return v;
}

SceneSet scene_set_from_string(const std::string& s) {
  if (s == "random") return SceneSet::kRandom;
  if (s == "distance_ladder") return SceneSet::kDistanceLadder;
  if (s == "directory") return SceneSet::kDirectory;
  throw Error(ErrorCode::kConfig, "unknown scene set '" + s + "'");
}

const char* to_string(SceneSet s) {
  switch (s) {
    case SceneSet::kRandom: return "random";
    case SceneSet::kDistanceLadder: return "distance_ladder";
    case SceneSet::kDirectory: return "directory";
  }
  return "?";
}

SceneSource parse_scenes(const nlohmann::json& j, const fs::path& base) {
  SceneSource s;
  s.set = scene_set_from_string(j.value("set", std::string("random")));
  if (j.contains("spec")) s.base = j.at("spec").get<SceneSpec>();
  s.count = j.value("count", s.count);
  s.targets_per_scene = j.value("targets_per_scene", s.targets_per_scene);
  s.min_distance_m = j.value("min_distance_m", s.min_distance_m);
  s.max_distance_m = j.value("max_distance_m", s.max_distance_m);
  s.replicates = j.value("replicates", s.replicates);
  s.distances_m = j.value("distances_m", s.distances_m);
  s.max_slots = j.value("max_slots", s.max_slots);
  s.contrast_min = j.value("contrast_min", s.contrast_min);
  s.contrast_max = j.value("contrast_max", s.contrast_max);
  if (s.distances_m.empty()) {
    for (int d = 15; d < 150; d += 10) s.distances_m.push_back(d);
  }
  if (!(s.min_distance_m > 0.0) || s.max_distance_m < s.min_distance_m) {
    throw Error(ErrorCode::kConfig, "need 0 < min_distance_m <= max_distance_m");
  }
  if (s.contrast_min < 0.0 || s.contrast_max < s.contrast_min || s.contrast_max > 1.0) {
    throw Error(ErrorCode::kConfig, "need 0 <= contrast_min <= contrast_max <= 1");
  }
  if (s.set == SceneSet::kDirectory) {
    for (const auto& d : j.value("dirs", std::vector<std::string>{})) s.dirs.push_back(base / d);
    if (j.contains("manifest")) {
      const fs::path m = base / j.at("manifest").get<std::string>();
      const auto manifest = read_json_file(m);
      for (const auto& e : manifest.at("scenes")) s.dirs.push_back(m.parent_path() / e.at("dir").get<std::string>());
    }
    if (j.contains("root")) {
      const fs::path root = base / j.at("root").get<std::string>();
      if (!fs::is_directory(root)) throw Error(ErrorCode::kConfig, "config error: scene root " + root.string() + " not found");
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(root)) {
        if (fs::exists(e.path() / "radiance.sic")) found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      s.dirs.insert(s.dirs.end(), found.begin(), found.end());
    }
    for (const auto& d : s.dirs) {
      if (!fs::exists(d / "radiance.sic")) {
        throw Error(ErrorCode::kConfig, "config error: scene directory " + d.string() + " has no radiance.sic");
      }
    }
  }
  return s;
}

SweepSpec parse_sweep(const nlohmann::json& j) {
  SweepSpec s;
  int axes = 0;
  if (j.contains("pixel_size_um")) {
    s.axis = SweepAxis::kPixelSize;
    s.pixel_sizes_um = j.at("pixel_size_um").get<std::vector<double>>();
    ++axes;
  }
  if (j.contains("exposure")) {
    s.axis = SweepAxis::kExposure;
    for (const auto& p : j.at("exposure")) s.plans.push_back(p.get<ExposurePlan>());
    ++axes;
  }
  if (j.contains("gamma")) {
    s.axis = SweepAxis::kGamma;
    for (const auto& g : j.at("gamma")) s.gammas.push_back(g.get<GammaSpec>());
    ++axes;
  }
  if (axes > 1) throw Error(ErrorCode::kConfig, "config error: a run sweeps at most one axis");
  s.illuminance_lux = j.value("illuminance_lux", s.illuminance_lux);
  for (double lux : s.illuminance_lux) {
    if (!(lux > 0.0)) throw Error(ErrorCode::kConfig, "config error: illuminance levels must be positive");
  }
  return s;
}

}  // namespace

RunConfig parse_run_config(const nlohmann::json& j, const fs::path& base) {
  try {
    if (!j.is_object()) throw Error(ErrorCode::kConfig, "config must be a JSON object");
    RunConfig c;
    c.seed = j.value("seed", c.seed);
    // Outputs resolve against the working directory, inputs against the config.
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("scenes")) c.scenes = parse_scenes(j.at("scenes"), base);
    c.lens = section(j, "lens", base).get<LensSpec>();
    c.sensor = section(j, "sensor", base).get<SensorSpec>();
    if (j.contains("exposure")) c.exposure = section(j, "exposure", base).get<ExposurePlan>();
    if (j.contains("isp")) c.isp = section(j, "isp", base).get<PipelineConfig>();
    c.policy = section(j, "label_policy", base).get<LabelPolicy>();
    if (j.contains("detector")) {
      const auto& d = j.at("detector");
      if (d.contains("proxy") && d.contains("import")) {
        throw Error(ErrorCode::kConfig, "detector takes either 'proxy' or 'import', not both");
      }
      if (d.contains("proxy")) c.proxy = d.at("proxy").get<ProxyDetectorConfig>();
      if (d.contains("import")) {
        c.detections_path = base / d.at("import").get<std::string>();
        if (!fs::exists(*c.detections_path)) {
          throw Error(ErrorCode::kConfig, "detections file " + c.detections_path->string() + " not found");
        }
      }
    }
    if (j.contains("sweep")) c.sweep = parse_sweep(j.at("sweep"));
    if (j.contains("illuminance_lux")) {
      c.illuminance_lux = j.at("illuminance_lux").get<double>();
      if (!(*c.illuminance_lux > 0.0)) throw Error(ErrorCode::kConfig, "illuminance_lux must be positive");
    }
    c.fit_dye_to_scene = j.value("fit_dye_to_scene", c.fit_dye_to_scene);
    c.bin_m = j.value("bin_m", c.bin_m);
    if (j.contains("max_distance_m")) {
      if (j.at("max_distance_m").is_null()) {
        c.max_distance_m.reset();
      } else {
        c.max_distance_m = j.at("max_distance_m").get<double>();
      }
    }
    const auto mode = j.value("curve_mode", std::string("pooled"));
    if (mode == "pooled") {
      c.curve_mode = CurveMode::kPooled;
    } else if (mode == "group_mean") {
      c.curve_mode = CurveMode::kGroupMean;
    } else {
      throw Error(ErrorCode::kConfig, "unknown curve_mode '" + mode + "'");
    }
    if (j.contains("artifacts")) {
      const auto& a = j.at("artifacts");
      c.artifacts.images = a.value("images", c.artifacts.images);
      c.artifacts.frames = a.value("frames", c.artifacts.frames);
      c.artifacts.svg = a.value("svg", c.artifacts.svg);
      c.artifacts.dataset = a.value("dataset", c.artifacts.dataset);
    }
    if (!(c.bin_m > 0.0)) throw Error(ErrorCode::kConfig, "bin_m must be positive");
    return c;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    throw Error(ErrorCode::kConfig, std::string("config error: ") + e.what());
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("config error: ") + e.what());
  }
}

RunConfig load_run_config(const fs::path& path) {
  return parse_run_config(read_json_file(path), path.parent_path());
}

nlohmann::json to_json(const RunConfig& c) {
  nlohmann::json scenes{{"set", to_string(c.scenes.set)},
                        {"spec", c.scenes.base},
                        {"count", c.scenes.count},
                        {"targets_per_scene", c.scenes.targets_per_scene},
                        {"min_distance_m", c.scenes.min_distance_m},
                        {"max_distance_m", c.scenes.max_distance_m},
                        {"replicates", c.scenes.replicates},
                        {"distances_m", c.scenes.distances_m},
                        {"max_slots", c.scenes.max_slots},
                        {"contrast_min", c.scenes.contrast_min},
                        {"contrast_max", c.scenes.contrast_max}};
  auto dirs = nlohmann::json::array();
  for (const auto& d : c.scenes.dirs) dirs.push_back(d.generic_string());
  scenes["dirs"] = dirs;
  nlohmann::json sweep = nlohmann::json::object();
  switch (c.sweep.axis) {
    case SweepAxis::kNone: break;
    case SweepAxis::kPixelSize: sweep["pixel_size_um"] = c.sweep.pixel_sizes_um; break;
    case SweepAxis::kExposure: sweep["exposure"] = c.sweep.plans; break;
    case SweepAxis::kGamma: sweep["gamma"] = c.sweep.gammas; break;
  }
  if (!c.sweep.illuminance_lux.empty()) sweep["illuminance_lux"] = c.sweep.illuminance_lux;
  nlohmann::json j{{"seed", c.seed},
                   {"scenes", scenes},
                   {"lens", c.lens},
                   {"sensor", c.sensor},
                   {"exposure", c.exposure},
                   {"isp", c.isp},
                   {"label_policy", c.policy},
                   {"sweep", sweep},
                   {"fit_dye_to_scene", c.fit_dye_to_scene},
                   {"bin_m", c.bin_m},
                   {"curve_mode", c.curve_mode == CurveMode::kPooled ? "pooled" : "group_mean"},
                   {"artifacts",
                    {{"images", c.artifacts.images},
                     {"frames", c.artifacts.frames},
                     {"svg", c.artifacts.svg},
                     {"dataset", c.artifacts.dataset}}}};
  j["detector"] = c.detections_path ? nlohmann::json{{"import", c.detections_path->generic_string()}}
                                    : nlohmann::json{{"proxy", c.proxy}};
  j["max_distance_m"] = c.max_distance_m ? nlohmann::json(*c.max_distance_m) : nlohmann::json(nullptr);
  if (c.illuminance_lux) j["illuminance_lux"] = *c.illuminance_lux;
  return j;
}

}  // namespace camsim
