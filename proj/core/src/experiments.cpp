#include "camsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <random>
#include <sstream>

#include "camsim/error.hpp"
#include "camsim/image_io.hpp"
#include "camsim/parallel.hpp"
#include "camsim/rng.hpp"

namespace camsim {

namespace fs = std::filesystem;

namespace {

double mean_value(const std::optional<Spectrum>& s, double fallback) {
  if (!s || s->size() == 0) return fallback;
  double sum = 0.0;
  for (double v : s->values()) sum += v;
  return sum / static_cast<double>(s->size());
}

// Background-relative flat reflectance: ρ_bg · (1 ± U[min, max]).
Spectrum slot_reflectance(const SceneSource& src, CounterRng& rng) {
  const double bg = mean_value(src.base.background, 0.2);
  const double sign = rng.uniform() < 0.5 ? -1.0 : 1.0;
  const double mag = src.contrast_min + (src.contrast_max - src.contrast_min) * rng.uniform();
  const double rho = std::clamp(bg * (1.0 + sign * mag), 0.0, 1.0);
  return Spectrum::constant(src.base.grid, SpectrumUnit::kDimensionless, rho);
}

// Ladder reflectance for slot i of replicate r. Magnitudes and signs are
// stratified over replicates through per-slot permutations, so every slot
// sees the same contrast set and bins differ only by which slots fit.
Spectrum ladder_reflectance(const SceneSource& src, std::uint64_t seed, std::size_t r, std::size_t i) {
  const std::size_t n = std::max<std::size_t>(1, src.replicates);
  std::vector<std::size_t> mag_rank(n), sign_rank(n);
  for (std::size_t k = 0; k < n; ++k) mag_rank[k] = sign_rank[k] = k;
  std::mt19937_64 perm(stream_key({seed, 0x534C4F54ull, i}));
  std::shuffle(mag_rank.begin(), mag_rank.end(), perm);
  std::shuffle(sign_rank.begin(), sign_rank.end(), perm);
  CounterRng jitter{seed, 0x534C4F54ull, r, i};
  const double q = (static_cast<double>(mag_rank[r % n]) + jitter.uniform()) / static_cast<double>(n);
  const double mag = src.contrast_min + (src.contrast_max - src.contrast_min) * q;
  const double sign = 2 * sign_rank[r % n] < n ? -1.0 : 1.0;
  const double bg = mean_value(src.base.background, 0.2);
  const double rho = std::clamp(bg * (1.0 + sign * mag), 0.0, 1.0);
  return Spectrum::constant(src.base.grid, SpectrumUnit::kDimensionless, rho);
}

std::string scene_name(std::int64_t id) {
  std::ostringstream os;
  os << "scene_" << std::setw(4) << std::setfill('0') << id;
  return os.str();
}

}  // namespace

SceneSpec ladder_scene_spec(const SceneSource& src, std::uint64_t seed, std::size_t replicate,
                            std::size_t k) {
  SceneSpec s = src.base;
  s.seed = stream_key({seed, 0x4C4144444552ull, replicate});
  s.group = static_cast<int>(replicate);
  const double d = src.distances_m.at(k);
  TargetSpec proto;
  const double w = projected_size_px(proto.width_m, s.focal_length_mm, d, s.grid_pitch_um);
  const double h = projected_size_px(proto.height_m, s.focal_length_mm, d, s.grid_pitch_um);
  const auto W = static_cast<double>(s.width), H = static_cast<double>(s.height);
  const auto fit_cols = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(W / (1.5 * w))));
  const auto fit_rows = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(H / (1.5 * h))));
  const std::size_t slots = std::clamp<std::size_t>(fit_cols * fit_rows, 1, std::max<std::size_t>(1, src.max_slots));
  // Grid shape follows the raster aspect and depends only on the slot count
  // once it fits, so slot positions stay put across far distances.
  const auto aspect_cols = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(slots) * W / H)));
  const std::size_t n_cols = std::clamp<std::size_t>(aspect_cols, (slots + fit_rows - 1) / fit_rows, fit_cols);
  const std::size_t n_rows = (slots + n_cols - 1) / n_cols;

  s.targets.clear();
  for (std::size_t i = 0; i < slots; ++i) {
    TargetSpec t = proto;
    t.distance_m = d;
    t.reflectance = ladder_reflectance(src, seed, replicate, i);
    t.center_x = (static_cast<double>(i % n_cols) + 0.5) / static_cast<double>(n_cols);
    t.center_y = (static_cast<double>(i / n_cols) + 0.5) / static_cast<double>(n_rows);
    s.targets.push_back(std::move(t));
  }
  std::ostringstream desc;
  desc << "distance ladder: replicate " << replicate << ", " << d << " m, " << slots << " targets";
  s.description = desc.str();
  return s;
}

SceneSpec random_scene_spec(const SceneSource& src, std::uint64_t seed, std::size_t index) {
  SceneSpec s = src.base;
  s.seed = stream_key({seed, 0x52414E444F4Dull, index});
  s.group = -1;
  s.targets.clear();
  TargetSpec proto;
  // Nearest distance at which a car still fits in 90% of the raster.
  const double fit_w = proto.width_m * s.focal_length_mm * 1e-3 /
                       (0.9 * static_cast<double>(s.width) * s.grid_pitch_um * 1e-6);
  const double fit_h = proto.height_m * s.focal_length_mm * 1e-3 /
                       (0.9 * static_cast<double>(s.height) * s.grid_pitch_um * 1e-6);
  const double lo = std::max({src.min_distance_m, fit_w, fit_h});
  const double hi = std::max(lo, src.max_distance_m);
  for (std::size_t i = 0; i < src.targets_per_scene; ++i) {
    CounterRng rng{s.seed, 0x544152474554ull, i};
    TargetSpec t = proto;
    t.distance_m = std::min(300.0, lo + (hi - lo) * rng.uniform());
    t.reflectance = slot_reflectance(src, rng);
    s.targets.push_back(std::move(t));
  }
  s.description = "random scene " + std::to_string(index);
  return s;
}

std::vector<SceneJob> scene_jobs(const RunConfig& cfg) {
  std::vector<SceneJob> jobs;
  const SceneSource& src = cfg.scenes;
  const std::uint64_t seed = cfg.seed;
  switch (src.set) {
    case SceneSet::kRandom:
      for (std::size_t i = 0; i < src.count; ++i) {
        const auto id = static_cast<std::int64_t>(i + 1);
        jobs.push_back({id, -1, scene_name(id), [&src, seed, i] { return synthesize(random_scene_spec(src, seed, i)); }});
      }
      break;
    case SceneSet::kDistanceLadder:
      for (std::size_t r = 0; r < src.replicates; ++r) {
        for (std::size_t k = 0; k < src.distances_m.size(); ++k) {
          const auto id = static_cast<std::int64_t>(jobs.size() + 1);
          jobs.push_back({id, static_cast<int>(r), scene_name(id),
                          [&src, seed, r, k] { return synthesize(ladder_scene_spec(src, seed, r, k)); }});
        }
      }
      break;
    case SceneSet::kDirectory:
      for (std::size_t i = 0; i < src.dirs.size(); ++i) {
        const auto id = static_cast<std::int64_t>(i + 1);
        const fs::path dir = src.dirs[i];
        jobs.push_back({id, -1, dir.filename().string(), [dir] { return load_scene(dir); }});
      }
      break;
  }
  return jobs;
}

namespace {

std::string pixel_label(double p) {
  std::ostringstream os;
  os << "pixel_" << p << "um";
  return os.str();
}

std::string gamma_label(const GammaSpec& g) {
  std::ostringstream os;
  switch (g.mode) {
    case GammaMode::kFixed: os << "gamma_fixed_" << g.gamma; break;
    case GammaMode::kAdaptive: os << "gamma_adaptive_" << g.target; break;
    case GammaMode::kAdaptiveMeanOfPowers: os << "gamma_meanpow_" << g.target; break;
    case GammaMode::kSRGBStandard: os << "gamma_srgb"; break;
    case GammaMode::kNone: os << "gamma_none"; break;
  }
  return os.str();
}

std::string lux_label(double lux) {
  std::ostringstream os;
  os << lux << "lux";
  return os.str();
}

std::vector<ExposurePlan> default_exposure_plans() {
  std::vector<ExposurePlan> plans;
  for (double t : kDefaultBracketS) {
    ExposurePlan p;
    p.mode = ExposureMode::kFixed;
    p.t_s = t;
    plans.push_back(p);
  }
  ExposurePlan cw;
  cw.mode = ExposureMode::kCenterWeighted;
  plans.push_back(cw);
  ExposurePlan br;
  br.mode = ExposureMode::kBracketed;
  plans.push_back(br);
  return plans;
}

}  // namespace

std::vector<Variant> sweep_variants(const RunConfig& cfg) {
  const Variant base{"base", cfg.sensor, cfg.exposure, cfg.isp, cfg.illuminance_lux};
  std::vector<Variant> out;
  switch (cfg.sweep.axis) {
    case SweepAxis::kNone:
      out.push_back(base);
      break;
    case SweepAxis::kPixelSize:
      for (double p : cfg.sweep.pixel_sizes_um) {
        Variant v = base;
        v.label = pixel_label(p);
        v.sensor = cfg.sensor.with_pixel_size(p);
        v.sensor.validate();
        out.push_back(std::move(v));
      }
      break;
    case SweepAxis::kExposure: {
      const auto plans = cfg.sweep.plans.empty() ? default_exposure_plans() : cfg.sweep.plans;
      std::vector<std::optional<double>> levels;
      for (double lux : cfg.sweep.illuminance_lux) levels.emplace_back(lux);
      if (levels.empty()) levels.push_back(cfg.illuminance_lux);
      for (const auto& lux : levels) {
        for (const auto& plan : plans) {
          Variant v = base;
          v.plan = plan;
          v.illuminance_lux = lux;
          v.label = plan.label() + (lux ? "_" + lux_label(*lux) : std::string{});
          out.push_back(std::move(v));
        }
      }
      break;
    }
    case SweepAxis::kGamma:
      for (const auto& g : cfg.sweep.gammas) {
        Variant v = base;
        v.isp.gamma = g;
        v.label = gamma_label(g);
        out.push_back(std::move(v));
      }
      break;
  }
  return out;
}

std::uint64_t capture_seed(std::uint64_t run_seed, std::int64_t image_id) {
  return stream_key({run_seed, 0x43415054ull, static_cast<std::uint64_t>(image_id)});
}

std::uint64_t detector_seed(const ProxyDetectorConfig& proxy, std::uint64_t run_seed, int group,
                            std::int64_t image_id) {
  // Scenes of one replicate group share detector randomness so that the
  // same car slot draws the same uniform at every distance.
  const std::uint64_t key = group >= 0 ? static_cast<std::uint64_t>(group)
                                       : (std::uint64_t{1} << 40) + static_cast<std::uint64_t>(image_id);
  return stream_key({proxy.seed, run_seed, 0x50524F5859ull, key});
}

namespace {

RawFrame capture_rate(const Plane<double>& rate, double scale, const SensorSpec& sensor, double t,
                      std::uint64_t seed) {
  Plane<double> e = rate;
  for (auto& v : e.data()) v *= scale * t;
  return adc(apply_noise(e, sensor, t, seed), sensor, t, seed);
}

struct Rendered {
  Image image;
  std::vector<double> exposures;
  std::vector<std::string> warnings;
};

Rendered render_plan(const Plane<double>& rate, double scale, const SensorSpec& sensor, const ExposurePlan& plan,
                     const PipelineConfig& isp, std::uint64_t seed) {
  Rendered out;
  GammaInfo info;
  switch (plan.mode) {
    case ExposureMode::kFixed: {
      out.exposures = {plan.t_s};
      out.image = render(capture_rate(rate, scale, sensor, plan.t_s, seed), isp, &info);
      break;
    }
    case ExposureMode::kCenterWeighted: {
      Plane<double> scaled = rate;
      for (auto& v : scaled.data()) v *= scale;
      const double t = center_weighted_duration(scaled, sensor, plan);
      out.exposures = {t};
      out.image = render(capture_rate(rate, scale, sensor, t, seed), isp, &info);
      break;
    }
    case ExposureMode::kBracketed: {
      std::vector<RawFrame> frames;
      for (std::size_t i = 0; i < plan.durations_s.size(); ++i) {
        const double t = plan.durations_s[i];
        const std::uint64_t s = plan.durations_s.size() == 1 ? seed : bracket_seed(seed, i);
        frames.push_back(capture_rate(rate, scale, sensor, t, s));
      }
      out.exposures = plan.durations_s;
      out.image = render(hdr_combine(frames), isp, &info);
      break;
    }
  }
  out.warnings = std::move(info.warnings);
  return out;
}

}  // namespace

std::vector<VariantResult> run_variants(const RunConfig& cfg, const std::vector<Variant>& variants,
                                        const std::vector<SceneJob>& jobs,
                                        const std::optional<fs::path>& image_dir) {
  std::vector<VariantResult> results(variants.size());
  for (std::size_t v = 0; v < variants.size(); ++v) {
    results[v].variant = variants[v];
    results[v].scenes.resize(jobs.size());
    if (image_dir) fs::create_directories(*image_dir / variants[v].label);
  }
  // Variants with identical sensors share one expected-rate image.
  std::vector<std::size_t> sensor_slot(variants.size());
  std::vector<std::string> sensor_keys;
  for (std::size_t v = 0; v < variants.size(); ++v) {
    const std::string key = nlohmann::json(variants[v].sensor).dump();
    auto it = std::find(sensor_keys.begin(), sensor_keys.end(), key);
    sensor_slot[v] = static_cast<std::size_t>(it - sensor_keys.begin());
    if (it == sensor_keys.end()) sensor_keys.push_back(key);
  }

  parallel_for(jobs.size(), [&](std::size_t i) {
    const SceneJob& job = jobs[i];
    for (auto& r : results) {
      SceneOutcome& o = r.scenes[i];
      o.image_id = job.image_id;
      o.group = job.group;
      o.name = job.name;
    }
    try {
      const Scene scene = job.make();
      const IrradianceCube irr = sensor_irradiance(scene, cfg.lens);
      std::vector<std::optional<Plane<double>>> rates(sensor_keys.size());
      const std::uint64_t seed = capture_seed(cfg.seed, job.image_id);
      for (std::size_t v = 0; v < variants.size(); ++v) {
        const Variant& var = variants[v];
        SceneOutcome& o = results[v].scenes[i];
        try {
          o.warnings = scene.meta.warnings;
          o.warnings.insert(o.warnings.end(), irr.warnings.begin(), irr.warnings.end());
          const SensorSpec sensor = cfg.fit_dye_to_scene ? fit_dye_to_scene(var.sensor, scene) : var.sensor;
          auto& rate = rates[sensor_slot[v]];
          if (!rate) rate = expected_rate(irr, sensor);
          double scale = 1.0;
          if (var.illuminance_lux) {
            if (!(irr.mean_illuminance_lux > 0.0)) {
              throw Error(ErrorCode::kInvalidArgument, "scene is black; cannot scale to a target illuminance");
            }
            scale = *var.illuminance_lux / irr.mean_illuminance_lux;
          }
          Rendered rendered = render_plan(*rate, scale, sensor, var.plan, var.isp, seed);
          o.exposures_s = rendered.exposures;
          o.warnings.insert(o.warnings.end(), rendered.warnings.begin(), rendered.warnings.end());
          const Footprint fp = sensor_footprint(scene.rows(), scene.cols(), scene.radiance.pitch_um(), sensor);
          o.geometry = fp.geometry;
          o.truths = apply_policy(project_truth(scene, fp), cfg.policy);
          if (!cfg.detections_path) {
            ProxyDetectorConfig proxy = cfg.proxy;
            proxy.seed = detector_seed(cfg.proxy, cfg.seed, job.group, job.image_id);
            o.detections = proxy_detect(rendered.image, o.truths, job.image_id, proxy, &o.report);
          }
          if (image_dir) write_ppm(rendered.image, *image_dir / var.label / (job.name + ".ppm"));
        } catch (const std::exception& e) {
          o.error = e.what();
        }
      }
    } catch (const std::exception& e) {
      for (auto& r : results) r.scenes[i].error = e.what();
    }
  });
  return results;
}

void score_variant(const RunConfig& cfg, VariantResult& result, const std::vector<Detection>* imported) {
  std::vector<GroundTruth> gts;
  std::vector<Detection> dets;
  std::map<std::int64_t, int> group_of;
  for (const auto& o : result.scenes) {
    if (!o.error.empty()) continue;
    group_of[o.image_id] = o.group;
    for (const auto& g : o.truths) gts.push_back({o.image_id, g.bbox, g.distance_m});
    if (!imported) dets.insert(dets.end(), o.detections.begin(), o.detections.end());
  }
  if (imported) {
    for (const auto& d : *imported) {
      if (group_of.contains(d.image_id)) dets.push_back(d);
    }
  }
  result.ap_overall = average_precision(dets, gts);
  if (cfg.curve_mode == CurveMode::kGroupMean) {
    std::map<int, std::pair<std::vector<Detection>, std::vector<GroundTruth>>> by_group;
    for (const auto& d : dets) by_group[group_of[d.image_id]].first.push_back(d);
    for (const auto& g : gts) by_group[group_of[g.image_id]].second.push_back(g);
    APCurve total = ap_vs_distance({}, gts, cfg.bin_m, cfg.max_distance_m);
    std::vector<double> sum(total.bins.size(), 0.0);
    std::vector<std::size_t> n(total.bins.size(), 0);
    for (const auto& [g, dg] : by_group) {
      const APCurve c = ap_vs_distance(dg.first, dg.second, cfg.bin_m,
                                       total.bins.empty() ? std::nullopt : std::optional<double>(total.bins.back().high_m));
      for (std::size_t b = 0; b < c.bins.size() && b < sum.size(); ++b) {
        if (c.bins[b].ap) {
          sum[b] += *c.bins[b].ap;
          ++n[b];
        }
      }
    }
    for (std::size_t b = 0; b < total.bins.size(); ++b) {
      total.bins[b].ap = n[b] > 0 ? std::optional<double>(sum[b] / static_cast<double>(n[b])) : std::nullopt;
    }
    result.curve = std::move(total);
  } else {
    result.curve = ap_vs_distance(dets, gts, cfg.bin_m, cfg.max_distance_m);
  }
  result.od50 = od50(result.curve);
}

namespace {

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json od50_json(const OD50Result& r) {
  return r.beyond_range ? nlohmann::json("beyond-range") : nlohmann::json(r.od50_m.value_or(0.0));
}

double mean_exposure(const VariantResult& r) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& o : r.scenes) {
    if (!o.error.empty() || o.exposures_s.empty()) continue;
    sum += o.exposures_s.front();
    ++n;
  }
  return n ? sum / static_cast<double>(n) : 0.0;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  f << text;
}

// metrics.csv, summary.json, detections.json, dataset.json, errors.log, ap_curve.svg
std::vector<std::string> write_variant_outputs(const RunConfig& cfg, const VariantResult& r, const fs::path& dir) {
  fs::create_directories(dir);
  write_metrics_csv(r.curve, dir / "metrics.csv");
  std::vector<Detection> dets;
  std::vector<DatasetImage> images;
  std::map<std::int64_t, std::vector<GroundTruthBox>> truths;
  std::vector<std::string> errors;
  std::size_t n_gt = 0, n_failed = 0;
  for (const auto& o : r.scenes) {
    if (!o.error.empty()) {
      ++n_failed;
      errors.push_back(o.name + ": " + o.error);
      continue;
    }
    dets.insert(dets.end(), o.detections.begin(), o.detections.end());
    images.push_back({o.image_id, r.variant.label + "/" + o.name + ".ppm", o.geometry.cols, o.geometry.rows});
    truths[o.image_id] = o.truths;
    n_gt += o.truths.size();
  }
  nlohmann::json summary{{"label", r.variant.label},
                         {"ap_overall", optional_number(r.ap_overall)},
                         {"od50_m", od50_json(r.od50)},
                         {"n_images", r.scenes.size()},
                         {"n_failed", n_failed},
                         {"n_gt", n_gt},
                         {"n_detections", dets.size()},
                         {"mean_exposure_s", mean_exposure(r)},
                         {"sensor", r.variant.sensor},
                         {"exposure", r.variant.plan},
                         {"isp", r.variant.isp}};
  if (r.variant.illuminance_lux) summary["illuminance_lux"] = *r.variant.illuminance_lux;
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  if (!cfg.detections_path) export_detections(dets, dir / "detections.json");
  if (cfg.artifacts.dataset) {
    write_dataset(export_dataset(images, truths, SplitFractions{}, cfg.seed), dir / "dataset.json");
  }
  if (cfg.artifacts.svg) write_curves_svg({{r.variant.label, r.curve}}, "AP vs distance", dir / "ap_curve.svg");
  if (!errors.empty()) {
    std::string log;
    for (const auto& e : errors) log += e + "\n";
    write_text(dir / "errors.log", log);
  }
  return errors;
}

CommandStatus status_from(const std::vector<std::string>& errors) {
  return {errors.empty() ? 0 : 3, errors};
}

std::vector<Detection> load_imported(const RunConfig& cfg) {
  return import_detections(*cfg.detections_path);
}

std::vector<VariantResult> run_and_score(const RunConfig& cfg, const std::vector<Variant>& variants) {
  const auto jobs = scene_jobs(cfg);
  std::optional<fs::path> image_dir;
  if (cfg.artifacts.images) image_dir = cfg.output_dir / "images";
  auto results = run_variants(cfg, variants, jobs, image_dir);
  std::optional<std::vector<Detection>> imported;
  if (cfg.detections_path) imported = load_imported(cfg);
  for (auto& r : results) score_variant(cfg, r, imported ? &*imported : nullptr);
  return results;
}

std::string sweep_csv(const std::vector<VariantResult>& results) {
  std::string out = "label,ap_overall,od50_m,mean_exposure_s\n";
  for (const auto& r : results) {
    out += r.variant.label + "," + (r.ap_overall ? format_number(*r.ap_overall) : "") + "," + r.od50.to_string() +
           "," + format_number(mean_exposure(r)) + "\n";
  }
  return out;
}

}  // namespace

CommandStatus cmd_synth(const RunConfig& cfg, const fs::path& out_dir) {
  if (cfg.scenes.set == SceneSet::kDirectory) {
    throw Error(ErrorCode::kConfig, "synth needs a procedural scene set, not 'directory'");
  }
  fs::create_directories(out_dir);
  const auto jobs = scene_jobs(cfg);
  std::vector<std::string> errors(jobs.size());
  std::vector<nlohmann::json> entries(jobs.size());
  parallel_for(jobs.size(), [&](std::size_t i) {
    try {
      const Scene s = jobs[i].make();
      save_scene(s, out_dir / jobs[i].name);
      entries[i] = {{"id", jobs[i].image_id},
                    {"dir", jobs[i].name},
                    {"group", jobs[i].group},
                    {"seed", s.meta.seed},
                    {"description", s.meta.description},
                    {"targets", s.classes.size()},
                    {"warnings", s.meta.warnings}};
    } catch (const std::exception& e) {
      errors[i] = jobs[i].name + ": " + e.what();
    }
  });
  nlohmann::json manifest{{"scenes", nlohmann::json::array()}, {"seed", cfg.seed}};
  std::vector<std::string> failed;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (errors[i].empty()) {
      manifest["scenes"].push_back(entries[i]);
    } else {
      failed.push_back(errors[i]);
    }
  }
  write_text(out_dir / "manifest.json", manifest.dump(2) + "\n");
  return status_from(failed);
}

CommandStatus cmd_run(const RunConfig& cfg) {
  const auto variants = sweep_variants(cfg);
  auto results = run_and_score(cfg, variants);
  std::vector<std::string> errors;
  if (cfg.sweep.axis == SweepAxis::kNone) {
    errors = write_variant_outputs(cfg, results.front(), cfg.output_dir);
  } else {
    std::vector<CurveSeries> series;
    for (const auto& r : results) {
      auto e = write_variant_outputs(cfg, r, cfg.output_dir / r.variant.label);
      errors.insert(errors.end(), e.begin(), e.end());
      series.push_back({r.variant.label, r.curve});
    }
    write_text(cfg.output_dir / "sweep.csv", sweep_csv(results));
    if (cfg.artifacts.svg) write_curves_svg(series, "AP vs distance", cfg.output_dir / "ap_curves.svg");
  }
  return status_from(errors);
}

CommandStatus cmd_sweep_pixel(const RunConfig& in) {
  RunConfig cfg = in;
  if (cfg.sweep.axis != SweepAxis::kPixelSize) {
    cfg.sweep = SweepSpec{};
    cfg.sweep.axis = SweepAxis::kPixelSize;
    cfg.sweep.pixel_sizes_um = {1.5, 3.0, 6.0};
  }
  const auto variants = sweep_variants(cfg);
  auto results = run_and_score(cfg, variants);
  std::vector<std::string> errors;
  std::vector<CurveSeries> series;
  std::string csv = "pixel_size_um,rows,cols,well_capacity_e,dynamic_range_db,ap_overall,od50_m\n";
  for (std::size_t v = 0; v < results.size(); ++v) {
    const auto& r = results[v];
    auto e = write_variant_outputs(cfg, r, cfg.output_dir / r.variant.label);
    errors.insert(errors.end(), e.begin(), e.end());
    series.push_back({r.variant.label, r.curve});
    Geometry g = derive_geometry(r.variant.sensor.pixel.size_um, r.variant.sensor);
    for (const auto& o : r.scenes) {
      if (o.error.empty()) {
        g = o.geometry;
        break;
      }
    }
    csv += format_number(cfg.sweep.pixel_sizes_um[v]) + "," + std::to_string(g.rows) + "," + std::to_string(g.cols) +
           "," + format_number(r.variant.sensor.pixel.well_capacity_e) + "," +
           format_number(dynamic_range_db(r.variant.sensor)) + "," +
           (r.ap_overall ? format_number(*r.ap_overall) : "") + "," + r.od50.to_string() + "\n";
  }
  fs::create_directories(cfg.output_dir);
  write_text(cfg.output_dir / "sweep_pixel.csv", csv);
  if (cfg.artifacts.svg) write_curves_svg(series, "AP vs distance by pixel size", cfg.output_dir / "ap_curves.svg");
  return status_from(errors);
}

CommandStatus cmd_sweep_exposure(const RunConfig& in) {
  RunConfig cfg = in;
  if (cfg.sweep.axis != SweepAxis::kExposure) {
    const auto lux = cfg.sweep.illuminance_lux;
    cfg.sweep = SweepSpec{};
    cfg.sweep.axis = SweepAxis::kExposure;
    cfg.sweep.illuminance_lux = lux;
  }
  if (cfg.sweep.illuminance_lux.empty()) cfg.sweep.illuminance_lux = {10, 30, 100, 300, 500};
  const auto variants = sweep_variants(cfg);
  auto results = run_and_score(cfg, variants);
  std::vector<std::string> errors;
  std::string csv = "illuminance_lux,plan,mean_exposure_s,ap_overall,od50_m\n";
  std::string hist = "illuminance_lux,bin_low_ms,bin_high_ms,count\n";
  std::map<double, std::vector<CurveSeries>> by_lux;
  for (const auto& r : results) {
    auto e = write_variant_outputs(cfg, r, cfg.output_dir / r.variant.label);
    errors.insert(errors.end(), e.begin(), e.end());
    const double lux = r.variant.illuminance_lux.value_or(0.0);
    by_lux[lux].push_back({r.variant.plan.label(), r.curve});
    csv += format_number(lux) + "," + r.variant.plan.label() + "," + format_number(mean_exposure(r)) + "," +
           (r.ap_overall ? format_number(*r.ap_overall) : "") + "," + r.od50.to_string() + "\n";
    if (r.variant.plan.mode == ExposureMode::kCenterWeighted) {
      // 1 ms bins up to the cap; the cap itself lands in the last bin.
      const double cap_ms = r.variant.plan.cap_s * 1e3;
      const auto nbins = static_cast<std::size_t>(std::ceil(cap_ms - 1e-9));
      std::vector<std::size_t> counts(std::max<std::size_t>(1, nbins), 0);
      for (const auto& o : r.scenes) {
        if (!o.error.empty() || o.exposures_s.empty()) continue;
        const auto b = static_cast<std::size_t>(std::floor(o.exposures_s.front() * 1e3));
        ++counts[std::min(b, counts.size() - 1)];
      }
      for (std::size_t b = 0; b < counts.size(); ++b) {
        hist += format_number(lux) + "," + format_number(static_cast<double>(b)) + "," +
                format_number(std::min(cap_ms, static_cast<double>(b + 1))) + "," + std::to_string(counts[b]) + "\n";
      }
    }
  }
  fs::create_directories(cfg.output_dir);
  write_text(cfg.output_dir / "sweep_exposure.csv", csv);
  write_text(cfg.output_dir / "cw_histogram.csv", hist);
  if (cfg.artifacts.svg) {
    for (const auto& [lux, series] : by_lux) {
      write_curves_svg(series, "AP vs distance at " + lux_label(lux), cfg.output_dir / ("ap_curves_" + lux_label(lux) + ".svg"));
    }
  }
  return status_from(errors);
}

nlohmann::json EdgeCaseReport::to_json() const {
  auto rows_j = nlohmann::json::array();
  for (const auto& r : rows) {
    rows_j.push_back({{"algorithm", r.algorithm},
                      {"exposures_s", r.exposures_s},
                      {"instance_id", r.instance_id},
                      {"role", r.role},
                      {"contrast", r.detectability.contrast},
                      {"d_prime", r.detectability.d_prime},
                      {"probability", r.detectability.probability},
                      {"detected", r.detectability.detected}});
  }
  return {{"rows", rows_j}};
}

const EdgeCaseRow* EdgeCaseReport::find(const std::string& algorithm, std::uint16_t id) const {
  for (const auto& r : rows) {
    if (r.algorithm == algorithm && r.instance_id == id) return &r;
  }
  return nullptr;
}

namespace {

const char* edge_role(std::uint16_t id) {
  switch (id) {
    case kEdgeSpecularCarId: return "specular";
    case kEdgeShadowCarId: return "shadowed";
    case kEdgeControlCarId: return "control";
    default: return "other";
  }
}

std::pair<EdgeCaseReport, std::vector<std::pair<std::string, Image>>> edge_case_run(const RunConfig& cfg) {
  const Scene scene = edge_case_scene();
  const SensorSpec sensor = fit_dye_to_scene(cfg.sensor, scene);
  const IrradianceCube irr = sensor_irradiance(scene, cfg.lens);
  const Plane<double> rate = expected_rate(irr, sensor);
  const std::vector<GroundTruthBox> truths = apply_policy(project_truth(scene, sensor), cfg.policy);
  const std::int64_t image_id = 1;
  const std::uint64_t seed = capture_seed(cfg.seed, image_id);
  ProxyDetectorConfig proxy = cfg.proxy;
  proxy.seed = detector_seed(cfg.proxy, cfg.seed, -1, image_id);

  ExposurePlan cw;
  cw.mode = ExposureMode::kCenterWeighted;
  if (cfg.exposure.mode == ExposureMode::kCenterWeighted) cw = cfg.exposure;
  ExposurePlan br;
  br.mode = ExposureMode::kBracketed;
  if (cfg.exposure.mode == ExposureMode::kBracketed) br = cfg.exposure;

  EdgeCaseReport report;
  std::vector<std::pair<std::string, Image>> images;
  for (const auto& [name, plan] : {std::pair{std::string("center_weighted"), cw}, std::pair{std::string("bracketed"), br}}) {
    Rendered r = render_plan(rate, 1.0, sensor, plan, cfg.isp, seed);
    std::vector<Detectability> det;
    proxy_detect(r.image, truths, image_id, proxy, &det);
    for (std::size_t i = 0; i < truths.size(); ++i) {
      report.rows.push_back({name, r.exposures, truths[i].instance_id, edge_role(truths[i].instance_id), det[i]});
    }
    images.emplace_back(name, std::move(r.image));
  }
  return {report, images};
}

}  // namespace

EdgeCaseReport edge_case_report(const RunConfig& cfg) { return edge_case_run(cfg).first; }

CommandStatus cmd_edge_case(const RunConfig& cfg) {
  auto [report, images] = edge_case_run(cfg);
  fs::create_directories(cfg.output_dir);
  write_text(cfg.output_dir / "edge_case.json", report.to_json().dump(2) + "\n");
  std::string csv = "algorithm,exposures_s,instance_id,role,contrast,d_prime,probability,detected\n";
  for (const auto& r : report.rows) {
    std::string exps;
    for (double t : r.exposures_s) exps += (exps.empty() ? "" : ";") + format_number(t);
    csv += r.algorithm + "," + exps + "," + std::to_string(r.instance_id) + "," + r.role + "," +
           format_number(r.detectability.contrast) + "," + format_number(r.detectability.d_prime) + "," +
           format_number(r.detectability.probability) + "," + (r.detectability.detected ? "1" : "0") + "\n";
  }
  write_text(cfg.output_dir / "edge_case.csv", csv);
  for (const auto& [name, img] : images) write_ppm(img, cfg.output_dir / ("edge_" + name + ".ppm"));
  return {};
}

CommandStatus cmd_eval(const fs::path& detections, const fs::path& dataset, const fs::path& out_dir, double bin_m,
                       std::optional<double> max_distance_m) {
  const Dataset ds = read_dataset(dataset);
  std::vector<std::int64_t> ids;
  std::vector<GroundTruth> gts;
  for (const auto& img : ds.images) ids.push_back(img.id);
  for (const auto& [id, boxes] : ds.truths) {
    for (const auto& b : boxes) gts.push_back({id, b.bbox, b.distance_m});
  }
  const auto dets = import_detections(detections, ids);
  const APCurve curve = ap_vs_distance(dets, gts, bin_m, max_distance_m);
  const auto ap = average_precision(dets, gts);
  const OD50Result o = od50(curve);
  fs::create_directories(out_dir);
  write_metrics_csv(curve, out_dir / "metrics.csv");
  nlohmann::json summary{{"ap_overall", optional_number(ap)},
                         {"od50_m", od50_json(o)},
                         {"n_images", ds.images.size()},
                         {"n_gt", gts.size()},
                         {"n_detections", dets.size()}};
  write_text(out_dir / "summary.json", summary.dump(2) + "\n");
  write_curves_svg({{"detections", curve}}, "AP vs distance", out_dir / "ap_curve.svg");
  return {};
}

CommandStatus cmd_plot(const std::vector<fs::path>& csvs, const std::vector<std::string>& labels,
                       const fs::path& out_svg, const std::string& title) {
  std::vector<CurveSeries> series;
  for (std::size_t i = 0; i < csvs.size(); ++i) {
    const std::string label = i < labels.size() ? labels[i] : csvs[i].parent_path().filename().string();
    series.push_back({label.empty() ? csvs[i].stem().string() : label, read_metrics_csv(csvs[i])});
  }
  if (out_svg.has_parent_path()) fs::create_directories(out_svg.parent_path());
  write_curves_svg(series, title, out_svg);
  return {};
}

}  // namespace camsim
