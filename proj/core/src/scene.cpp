#include "camsim/scene.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <set>

#include "camsim/colorimetry.hpp"
#include "camsim/error.hpp"
#include "camsim/rng.hpp"

namespace camsim {

namespace fs = std::filesystem;

Spectrum SpectralCube::mean_spectrum() const {
  std::vector<double> acc(bands(), 0.0);
  const std::size_t n = rows_ * cols_;
  for (std::size_t p = 0; p < n; ++p) {
    const float* px = data_.data() + p * bands();
    for (std::size_t k = 0; k < bands(); ++k) acc[k] += px[k];
  }
  if (n > 0) {
    for (auto& v : acc) v /= static_cast<double>(n);
  }
  return Spectrum(grid_, unit_, std::move(acc));
}

void Scene::validate() const {
  if (depth.rows() != instances.rows() || depth.cols() != instances.cols() || depth.rows() != rows() || depth.cols() != cols()) {
    throw Error(ErrorCode::kValidation, "scene rasters do not share H×W");
  }
  for (float d : depth.data()) {
    if (!(d > 0.0f)) throw Error(ErrorCode::kValidation, "scene depth must be > 0");
  }
  for (auto id : instances.data()) {
    if (id != 0 && !classes.contains(id)) {
      throw Error(ErrorCode::kValidation,
                  "instance id " + std::to_string(id) + " has no class entry");
    }
  }
}

double projected_size_px(double size_m, double focal_length_mm, double distance_m,
                         double pitch_um) {
  return size_m * (focal_length_mm * 1e-3) / (distance_m * pitch_um * 1e-6);
}

namespace {

struct PixelRect {
  long x0, y0, x1, y1;  // half-open
  bool contains(long x, long y) const { return x >= x0 && x < x1 && y >= y0 && y < y1; }
  bool overlaps(const PixelRect& o, long margin) const {
    return x0 - margin < o.x1 && o.x0 < x1 + margin && y0 - margin < o.y1 && o.y0 < y1 + margin;
  }
};

PixelRect to_pixels(const FracRect& r, std::size_t w, std::size_t h) {
  auto px = [](double f, std::size_t n) {
    return std::clamp(std::lround(f * static_cast<double>(n)), 0L, static_cast<long>(n));
  };
  return {px(r.x0, w), px(r.y0, h), px(r.x1, w), px(r.y1, h)};
}

void check_spec(const SceneSpec& spec) {
  if (spec.width == 0 || spec.height == 0) {
    throw Error(ErrorCode::kInvalidArgument, "scene width and height must be positive");
  }
  if (!(spec.grid_pitch_um > 0.0) || !(spec.focal_length_mm > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "grid pitch and focal length must be positive");
  }
  if (spec.targets.size() >= 65535) {
    throw Error(ErrorCode::kInvalidArgument, "too many targets for a u16 instance map");
  }
  for (const auto& t : spec.targets) {
    if (!(t.distance_m > 0.0) || t.distance_m > 300.0) {
      throw Error(ErrorCode::kInvalidArgument, "target distance must lie in (0, 300] m");
    }
    if (!(t.width_m > 0.0) || !(t.height_m > 0.0) || t.albedo < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "target size must be positive, albedo >= 0");
    }
  }
  for (const auto& s : spec.shadows) {
    if (!(s.attenuation > 0.0) || s.attenuation > 1.0) {
      throw Error(ErrorCode::kInvalidArgument, "shadow attenuation must lie in (0, 1]");
    }
  }
  for (const auto& s : spec.speculars) {
    if (!(s.gain >= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "specular gain must be >= 1");
    }
  }
  if (spec.texture.amplitude < 0.0 || spec.texture.amplitude > 1.0 || spec.texture.cell_px == 0) {
    throw Error(ErrorCode::kInvalidArgument, "texture amplitude must lie in [0,1], cell_px > 0");
  }
}

Spectrum illuminant_photons(const SceneSpec& spec) {
  if (!spec.illuminant) return d65_irradiance(spec.grid, spec.illuminant_lux);
  Spectrum s = to_photons(resample(*spec.illuminant, spec.grid));
  if (s.unit() != SpectrumUnit::kPhotonIrradiance) {
    throw Error(ErrorCode::kWrongUnit, "scene illuminant must be an irradiance spectrum");
  }
  return s;
}

std::vector<float> lambertian(const Spectrum& illum, const Spectrum& reflectance, double albedo) {
  std::vector<float> out(illum.size());
  const Spectrum rho = resample(reflectance, illum.grid());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double r = std::min(1.0, rho[k] * albedo);
    out[k] = static_cast<float>(illum[k] * r / std::numbers::pi);
  }
  return out;
}

}  // namespace

Scene synthesize(const SceneSpec& spec) {
  check_spec(spec);
  const std::size_t W = spec.width, H = spec.height;
  const Spectrum illum = illuminant_photons(spec);
  const Spectrum bg_rho =
      spec.background ? *spec.background
                      : Spectrum::constant(spec.grid, SpectrumUnit::kDimensionless, 0.2);

  Scene scene;
  scene.radiance = SpectralCube(H, W, spec.grid, SpectrumUnit::kPhotonRadiance, spec.grid_pitch_um);
  scene.depth = Plane<float>(H, W, kBackgroundDepthM);
  scene.instances = Plane<std::uint16_t>(H, W, 0);
  scene.meta.description = spec.description;
  scene.meta.seed = spec.seed;
  scene.meta.group = spec.group;
  scene.spec_echo = spec;

  // Footprints and placement.
  struct Placed {
    std::uint16_t id;
    PixelRect rect;
    double distance;
    std::vector<float> radiance;
  };
  std::vector<Placed> placed;
  for (std::size_t i = 0; i < spec.targets.size(); ++i) {
    const auto& t = spec.targets[i];
    const auto id = static_cast<std::uint16_t>(i + 1);
    const double wf = projected_size_px(t.width_m, spec.focal_length_mm, t.distance_m, spec.grid_pitch_um);
    const double hf = projected_size_px(t.height_m, spec.focal_length_mm, t.distance_m, spec.grid_pitch_um);
    if (wf < 1.0 || hf < 1.0) {
      scene.meta.warnings.push_back("target " + std::to_string(id) + " projects below 1 px; dropped");
      continue;
    }
    const long w = std::max(1L, std::lround(wf));
    const long h = std::max(1L, std::lround(hf));
    if (w > static_cast<long>(W) || h > static_cast<long>(H)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "target " + std::to_string(id) + " footprint exceeds the scene raster");
    }
    PixelRect rect{};
    auto at_center = [&](double cx, double cy) {
      const long x0 = std::lround(cx * static_cast<double>(W) - static_cast<double>(w) / 2.0);
      const long y0 = std::lround(cy * static_cast<double>(H) - static_cast<double>(h) / 2.0);
      return PixelRect{x0, y0, x0 + w, y0 + h};
    };
    if (t.center_x && t.center_y) {
      rect = at_center(*t.center_x, *t.center_y);
      if (rect.x0 < 0 || rect.y0 < 0 || rect.x1 > static_cast<long>(W) || rect.y1 > static_cast<long>(H)) {
        throw Error(ErrorCode::kInvalidArgument,
                    "target " + std::to_string(id) + " footprint falls outside the scene raster");
      }
    } else {
      CounterRng rng{spec.seed, 0x504C414345ull, i};
      const long margin = std::max(w, h) / 4;
      bool ok = false;
      for (int attempt = 0; attempt < 200 && !ok; ++attempt) {
        const long x0 = static_cast<long>(rng.uniform() * static_cast<double>(W - static_cast<std::size_t>(w) + 1));
        const long y0 = static_cast<long>(rng.uniform() * static_cast<double>(H - static_cast<std::size_t>(h) + 1));
        rect = {x0, y0, x0 + w, y0 + h};
        ok = std::none_of(placed.begin(), placed.end(),
                          [&](const Placed& p) { return rect.overlaps(p.rect, margin); });
      }
      if (!ok) {
        scene.meta.warnings.push_back("target " + std::to_string(id) + " overlaps another target");
      }
    }
    const Spectrum rho = t.reflectance ? *t.reflectance
                                       : Spectrum::constant(spec.grid, SpectrumUnit::kDimensionless, 0.4);
    placed.push_back({id, rect, t.distance_m, lambertian(illum, rho, t.albedo)});
    scene.classes[id] = t.cls;
  }

  // Nearer targets paint over farther ones.
  std::stable_sort(placed.begin(), placed.end(),
                   [](const Placed& a, const Placed& b) { return a.distance > b.distance; });
  for (const auto& p : placed) {
    for (long y = p.rect.y0; y < p.rect.y1; ++y) {
      for (long x = p.rect.x0; x < p.rect.x1; ++x) {
        scene.instances(y, x) = p.id;
        scene.depth(y, x) = static_cast<float>(p.distance);
      }
    }
  }
  std::vector<const std::vector<float>*> by_id(spec.targets.size() + 1, nullptr);
  for (const auto& p : placed) by_id[p.id] = &p.radiance;

  const std::vector<float> bg = lambertian(illum, bg_rho, 1.0);
  std::vector<PixelRect> shadow_px, spec_px;
  for (const auto& s : spec.shadows) shadow_px.push_back(to_pixels(s.rect, W, H));
  for (const auto& s : spec.speculars) spec_px.push_back(to_pixels(s.rect, W, H));

  const std::size_t nb = spec.grid.count;
  for (std::size_t y = 0; y < H; ++y) {
    for (std::size_t x = 0; x < W; ++x) {
      const auto id = scene.instances(y, x);
      double factor = 1.0;
      const std::vector<float>* base = &bg;
      if (id != 0) {
        base = by_id[id];
      } else if (spec.texture.amplitude > 0.0) {
        CounterRng rng{spec.seed, 0x54455854ull, y / spec.texture.cell_px, x / spec.texture.cell_px};
        factor *= 1.0 + spec.texture.amplitude * (2.0 * rng.uniform() - 1.0);
      }
      const auto lx = static_cast<long>(x), ly = static_cast<long>(y);
      for (std::size_t k = 0; k < shadow_px.size(); ++k) {
        if (shadow_px[k].contains(lx, ly)) factor *= spec.shadows[k].attenuation;
      }
      for (std::size_t k = 0; k < spec_px.size(); ++k) {
        if (spec_px[k].contains(lx, ly)) factor *= spec.speculars[k].gain;
      }
      auto px = scene.radiance.pixel(y, x);
      for (std::size_t k = 0; k < nb; ++k) px[k] = static_cast<float>((*base)[k] * factor);
    }
  }

  const SceneMeta stats = scene_statistics(scene);
  scene.meta.mean_luminance = stats.mean_luminance;
  scene.meta.dynamic_range_log10 = stats.dynamic_range_log10;
  return scene;
}

Scene edge_case_scene() {
  SceneSpec spec;
  spec.width = 1280;
  spec.height = 720;
  spec.grid_pitch_um = 0.75;
  spec.focal_length_mm = 6.0;
  spec.grid = default_grid();
  spec.illuminant_lux = 20000.0;
  spec.background = Spectrum::constant(spec.grid, SpectrumUnit::kDimensionless, 0.25);
  spec.texture = {0.1, 32};
  spec.seed = 8;
  spec.description = "edge case: specular car in the metering window, dark car in shadow";

  TargetSpec white;
  white.distance_m = 40.0;
  white.reflectance = Spectrum::constant(spec.grid, SpectrumUnit::kDimensionless, 0.8);
  white.center_x = 0.5;
  white.center_y = 0.5;

  // Dark red car: low reflectance that rises towards long wavelengths.
  std::vector<double> red(spec.grid.count);
  for (std::size_t k = 0; k < red.size(); ++k) {
    const double l = spec.grid.wavelength(k);
    red[k] = 0.03 + 0.09 / (1.0 + std::exp(-(l - 590.0) / 15.0));
  }
  TargetSpec shadowed;
  shadowed.distance_m = 60.0;
  shadowed.reflectance = Spectrum(spec.grid, SpectrumUnit::kDimensionless, red);
  shadowed.center_x = 1100.0 / 1280.0;
  shadowed.center_y = 480.0 / 720.0;

  TargetSpec control;
  control.distance_m = 40.0;
  control.reflectance = Spectrum::constant(spec.grid, SpectrumUnit::kDimensionless, 0.4);
  control.center_x = 250.0 / 1280.0;
  control.center_y = 450.0 / 720.0;

  spec.targets = {white, shadowed, control};
  spec.shadows = {{{900.0 / 1280.0, 250.0 / 720.0, 1.0, 1.0}, 0.05}};
  // Covers the central 1% metering window (10% of each side) with margin.
  spec.speculars = {{{0.4375, 0.4375, 0.5625, 0.5625}, 30.0}};
  return synthesize(spec);
}

Plane<double> luminance_map(const Scene& scene) {
  const auto w = photon_luminous_weights(scene.radiance.grid());
  Plane<double> lum(scene.rows(), scene.cols());
  for (std::size_t r = 0; r < scene.rows(); ++r) {
    for (std::size_t c = 0; c < scene.cols(); ++c) {
      auto px = scene.radiance.pixel(r, c);
      double s = 0.0;
      for (std::size_t k = 0; k < px.size(); ++k) s += w[k] * px[k];
      lum(r, c) = s;
    }
  }
  return lum;
}

SceneMeta scene_statistics(const Scene& scene) {
  SceneMeta meta = scene.meta;
  std::vector<double> lum = luminance_map(scene).data();
  if (lum.empty()) {
    meta.mean_luminance = 0.0;
    meta.dynamic_range_log10 = 0.0;
    return meta;
  }
  double sum = 0.0;
  for (double v : lum) sum += v;
  meta.mean_luminance = sum / static_cast<double>(lum.size());

  // Nearest-rank percentiles.
  auto rank = [&](double q) {
    const auto n = lum.size();
    auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n)));
    idx = std::clamp<std::size_t>(idx, 1, n) - 1;
    std::nth_element(lum.begin(), lum.begin() + static_cast<long>(idx), lum.end());
    return lum[idx];
  };
  const double hi = rank(0.999);
  const double lo = rank(0.001);
  if (hi <= 0.0) {
    meta.dynamic_range_log10 = 0.0;
  } else {
    meta.dynamic_range_log10 = std::log10(hi / std::max(lo, hi * 1e-12));
  }
  return meta;
}

// ---------------------------------------------------------------------------
// Scene directory I/O

namespace {

constexpr char kSicMagic[4] = {'S', 'I', 'C', '1'};

template <typename T>
void put_le(std::vector<char>& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  auto bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xFF));
  }
}

template <typename T>
T get_le(const char* p) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t,
                               std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint16_t>>;
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bits |= static_cast<U>(static_cast<unsigned char>(p[i])) << (8 * i);
  }
  return std::bit_cast<T>(bits);
}

void write_file(const fs::path& path, const std::vector<char>& bytes) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw Error(ErrorCode::kIo, "short write to " + path.string());
}

std::vector<char> read_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

}  // namespace

void save_scene(const Scene& scene, const fs::path& dir) {
  fs::create_directories(dir);
  const auto& cube = scene.radiance;
  std::vector<char> sic(kSicMagic, kSicMagic + 4);
  sic.reserve(28 + cube.data().size() * 4);
  put_le<std::uint32_t>(sic, static_cast<std::uint32_t>(cube.rows()));
  put_le<std::uint32_t>(sic, static_cast<std::uint32_t>(cube.cols()));
  put_le<std::uint32_t>(sic, static_cast<std::uint32_t>(cube.bands()));
  put_le<double>(sic, cube.grid().start_nm);
  put_le<double>(sic, cube.grid().step_nm);
  for (float v : cube.data()) put_le<float>(sic, v);
  write_file(dir / "radiance.sic", sic);

  std::vector<char> depth;
  depth.reserve(scene.depth.size() * 4);
  for (float v : scene.depth.data()) put_le<float>(depth, v);
  write_file(dir / "depth.f32", depth);

  std::vector<char> inst;
  inst.reserve(scene.instances.size() * 2);
  for (auto v : scene.instances.data()) put_le<std::uint16_t>(inst, v);
  write_file(dir / "instance.u16", inst);

  nlohmann::json classes = nlohmann::json::object();
  for (const auto& [id, name] : scene.classes) classes[std::to_string(id)] = name;
  nlohmann::json meta{
      {"classes", classes},
      {"pitch_um", cube.pitch_um()},
      {"mean_luminance", scene.meta.mean_luminance},
      {"dynamic_range_log10", scene.meta.dynamic_range_log10},
      {"description", scene.meta.description},
      {"seed", scene.meta.seed},
      {"group", scene.meta.group},
      {"warnings", scene.meta.warnings},
      {"spec", scene.spec_echo},
  };
  std::ofstream f(dir / "meta.json");
  if (!f) throw Error(ErrorCode::kIo, "cannot write meta.json in " + dir.string());
  f << meta.dump(2) << '\n';
}

Scene load_scene(const fs::path& dir) {
  const auto sic = read_file(dir / "radiance.sic");
  if (sic.size() < 4 || std::memcmp(sic.data(), kSicMagic, 4) != 0) {
    throw Error(ErrorCode::kBadMagic, "bad magic in " + (dir / "radiance.sic").string());
  }
  constexpr std::size_t kHeader = 4 + 3 * 4 + 2 * 8;
  if (sic.size() < kHeader) {
    throw Error(ErrorCode::kTruncatedPayload, "truncated payload: header incomplete");
  }
  const auto rows = get_le<std::uint32_t>(sic.data() + 4);
  const auto cols = get_le<std::uint32_t>(sic.data() + 8);
  const auto bands = get_le<std::uint32_t>(sic.data() + 12);
  const auto start = get_le<double>(sic.data() + 16);
  const auto step = get_le<double>(sic.data() + 24);
  const std::size_t expected = std::size_t{rows} * cols * bands;
  const std::size_t have = (sic.size() - kHeader) / 4;
  if (have < expected || (sic.size() - kHeader) % 4 != 0) {
    throw Error(ErrorCode::kTruncatedPayload,
                "truncated payload: header says " + std::to_string(expected) + " floats, found " +
                    std::to_string(have));
  }
  if (have > expected) {
    throw Error(ErrorCode::kDimensionMismatch, "radiance payload longer than header dimensions");
  }

  std::ifstream mf(dir / "meta.json");
  if (!mf) throw Error(ErrorCode::kIo, "missing meta.json in " + dir.string());
  nlohmann::json meta;
  try {
    mf >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("unreadable meta.json: ") + e.what());
  }

  Scene scene;
  scene.radiance = SpectralCube(rows, cols, WavelengthGrid(start, step, bands),
                                SpectrumUnit::kPhotonRadiance, meta.value("pitch_um", 1.0));
  auto& data = scene.radiance.data();
  for (std::size_t i = 0; i < expected; ++i) data[i] = get_le<float>(sic.data() + kHeader + 4 * i);

  const auto depth = read_file(dir / "depth.f32");
  const auto inst = read_file(dir / "instance.u16");
  const std::size_t npx = std::size_t{rows} * cols;
  if (depth.size() != npx * 4 || inst.size() != npx * 2) {
    throw Error(ErrorCode::kDimensionMismatch,
                "depth/instance rasters do not match radiance dimensions " + std::to_string(rows) +
                    "x" + std::to_string(cols));
  }
  scene.depth = Plane<float>(rows, cols);
  scene.instances = Plane<std::uint16_t>(rows, cols);
  for (std::size_t i = 0; i < npx; ++i) {
    scene.depth.data()[i] = get_le<float>(depth.data() + 4 * i);
    scene.instances.data()[i] = get_le<std::uint16_t>(inst.data() + 2 * i);
  }

  const nlohmann::json classes = meta.value("classes", nlohmann::json::object());
  for (const auto& [k, v] : classes.items()) {
    scene.classes[static_cast<std::uint16_t>(std::stoul(k))] = v.get<std::string>();
  }
  scene.meta.mean_luminance = meta.value("mean_luminance", 0.0);
  scene.meta.dynamic_range_log10 = meta.value("dynamic_range_log10", 0.0);
  scene.meta.description = meta.value("description", std::string{});
  scene.meta.seed = meta.value("seed", std::uint64_t{0});
  scene.meta.group = meta.value("group", -1);
  scene.meta.warnings = meta.value("warnings", std::vector<std::string>{});
  scene.spec_echo = meta.value("spec", nlohmann::json{});
  scene.validate();
  return scene;
}

// ---------------------------------------------------------------------------
// SceneSpec JSON

namespace {

void to_json(nlohmann::json& j, const FracRect& r) { j = {r.x0, r.y0, r.x1, r.y1}; }

void from_json(const nlohmann::json& j, FracRect& r) {
  if (!j.is_array() || j.size() != 4) {
    throw Error(ErrorCode::kConfig, "rect must be [x0, y0, x1, y1] in scene fractions");
  }
  r = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

}  // namespace

void to_json(nlohmann::json& j, const SceneSpec& s) {
  j = nlohmann::json{{"width", s.width},
                     {"height", s.height},
                     {"grid_pitch_um", s.grid_pitch_um},
                     {"focal_length_mm", s.focal_length_mm},
                     {"grid", s.grid},
                     {"illuminant_lux", s.illuminant_lux},
                     {"texture", {{"amplitude", s.texture.amplitude}, {"cell_px", s.texture.cell_px}}},
                     {"seed", s.seed},
                     {"group", s.group},
                     {"description", s.description}};
  if (s.illuminant) j["illuminant"] = *s.illuminant;
  if (s.background) j["background"] = *s.background;
  auto targets = nlohmann::json::array();
  for (const auto& t : s.targets) {
    nlohmann::json tj{{"class", t.cls},
                      {"distance_m", t.distance_m},
                      {"width_m", t.width_m},
                      {"height_m", t.height_m},
                      {"albedo", t.albedo}};
    if (t.reflectance) tj["reflectance"] = *t.reflectance;
    if (t.center_x) tj["center_x"] = *t.center_x;
    if (t.center_y) tj["center_y"] = *t.center_y;
    targets.push_back(std::move(tj));
  }
  j["targets"] = std::move(targets);
  auto shadows = nlohmann::json::array();
  for (const auto& sh : s.shadows) {
    nlohmann::json rect;
    to_json(rect, sh.rect);
    shadows.push_back({{"rect", rect}, {"attenuation", sh.attenuation}});
  }
  j["shadows"] = std::move(shadows);
  auto speculars = nlohmann::json::array();
  for (const auto& sp : s.speculars) {
    nlohmann::json rect;
    to_json(rect, sp.rect);
    speculars.push_back({{"rect", rect}, {"gain", sp.gain}});
  }
  j["speculars"] = std::move(speculars);
}

void from_json(const nlohmann::json& j, SceneSpec& s) {
  s = SceneSpec{};
  s.width = j.value("width", s.width);
  s.height = j.value("height", s.height);
  s.grid_pitch_um = j.value("grid_pitch_um", s.grid_pitch_um);
  s.focal_length_mm = j.value("focal_length_mm", s.focal_length_mm);
  if (j.contains("grid")) s.grid = j.at("grid").get<WavelengthGrid>();
  s.illuminant_lux = j.value("illuminant_lux", s.illuminant_lux);
  if (j.contains("illuminant")) s.illuminant = j.at("illuminant").get<Spectrum>();
  if (j.contains("background")) {
    const auto& b = j.at("background");
    s.background = b.is_number() ? Spectrum::constant(s.grid, SpectrumUnit::kDimensionless, b.get<double>())
                                 : b.get<Spectrum>();
  }
  if (j.contains("texture")) {
    s.texture.amplitude = j["texture"].value("amplitude", 0.0);
    s.texture.cell_px = j["texture"].value("cell_px", std::size_t{32});
  }
  s.seed = j.value("seed", std::uint64_t{0});
  s.group = j.value("group", -1);
  s.description = j.value("description", std::string{});
  for (const auto& tj : j.value("targets", nlohmann::json::array())) {
    TargetSpec t;
    t.cls = tj.value("class", t.cls);
    t.distance_m = tj.at("distance_m").get<double>();
    t.width_m = tj.value("width_m", t.width_m);
    t.height_m = tj.value("height_m", t.height_m);
    t.albedo = tj.value("albedo", t.albedo);
    if (tj.contains("reflectance")) {
      const auto& r = tj.at("reflectance");
      t.reflectance = r.is_number()
                          ? Spectrum::constant(s.grid, SpectrumUnit::kDimensionless, r.get<double>())
                          : r.get<Spectrum>();
    }
    if (tj.contains("center_x")) t.center_x = tj.at("center_x").get<double>();
    if (tj.contains("center_y")) t.center_y = tj.at("center_y").get<double>();
    s.targets.push_back(std::move(t));
  }
  for (const auto& sj : j.value("shadows", nlohmann::json::array())) {
    ShadowRegion r;
    from_json(sj.at("rect"), r.rect);
    r.attenuation = sj.at("attenuation").get<double>();
    s.shadows.push_back(r);
  }
  for (const auto& sj : j.value("speculars", nlohmann::json::array())) {
    SpecularPatch p;
    from_json(sj.at("rect"), p.rect);
    p.gain = sj.at("gain").get<double>();
    s.speculars.push_back(p);
  }
}

}  // namespace camsim
