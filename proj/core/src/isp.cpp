#include "camsim/isp.hpp"

#include <algorithm>
#include <cmath>

#include "camsim/error.hpp"
#include "camsim/parallel.hpp"

namespace camsim {

const char* to_string(ColorSpace cs) {
  switch (cs) {
    case ColorSpace::kSensorLinear: return "sensor-linear";
    case ColorSpace::kLinearSRGB: return "linear-sRGB";
    case ColorSpace::kSRGBEncoded: return "sRGB-encoded";
  }
  return "?";
}

void GammaSpec::validate() const {
  if (mode == GammaMode::kFixed && (!(gamma > 0.0) || gamma > 10.0)) {
    throw Error(ErrorCode::kInvalidArgument, "fixed gamma must lie in (0, 10]");
  }
  if ((mode == GammaMode::kAdaptive || mode == GammaMode::kAdaptiveMeanOfPowers) &&
      (!(target > 0.0) || !(target < 1.0))) {
    throw Error(ErrorCode::kInvalidArgument, "adaptive gamma target must lie in (0, 1)");
  }
}

Image raw_passthrough(const RawFrame& frame) {
  Image img(frame.rows(), frame.cols(), 1, ColorSpace::kSensorLinear);
  const double inv = 1.0 / frame.sensor.max_code();
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = frame.dn.data()[i] * inv;
  return img;
}

namespace {

Plane<double> normalized_mosaic(const RawFrame& frame) {
  Plane<double> m(frame.rows(), frame.cols());
  const double inv = 1.0 / frame.sensor.max_code();
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = frame.dn.data()[i] * inv;
  return m;
}

int channel_slot(Channel ch) {
  switch (ch) {
    case Channel::kR: return 0;
    case Channel::kG: return 1;
    case Channel::kB: return 2;
    default: return -1;
  }
}

}  // namespace

Image demosaic_bilinear(const Plane<double>& mosaic, Cfa cfa) {
  const std::size_t H = mosaic.rows(), W = mosaic.cols();
  Image out(H, W, 3, ColorSpace::kSensorLinear);
  if (cfa == Cfa::kRCCC) {
    throw Error(ErrorCode::kUnsupportedCfa, "no demosaic defined for RCCC; export raw instead");
  }
  if (cfa == Cfa::kMono) {
    for (std::size_t i = 0; i < H * W; ++i) {
      for (std::size_t ch = 0; ch < 3; ++ch) out.data[i * 3 + ch] = mosaic.data()[i];
    }
    return out;
  }
  parallel_for(H, [&](std::size_t r) {
    for (std::size_t c = 0; c < W; ++c) {
      const int own = channel_slot(cfa_channel(cfa, r, c));
      double sum[3] = {0, 0, 0};
      int n[3] = {0, 0, 0};
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dy == 0 && dx == 0) continue;
          const long rr = static_cast<long>(r) + dy, cc = static_cast<long>(c) + dx;
          if (rr < 0 || cc < 0 || rr >= static_cast<long>(H) || cc >= static_cast<long>(W)) continue;
          const auto ur = static_cast<std::size_t>(rr), uc = static_cast<std::size_t>(cc);
          const int slot = channel_slot(cfa_channel(cfa, ur, uc));
          sum[slot] += mosaic(ur, uc);
          ++n[slot];
        }
      }
      for (int ch = 0; ch < 3; ++ch) {
        out.at(r, c, static_cast<std::size_t>(ch)) =
            ch == own ? mosaic(r, c) : (n[ch] > 0 ? sum[ch] / n[ch] : 0.0);
      }
    }
  });
  return out;
}

Image demosaic_bilinear(const RawFrame& frame) {
  return demosaic_bilinear(normalized_mosaic(frame), frame.sensor.cfa);
}

Image color_correct(const Image& img, const Mat3& m) {
  if (img.channels != 3) throw Error(ErrorCode::kInvalidArgument, "color_correct needs a 3-channel image");
  if (std::abs(determinant(m)) < 1e-12) throw Error(ErrorCode::kSingularMatrix, "colour matrix is singular");
  Image out = img;
  out.space = ColorSpace::kLinearSRGB;
  for (std::size_t p = 0; p < img.rows * img.cols; ++p) {
    const Vec3 v{img.data[p * 3], img.data[p * 3 + 1], img.data[p * 3 + 2]};
    const Vec3 o = mul(m, v);
    for (std::size_t ch = 0; ch < 3; ++ch) out.data[p * 3 + ch] = std::clamp(o[ch], 0.0, 1.0);
  }
  return out;
}

Mat3 default_color_matrix(const SensorSpec& sensor) {
  if (sensor.cfa != Cfa::kRGGB) return identity3();
  const WavelengthGrid grid = default_grid();
  const Spectrum illum_q = d65_irradiance(grid, 1000.0);
  const Spectrum illum_e = to_energy(illum_q);
  const std::array<Spectrum, 3> qe = {sensor_qe(sensor, Channel::kR, grid), sensor_qe(sensor, Channel::kG, grid),
                                      sensor_qe(sensor, Channel::kB, grid)};
  const Mat3 to_srgb = xyz_to_linear_srgb();

  auto respond = [&](const Spectrum& rho) {
    Vec3 s{0, 0, 0};
    Vec3 xyz{0, 0, 0};
    for (std::size_t k = 0; k < grid.count; ++k) {
      for (std::size_t j = 0; j < 3; ++j) s[j] += illum_q[k] * rho[k] * qe[j][k];
      const Vec3 cmf = cmf_xyz(grid.wavelength(k));
      for (std::size_t j = 0; j < 3; ++j) xyz[j] += illum_e[k] * rho[k] * cmf[j];
    }
    return std::pair{s, mul(to_srgb, xyz)};
  };
  const auto [s_white, t_white] = respond(Spectrum::constant(grid, SpectrumUnit::kDimensionless, 1.0));

  // Normal equations for each output row, with the row-sum constraint
  // 1ᵀm = 1 handled by a Lagrange multiplier.
  Mat3 A{};
  Mat3 B{};  // B[i] = Σ s · t_i
  for (const auto& patch : reference_patches(grid)) {
    auto [s, t] = respond(patch);
    for (std::size_t j = 0; j < 3; ++j) {
      s[j] /= s_white[j];
      t[j] /= t_white[j];
    }
    for (std::size_t a = 0; a < 3; ++a) {
      for (std::size_t b = 0; b < 3; ++b) A[a][b] += s[a] * s[b];
      for (std::size_t i = 0; i < 3; ++i) B[i][a] += s[a] * t[i];
    }
  }
  const Mat3 Ainv = inverse(A);
  const Vec3 a1 = mul(Ainv, Vec3{1, 1, 1});
  const double denom = a1[0] + a1[1] + a1[2];
  Mat3 M{};
  for (std::size_t i = 0; i < 3; ++i) {
    const Vec3 m = mul(Ainv, B[i]);
    const double lambda = (1.0 - (m[0] + m[1] + m[2])) / denom;
    for (std::size_t j = 0; j < 3; ++j) M[i][j] = m[j] + lambda * a1[j];
  }
  // Fold in white balance so raw values can be fed directly.
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) M[i][j] *= s_white[1] / s_white[j];
  }
  return M;
}

namespace {

double image_mean(const Image& img) {
  if (img.data.empty()) return 0.0;
  double s = 0.0;
  for (double v : img.data) s += v;
  return s / static_cast<double>(img.data.size());
}

double mean_of_powers(const Image& img, double g) {
  double s = 0.0;
  for (double v : img.data) s += v > 0.0 ? std::pow(v, g) : 0.0;
  return s / static_cast<double>(img.data.size());
}

}  // namespace

std::optional<double> adaptive_gamma(const Image& img, const GammaSpec& spec) {
  const double m = image_mean(img);
  if (!(m > 0.0) || !(m < 1.0)) return std::nullopt;
  if (spec.mode == GammaMode::kAdaptiveMeanOfPowers) {
    // mean(v^γ) is non-increasing in γ on [0,1]-valued data.
    double lo = 1e-6, hi = 10.0;
    if (mean_of_powers(img, lo) < spec.target || mean_of_powers(img, hi) > spec.target) return std::nullopt;
    for (int i = 0; i < 200 && hi - lo > 1e-13; ++i) {
      const double mid = 0.5 * (lo + hi);
      (mean_of_powers(img, mid) > spec.target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }
  return std::log(spec.target) / std::log(m);
}

double srgb_encode(double v) {
  v = std::clamp(v, 0.0, 1.0);
  return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

double srgb_decode(double v) {
  v = std::clamp(v, 0.0, 1.0);
  return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

Image apply_gamma(const Image& img, const GammaSpec& spec, GammaInfo* info) {
  spec.validate();
  GammaInfo local;
  Image out = img;
  out.space = ColorSpace::kSRGBEncoded;
  auto power = [&](double g) {
    for (auto& v : out.data) v = v > 0.0 ? std::pow(std::min(v, 1.0), g) : 0.0;
  };
  switch (spec.mode) {
    case GammaMode::kNone:
      break;
    case GammaMode::kFixed:
      local.gamma = spec.gamma;
      power(spec.gamma);
      break;
    case GammaMode::kAdaptive:
    case GammaMode::kAdaptiveMeanOfPowers: {
      const auto g = adaptive_gamma(img, spec);
      if (g) {
        local.gamma = *g;
      } else {
        local.warnings.push_back("adaptive gamma: image mean outside (0,1); using gamma = 1");
      }
      power(local.gamma);
      break;
    }
    case GammaMode::kSRGBStandard:
      for (auto& v : out.data) v = srgb_encode(v);
      break;
  }
  if (info) *info = std::move(local);
  return out;
}

bool PipelineConfig::raw() const { return stages.size() == 1 && stages[0] == "raw"; }

void PipelineConfig::validate() const {
  if (stages.empty()) throw Error(ErrorCode::kConfig, "pipeline needs at least one stage");
  for (const auto& s : stages) {
    if (s != "raw" && s != "demosaic" && s != "color" && s != "gamma") {
      throw Error(ErrorCode::kConfig, "unknown pipeline stage '" + s + "'");
    }
  }
  if (std::find(stages.begin(), stages.end(), "raw") != stages.end() && !raw()) {
    throw Error(ErrorCode::kConfig, "'raw' must be the only pipeline stage");
  }
  if (!raw() && stages[0] != "demosaic") throw Error(ErrorCode::kConfig, "pipeline must start with 'demosaic' or be 'raw'");
  gamma.validate();
  if (!(hdr_percentile > 0.0) || hdr_percentile > 1.0) {
    throw Error(ErrorCode::kConfig, "hdr_percentile must lie in (0, 1]");
  }
}

namespace {

Image run_stages(const Plane<double>& mosaic, const SensorSpec& sensor, const PipelineConfig& cfg,
                 GammaInfo* info) {
  cfg.validate();
  if (cfg.raw()) {
    Image img(mosaic.rows(), mosaic.cols(), 1, ColorSpace::kSensorLinear);
    for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = std::clamp(mosaic.data()[i], 0.0, 1.0);
    return img;
  }
  Image img = demosaic_bilinear(mosaic, sensor.cfa);
  for (std::size_t i = 1; i < cfg.stages.size(); ++i) {
    if (cfg.stages[i] == "color") {
      img = color_correct(img, cfg.color_matrix ? *cfg.color_matrix : default_color_matrix(sensor));
    } else if (cfg.stages[i] == "gamma") {
      img = apply_gamma(img, cfg.gamma, info);
    }
  }
  for (auto& v : img.data) v = std::isfinite(v) ? std::clamp(v, 0.0, 1.0) : 0.0;
  return img;
}

}  // namespace

Image render(const RawFrame& frame, const PipelineConfig& cfg, GammaInfo* info) {
  Plane<double> mosaic(frame.rows(), frame.cols());
  const double inv = 1.0 / frame.sensor.max_code();
  for (std::size_t i = 0; i < mosaic.size(); ++i) mosaic.data()[i] = frame.dn.data()[i] * inv;
  return run_stages(mosaic, frame.sensor, cfg, info);
}

Image render(const HDRFrame& frame, const PipelineConfig& cfg, GammaInfo* info) {
  std::vector<double> sorted = frame.rate.data();
  double scale = 0.0;
  if (!sorted.empty()) {
    auto idx = static_cast<std::size_t>(std::ceil(cfg.hdr_percentile * static_cast<double>(sorted.size())));
    idx = std::clamp<std::size_t>(idx, 1, sorted.size()) - 1;
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(idx), sorted.end());
    scale = sorted[idx];
  }
  Plane<double> mosaic(frame.rows(), frame.cols());
  if (scale > 0.0) {
    for (std::size_t i = 0; i < mosaic.size(); ++i) {
      mosaic.data()[i] = std::clamp(frame.rate.data()[i] / scale, 0.0, 1.0);
    }
  }
  return run_stages(mosaic, frame.sensor, cfg, info);
}

void to_json(nlohmann::json& j, const GammaSpec& g) {
  switch (g.mode) {
    case GammaMode::kFixed: j = {{"mode", "fixed"}, {"gamma", g.gamma}}; break;
    case GammaMode::kAdaptive: j = {{"mode", "adaptive"}, {"target", g.target}}; break;
    case GammaMode::kAdaptiveMeanOfPowers: j = {{"mode", "adaptive_mean_of_powers"}, {"target", g.target}}; break;
    case GammaMode::kSRGBStandard: j = {{"mode", "srgb"}}; break;
    case GammaMode::kNone: j = {{"mode", "none"}}; break;
  }
}

void from_json(const nlohmann::json& j, GammaSpec& g) {
  g = GammaSpec{};
  const auto mode = j.value("mode", std::string("adaptive"));
  if (mode == "fixed") {
    g.mode = GammaMode::kFixed;
  } else if (mode == "adaptive") {
    g.mode = GammaMode::kAdaptive;
  } else if (mode == "adaptive_mean_of_powers") {
    g.mode = GammaMode::kAdaptiveMeanOfPowers;
  } else if (mode == "srgb") {
    g.mode = GammaMode::kSRGBStandard;
  } else if (mode == "none") {
    g.mode = GammaMode::kNone;
  } else {
    throw Error(ErrorCode::kConfig, "unknown gamma mode '" + mode + "'");
  }
  g.gamma = j.value("gamma", g.gamma);
  g.target = j.value("target", g.target);
  g.validate();
}

void to_json(nlohmann::json& j, const PipelineConfig& p) {
  j = {{"stages", p.stages}, {"gamma", p.gamma}, {"hdr_percentile", p.hdr_percentile}};
  if (p.color_matrix) j["color_matrix"] = *p.color_matrix;
}

void from_json(const nlohmann::json& j, PipelineConfig& p) {
  p = PipelineConfig{};
  p.stages = j.value("stages", p.stages);
  if (j.contains("gamma")) p.gamma = j.at("gamma").get<GammaSpec>();
  if (j.contains("color_matrix")) p.color_matrix = j.at("color_matrix").get<Mat3>();
  p.hdr_percentile = j.value("hdr_percentile", p.hdr_percentile);
  p.validate();
}

}  // namespace camsim
