#include "camsim/sensor.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <random>

#include "camsim/error.hpp"
#include "camsim/parallel.hpp"
#include "camsim/rng.hpp"

namespace camsim {

namespace fs = std::filesystem;

const char* to_string(Cfa cfa) {
  switch (cfa) {
    case Cfa::kRGGB: return "RGGB";
    case Cfa::kMono: return "MONO";
    case Cfa::kRCCC: return "RCCC";
  }
  return "?";
}

Cfa cfa_from_string(const std::string& s) {
  if (s == "RGGB") return Cfa::kRGGB;
  if (s == "MONO") return Cfa::kMono;
  if (s == "RCCC") return Cfa::kRCCC;
  throw Error(ErrorCode::kUnsupportedCfa, "unsupported CFA '" + s + "'");
}

const char* to_string(Channel ch) {
  switch (ch) {
    case Channel::kR: return "R";
    case Channel::kG: return "G";
    case Channel::kB: return "B";
    case Channel::kC: return "C";
    case Channel::kM: return "M";
  }
  return "?";
}

Channel channel_from_string(const std::string& s) {
  if (s == "R") return Channel::kR;
  if (s == "G") return Channel::kG;
  if (s == "B") return Channel::kB;
  if (s == "C") return Channel::kC;
  if (s == "M") return Channel::kM;
  throw Error(ErrorCode::kConfig, "unknown channel tag '" + s + "'");
}

Channel cfa_channel(Cfa cfa, std::size_t row, std::size_t col) noexcept {
  switch (cfa) {
    case Cfa::kMono:
      return Channel::kM;
    case Cfa::kRCCC:
      return (row % 2 == 0 && col % 2 == 0) ? Channel::kR : Channel::kC;
    case Cfa::kRGGB:
      break;
  }
  if (row % 2 == 0) return col % 2 == 0 ? Channel::kR : Channel::kG;
  return col % 2 == 0 ? Channel::kG : Channel::kB;
}

void SensorSpec::validate() const {
  if (pixel.size_um < 1.0 - 1e-12 || pixel.size_um > 10.0 + 1e-12) {
    throw Error(ErrorCode::kInvalidArgument, "pixel size must lie in [1, 10] um");
  }
  if (!(pixel.well_capacity_e > pixel.read_noise_e) || pixel.read_noise_e < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "need well_capacity_e > read_noise_e >= 0");
  }
  if (pixel.dark_current_e_per_s < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "dark current must be >= 0");
  }
  if (!(pixel.fill_factor > 0.0) || pixel.fill_factor > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "fill factor must lie in (0, 1]");
  }
  if (!(pixel.voltage_swing_V > 0.0) || pixel.conversion_gain_uV_per_e < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "voltage swing must be positive");
  }
  if (adc_bits < 1 || adc_bits > 16) {
    throw Error(ErrorCode::kInvalidArgument, "adc_bits must lie in [1, 16]");
  }
  if (!(analog_gain > 0.0) || prnu_sigma < 0.0 || dsnu_e < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "analog gain must be positive, PRNU/DSNU >= 0");
  }
  const Geometry g = derive_geometry(pixel.size_um, *this);
  if (g.rows < 16 || g.cols < 16) {
    throw Error(ErrorCode::kInvalidArgument,
                "sensor must have at least 16x16 pixels, got " + std::to_string(g.cols) + "x" +
                    std::to_string(g.rows));
  }
}

double SensorSpec::conversion_gain_uV_per_e() const {
  if (pixel.conversion_gain_uV_per_e > 0.0) return pixel.conversion_gain_uV_per_e;
  return pixel.voltage_swing_V * 1e6 / pixel.well_capacity_e;
}

double SensorSpec::electrons_per_dn() const {
  return pixel.voltage_swing_V * 1e6 /
         (conversion_gain_uV_per_e() * analog_gain * static_cast<double>(max_code()));
}

SensorSpec SensorSpec::with_pixel_size(double p_um) const {
  SensorSpec s = *this;
  if (scale_well_with_area) {
    const double r = p_um / pixel.size_um;
    s.pixel.well_capacity_e *= r * r;
    // Keep the full well mapped to full swing.
    if (pixel.conversion_gain_uV_per_e > 0.0) s.pixel.conversion_gain_uV_per_e /= r * r;
  }
  s.pixel.size_um = p_um;
  return s;
}

Spectrum default_qe(Channel ch, const WavelengthGrid& grid) {
  auto gauss = [&](double mu, double sigma, double peak) {
    std::vector<double> v(grid.count);
    for (std::size_t k = 0; k < v.size(); ++k) {
      const double d = (grid.wavelength(k) - mu) / sigma;
      v[k] = peak * std::exp(-0.5 * d * d);
    }
    return v;
  };
  std::vector<double> v;
  switch (ch) {
    case Channel::kR: v = gauss(610.0, 35.0, 0.50); break;
    case Channel::kG: v = gauss(535.0, 35.0, 0.55); break;
    case Channel::kB: v = gauss(455.0, 30.0, 0.45); break;
    case Channel::kC:
    case Channel::kM: {
      const auto r = gauss(610.0, 35.0, 0.50), g = gauss(535.0, 35.0, 0.55), b = gauss(455.0, 30.0, 0.45);
      v.resize(grid.count);
      for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::min(1.0, r[k] + g[k] + b[k]);
      break;
    }
  }
  return Spectrum(grid, SpectrumUnit::kDimensionless, std::move(v));
}

Spectrum sensor_qe(const SensorSpec& sensor, Channel ch, const WavelengthGrid& grid) {
  auto it = sensor.qe.find(ch);
  if (it == sensor.qe.end()) return default_qe(ch, grid);
  return resample(it->second, grid);
}

Geometry derive_geometry(double pixel_size_um, const SensorSpec& sensor) {
  auto axis = [&](double dye_mm) {
    auto n = static_cast<std::size_t>(std::floor(dye_mm * 1000.0 / pixel_size_um + 1e-9));
    return n & ~std::size_t{1};
  };
  return {axis(sensor.dye_height_mm), axis(sensor.dye_width_mm)};
}

double dynamic_range_db(const SensorSpec& sensor) {
  return 20.0 * std::log10(sensor.pixel.well_capacity_e / sensor.pixel.read_noise_e);
}

std::size_t binning_factor(double pixel_size_um, double pitch_um) {
  const double ratio = pixel_size_um / pitch_um;
  const double b = std::round(ratio);
  if (b < 1.0 || std::abs(ratio - b) > 1e-6 * ratio) {
    throw Error(ErrorCode::kInvalidArgument,
                "pixel size " + std::to_string(pixel_size_um) + " um is not an integer multiple of grid pitch " +
                    std::to_string(pitch_um) + " um");
  }
  return static_cast<std::size_t>(b);
}

Footprint sensor_footprint(std::size_t grid_rows, std::size_t grid_cols, double pitch_um,
                           const SensorSpec& sensor) {
  const double p = sensor.pixel.size_um;
  Footprint fp;
  fp.binning = binning_factor(p, pitch_um);
  fp.geometry = derive_geometry(p, sensor);
  const std::size_t b = fp.binning;
  const Geometry& g = fp.geometry;
  if (g.rows * b > grid_rows || g.cols * b > grid_cols) {
    throw Error(ErrorCode::kDimensionMismatch,
                "sensor footprint " + std::to_string(g.cols) + "x" + std::to_string(g.rows) + " px at " +
                    std::to_string(b) + " cells/px exceeds the " + std::to_string(grid_cols) + "x" +
                    std::to_string(grid_rows) + " scene grid");
  }
  fp.row0 = (grid_rows - g.rows * b) / 2;
  fp.col0 = (grid_cols - g.cols * b) / 2;
  return fp;
}

Plane<double> expected_rate(const IrradianceCube& irr, const SensorSpec& sensor) {
  sensor.validate();
  const auto& cube = irr.cube;
  const double p = sensor.pixel.size_um;
  const Footprint fp = sensor_footprint(cube.rows(), cube.cols(), cube.pitch_um(), sensor);
  const std::size_t b = fp.binning;
  const Geometry g = fp.geometry;
  const std::size_t r0 = fp.row0;
  const std::size_t c0 = fp.col0;

  // Per-channel weights QE(λ)·Δλ·A·ff / b² (mean over the footprint).
  const double area = (p * 1e-6) * (p * 1e-6);
  const double scale = area * sensor.pixel.fill_factor * cube.grid().step_nm / static_cast<double>(b * b);
  std::map<Channel, std::vector<double>> weights;
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 2; ++c) {
      const Channel ch = cfa_channel(sensor.cfa, r, c);
      if (weights.contains(ch)) continue;
      const Spectrum qe = sensor_qe(sensor, ch, cube.grid());
      std::vector<double> w(qe.size());
      for (std::size_t k = 0; k < w.size(); ++k) w[k] = qe[k] * scale;
      weights.emplace(ch, std::move(w));
    }
  }
  const std::array<const std::vector<double>*, 4> pattern = {
      &weights.at(cfa_channel(sensor.cfa, 0, 0)), &weights.at(cfa_channel(sensor.cfa, 0, 1)),
      &weights.at(cfa_channel(sensor.cfa, 1, 0)), &weights.at(cfa_channel(sensor.cfa, 1, 1))};

  Plane<double> out(g.rows, g.cols);
  const std::size_t nb = cube.bands();
  parallel_for(g.rows, [&](std::size_t r) {
    std::vector<double> acc(nb);
    for (std::size_t c = 0; c < g.cols; ++c) {
      std::fill(acc.begin(), acc.end(), 0.0);
      for (std::size_t dy = 0; dy < b; ++dy) {
        for (std::size_t dx = 0; dx < b; ++dx) {
          auto px = cube.pixel(r0 + r * b + dy, c0 + c * b + dx);
          for (std::size_t k = 0; k < nb; ++k) acc[k] += px[k];
        }
      }
      const auto& w = *pattern[(r % 2) * 2 + (c % 2)];
      double e = 0.0;
      for (std::size_t k = 0; k < nb; ++k) e += acc[k] * w[k];
      out(r, c) = e;
    }
  });
  return out;
}

Plane<double> integrate(const IrradianceCube& irr, const SensorSpec& sensor, double exposure_s) {
  if (exposure_s < 0.0) throw Error(ErrorCode::kInvalidArgument, "exposure must be >= 0");
  Plane<double> e = expected_rate(irr, sensor);
  for (auto& v : e.data()) v *= exposure_s;
  return e;
}

Plane<double> apply_noise(const Plane<double>& expected_e, const SensorSpec& sensor,
                          double exposure_s, std::uint64_t seed) {
  const double well = sensor.pixel.well_capacity_e;
  Plane<double> out(expected_e.rows(), expected_e.cols());
  if (!sensor.noise) {
    for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = std::clamp(expected_e.data()[i], 0.0, well);
    return out;
  }
  const double dark = sensor.pixel.dark_current_e_per_s * exposure_s;
  const double read = sensor.pixel.read_noise_e;
  parallel_for(out.rows(), [&](std::size_t r) {
    for (std::size_t c = 0; c < out.cols(); ++c) {
      double mean = expected_e(r, c);
      double offset = 0.0;
      if (sensor.prnu_sigma > 0.0 || sensor.dsnu_e > 0.0) {
        CounterRng fpn{sensor.fixed_pattern_seed, 0x46504Eull, r, c};
        std::normal_distribution<double> n01(0.0, 1.0);
        mean *= std::max(0.0, 1.0 + sensor.prnu_sigma * n01(fpn));
        offset = sensor.dsnu_e * n01(fpn);
      }
      mean += dark;
      CounterRng rng{seed, 0x4E4F495345ull, r, c};
      double e = 0.0;
      if (mean > 0.0) {
        std::poisson_distribution<long long> shot(mean);
        e = static_cast<double>(shot(rng));
      }
      if (read > 0.0) {
        std::normal_distribution<double> rn(0.0, read);
        e += rn(rng);
      }
      out(r, c) = std::clamp(e + offset, 0.0, well);
    }
  });
  return out;
}

RawFrame adc(const Plane<double>& electrons, const SensorSpec& sensor, double exposure_s,
             std::uint64_t seed) {
  RawFrame f;
  f.dn = Plane<std::uint16_t>(electrons.rows(), electrons.cols());
  f.saturated = Plane<std::uint8_t>(electrons.rows(), electrons.cols());
  f.exposure_s = exposure_s;
  f.sensor = sensor;
  f.seed = seed;
  const double max_code = sensor.max_code();
  const double k = sensor.conversion_gain_uV_per_e() * 1e-6 * sensor.analog_gain /
                   sensor.pixel.voltage_swing_V * max_code;
  const double well = sensor.pixel.well_capacity_e;
  for (std::size_t i = 0; i < electrons.size(); ++i) {
    const double e = electrons.data()[i];
    // The small offset keeps exact code boundaries (e.g. e = well) from
    // rounding one step low.
    const double dn = std::clamp(std::floor(e * k + 1e-7), 0.0, max_code);
    f.dn.data()[i] = static_cast<std::uint16_t>(dn);
    f.saturated.data()[i] = (e >= well || dn >= max_code) ? 1 : 0;
  }
  return f;
}

Plane<double> dn_to_electrons(const RawFrame& frame) {
  const double per_dn = frame.sensor.electrons_per_dn();
  Plane<double> e(frame.rows(), frame.cols());
  for (std::size_t i = 0; i < e.size(); ++i) e.data()[i] = frame.dn.data()[i] * per_dn;
  return e;
}

RawFrame capture(const IrradianceCube& irr, const SensorSpec& sensor, double exposure_s,
                 std::uint64_t seed) {
  const Plane<double> expected = integrate(irr, sensor, exposure_s);
  return adc(apply_noise(expected, sensor, exposure_s, seed), sensor, exposure_s, seed);
}

RawFrame capture(const Scene& scene, const LensSpec& lens, const SensorSpec& sensor,
                 double exposure_s, std::uint64_t seed) {
  return capture(sensor_irradiance(scene, lens), sensor, exposure_s, seed);
}

SensorSpec fit_dye_to_scene(const SensorSpec& sensor, const Scene& scene) {
  SensorSpec s = sensor;
  const double pitch = scene.radiance.pitch_um();
  s.dye_width_mm = static_cast<double>(scene.cols()) * pitch * 1e-3;
  s.dye_height_mm = static_cast<double>(scene.rows()) * pitch * 1e-3;
  return s;
}

// ---------------------------------------------------------------------------
// Frame files

void save_frame(const RawFrame& frame, const fs::path& dir) {
  fs::create_directories(dir);
  {
    std::ofstream f(dir / "frame.raw16", std::ios::binary);
    if (!f) throw Error(ErrorCode::kIo, "cannot write " + (dir / "frame.raw16").string());
    for (auto v : frame.dn.data()) {
      const char b[2] = {static_cast<char>(v & 0xFF), static_cast<char>(v >> 8)};
      f.write(b, 2);
    }
  }
  // Alternating run lengths over the row-major saturation mask, starting
  // with an unsaturated run (possibly empty).
  std::vector<std::size_t> rle;
  std::uint8_t current = 0;
  std::size_t run = 0;
  for (auto s : frame.saturated.data()) {
    if (s != current) {
      rle.push_back(run);
      current = s;
      run = 0;
    }
    ++run;
  }
  rle.push_back(run);
  nlohmann::json meta{{"rows", frame.rows()},
                      {"cols", frame.cols()},
                      {"exposure_s", frame.exposure_s},
                      {"seed", frame.seed},
                      {"sensor", frame.sensor},
                      {"saturation_rle", rle}};
  std::ofstream f(dir / "frame.json");
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + (dir / "frame.json").string());
  f << meta.dump(2) << '\n';
}

RawFrame load_frame(const fs::path& dir) {
  std::ifstream mf(dir / "frame.json");
  if (!mf) throw Error(ErrorCode::kIo, "missing frame.json in " + dir.string());
  nlohmann::json meta;
  try {
    mf >> meta;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kIo, std::string("unreadable frame.json: ") + e.what());
  }
  RawFrame f;
  const auto rows = meta.at("rows").get<std::size_t>();
  const auto cols = meta.at("cols").get<std::size_t>();
  f.exposure_s = meta.at("exposure_s").get<double>();
  f.seed = meta.at("seed").get<std::uint64_t>();
  f.sensor = meta.at("sensor").get<SensorSpec>();
  f.dn = Plane<std::uint16_t>(rows, cols);
  f.saturated = Plane<std::uint8_t>(rows, cols);

  std::ifstream rf(dir / "frame.raw16", std::ios::binary);
  if (!rf) throw Error(ErrorCode::kIo, "missing frame.raw16 in " + dir.string());
  std::vector<char> bytes{std::istreambuf_iterator<char>(rf), std::istreambuf_iterator<char>()};
  if (bytes.size() != rows * cols * 2) {
    throw Error(ErrorCode::kTruncatedPayload, "frame.raw16 size does not match frame.json dimensions");
  }
  for (std::size_t i = 0; i < rows * cols; ++i) {
    f.dn.data()[i] = static_cast<std::uint16_t>(static_cast<unsigned char>(bytes[2 * i]) |
                                                (static_cast<unsigned char>(bytes[2 * i + 1]) << 8));
  }
  std::size_t pos = 0;
  std::uint8_t value = 0;
  for (auto run : meta.at("saturation_rle").get<std::vector<std::size_t>>()) {
    if (pos + run > rows * cols) throw Error(ErrorCode::kDimensionMismatch, "saturation RLE overruns frame");
    std::fill_n(f.saturated.data().begin() + static_cast<long>(pos), run, value);
    pos += run;
    value ^= 1;
  }
  if (pos != rows * cols) throw Error(ErrorCode::kDimensionMismatch, "saturation RLE does not cover frame");
  return f;
}

// ---------------------------------------------------------------------------
// JSON

void to_json(nlohmann::json& j, const PixelSpec& p) {
  j = nlohmann::json{{"size_um", p.size_um},
                     {"well_capacity_e", p.well_capacity_e},
                     {"read_noise_e", p.read_noise_e},
                     {"dark_current_e_per_s", p.dark_current_e_per_s},
                     {"conversion_gain_uV_per_e", p.conversion_gain_uV_per_e},
                     {"voltage_swing_V", p.voltage_swing_V},
                     {"fill_factor", p.fill_factor}};
}

void from_json(const nlohmann::json& j, PixelSpec& p) {
  p = PixelSpec{};
  p.size_um = j.value("size_um", p.size_um);
  p.well_capacity_e = j.value("well_capacity_e", p.well_capacity_e);
  p.read_noise_e = j.value("read_noise_e", p.read_noise_e);
  p.dark_current_e_per_s = j.value("dark_current_e_per_s", p.dark_current_e_per_s);
  p.conversion_gain_uV_per_e = j.value("conversion_gain_uV_per_e", p.conversion_gain_uV_per_e);
  p.voltage_swing_V = j.value("voltage_swing_V", p.voltage_swing_V);
  p.fill_factor = j.value("fill_factor", p.fill_factor);
}

void to_json(nlohmann::json& j, const SensorSpec& s) {
  j = nlohmann::json{{"pixel", s.pixel},
                     {"dye_width_mm", s.dye_width_mm},
                     {"dye_height_mm", s.dye_height_mm},
                     {"cfa", to_string(s.cfa)},
                     {"adc_bits", s.adc_bits},
                     {"analog_gain", s.analog_gain},
                     {"scale_well_with_area", s.scale_well_with_area},
                     {"noise", s.noise},
                     {"prnu_sigma", s.prnu_sigma},
                     {"dsnu_e", s.dsnu_e},
                     {"fixed_pattern_seed", s.fixed_pattern_seed}};
  if (!s.qe.empty()) {
    nlohmann::json qe = nlohmann::json::object();
    for (const auto& [ch, spec] : s.qe) qe[to_string(ch)] = spec;
    j["qe"] = std::move(qe);
  }
}

void from_json(const nlohmann::json& j, SensorSpec& s) {
  s = SensorSpec{};
  if (j.contains("pixel")) s.pixel = j.at("pixel").get<PixelSpec>();
  s.dye_width_mm = j.value("dye_width_mm", s.dye_width_mm);
  s.dye_height_mm = j.value("dye_height_mm", s.dye_height_mm);
  s.cfa = cfa_from_string(j.value("cfa", std::string("RGGB")));
  s.adc_bits = j.value("adc_bits", s.adc_bits);
  s.analog_gain = j.value("analog_gain", s.analog_gain);
  s.scale_well_with_area = j.value("scale_well_with_area", s.scale_well_with_area);
  s.noise = j.value("noise", s.noise);
  s.prnu_sigma = j.value("prnu_sigma", s.prnu_sigma);
  s.dsnu_e = j.value("dsnu_e", s.dsnu_e);
  s.fixed_pattern_seed = j.value("fixed_pattern_seed", s.fixed_pattern_seed);
  if (j.contains("qe")) {
    for (const auto& [k, v] : j.at("qe").items()) s.qe[channel_from_string(k)] = v.get<Spectrum>();
  }
  s.validate();
}

}  // namespace camsim
