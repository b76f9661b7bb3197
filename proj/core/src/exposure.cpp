#include "camsim/exposure.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "camsim/error.hpp"
#include "camsim/rng.hpp"

namespace camsim {

void ExposurePlan::validate() const {
  auto bad = [](const std::string& m) { throw Error(ErrorCode::kInvalidArgument, m); };
  switch (mode) {
    case ExposureMode::kFixed:
      if (!(t_s >= 0.0)) bad("fixed exposure must be >= 0");
      break;
    case ExposureMode::kCenterWeighted:
      if (!(cap_s > 0.0)) bad("exposure cap must be positive");
      if (!(window_fraction > 0.0) || window_fraction > 1.0) bad("window_fraction must lie in (0, 1]");
      if (!(target_fraction > 0.0) || target_fraction > 1.0) bad("target_fraction must lie in (0, 1]");
      break;
    case ExposureMode::kBracketed:
      if (durations_s.empty()) bad("bracketed plan needs at least one duration");
      for (std::size_t i = 0; i < durations_s.size(); ++i) {
        if (!(durations_s[i] > 0.0) || durations_s[i] > cap_s) bad("bracket durations must lie in (0, cap]");
        if (i > 0 && !(durations_s[i] < durations_s[i - 1])) bad("bracket durations must be strictly decreasing");
      }
      break;
  }
}

std::string ExposurePlan::label() const {
  switch (mode) {
    case ExposureMode::kFixed: {
      std::ostringstream os;
      if (t_s >= 1e-3) {
        os << "fixed_" << t_s * 1e3 << "ms";
      } else {
        os << "fixed_" << t_s * 1e6 << "us";
      }
      return os.str();
    }
    case ExposureMode::kCenterWeighted: return "center_weighted";
    case ExposureMode::kBracketed: return "bracketed";
  }
  return "?";
}

Window metering_window(std::size_t rows, std::size_t cols, double fraction) {
  const double side = std::sqrt(fraction);
  auto span = [&](std::size_t n) {
    const auto len = std::clamp<std::size_t>(static_cast<std::size_t>(std::lround(side * static_cast<double>(n))), 1, n);
    const std::size_t start = (n - len) / 2;
    return std::pair{start, start + len};
  };
  const auto [r0, r1] = span(rows);
  const auto [c0, c1] = span(cols);
  return {r0, c0, r1, c1};
}

double center_weighted_duration(const Plane<double>& rate, const SensorSpec& sensor,
                                const ExposurePlan& plan) {
  if (plan.mode != ExposureMode::kCenterWeighted) {
    throw Error(ErrorCode::kInvalidArgument, "center_weighted_duration needs a center-weighted plan");
  }
  plan.validate();
  const Window w = metering_window(rate.rows(), rate.cols(), plan.window_fraction);
  std::vector<double> values;
  values.reserve((w.r1 - w.r0) * (w.c1 - w.c0));
  for (std::size_t r = w.r0; r < w.r1; ++r) {
    for (std::size_t c = w.c0; c < w.c1; ++c) values.push_back(rate(r, c));
  }
  double stat = 0.0;
  if (!values.empty()) {
    if (plan.statistic == MeterStatistic::kMax) {
      stat = *std::max_element(values.begin(), values.end());
    } else {
      const auto idx = static_cast<std::size_t>(std::ceil(0.99 * static_cast<double>(values.size()))) - 1;
      std::nth_element(values.begin(), values.begin() + static_cast<long>(idx), values.end());
      stat = values[idx];
    }
  }
  if (!(stat > 0.0)) return plan.cap_s;
  return std::min(plan.cap_s, plan.target_fraction * sensor.pixel.well_capacity_e / stat);
}

double center_weighted_duration(const IrradianceCube& irr, const SensorSpec& sensor,
                                const ExposurePlan& plan) {
  return center_weighted_duration(expected_rate(irr, sensor), sensor, plan);
}

double center_weighted_duration(const Scene& scene, const LensSpec& lens, const SensorSpec& sensor,
                                const ExposurePlan& plan) {
  return center_weighted_duration(sensor_irradiance(scene, lens), sensor, plan);
}

std::uint64_t bracket_seed(std::uint64_t seed, std::size_t index) {
  return stream_key({seed, 0x42524B54ull, index});
}

std::vector<RawFrame> bracketed_capture(const IrradianceCube& irr, const SensorSpec& sensor,
                                        const std::vector<double>& durations_s, std::uint64_t seed) {
  // The expected image is shared; only the exposure and noise stream differ.
  const Plane<double> rate = expected_rate(irr, sensor);
  std::vector<RawFrame> frames;
  frames.reserve(durations_s.size());
  for (std::size_t i = 0; i < durations_s.size(); ++i) {
    const double t = durations_s[i];
    const std::uint64_t s = durations_s.size() == 1 ? seed : bracket_seed(seed, i);
    Plane<double> expected = rate;
    for (auto& v : expected.data()) v *= t;
    frames.push_back(adc(apply_noise(expected, sensor, t, s), sensor, t, s));
  }
  return frames;
}

std::vector<RawFrame> bracketed_capture(const Scene& scene, const LensSpec& lens,
                                        const SensorSpec& sensor,
                                        const std::vector<double>& durations_s, std::uint64_t seed) {
  return bracketed_capture(sensor_irradiance(scene, lens), sensor, durations_s, seed);
}

HDRFrame hdr_combine(const std::vector<RawFrame>& frames) {
  if (frames.empty()) throw Error(ErrorCode::kInvalidArgument, "hdr_combine needs at least one frame");
  const std::size_t H = frames[0].rows(), W = frames[0].cols();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    if (frames[i].rows() != H || frames[i].cols() != W) {
      throw Error(ErrorCode::kDimensionMismatch, "bracket frames do not share geometry");
    }
    if (!(frames[i].exposure_s > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "bracket frame durations must be positive");
    }
    if (i > 0 && frames[i].exposure_s > frames[i - 1].exposure_s) {
      throw Error(ErrorCode::kInvalidArgument, "bracket durations must be non-increasing");
    }
  }
  HDRFrame out;
  out.rate = Plane<double>(H, W);
  out.valid = Plane<std::uint8_t>(H, W);
  out.source_index = Plane<std::uint8_t>(H, W);
  out.sensor = frames[0].sensor;
  std::vector<double> per_dn;
  for (const auto& f : frames) per_dn.push_back(f.sensor.electrons_per_dn() / f.exposure_s);

  const std::size_t last = frames.size() - 1;
  for (std::size_t p = 0; p < H * W; ++p) {
    std::size_t pick = last;
    bool found = false;
    for (std::size_t i = 0; i < frames.size(); ++i) {
      if (!frames[i].saturated.data()[p]) {
        pick = i;
        found = true;
        break;
      }
    }
    out.rate.data()[p] = frames[pick].dn.data()[p] * per_dn[pick];
    out.source_index.data()[p] = static_cast<std::uint8_t>(pick);
    bool nonzero = false;
    for (const auto& f : frames) nonzero = nonzero || f.dn.data()[p] != 0;
    out.valid.data()[p] = (found && nonzero) ? 1 : 0;
  }
  return out;
}

double bracket_extension_db(const std::vector<double>& durations_s) {
  if (durations_s.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(durations_s.begin(), durations_s.end());
  return 20.0 * std::log10(*hi / *lo);
}

double effective_dynamic_range(const SensorSpec& sensor, const std::vector<double>& durations_s) {
  return dynamic_range_db(sensor) + bracket_extension_db(durations_s);
}

void to_json(nlohmann::json& j, const ExposurePlan& p) {
  switch (p.mode) {
    case ExposureMode::kFixed:
      j = {{"mode", "fixed"}, {"t_s", p.t_s}};
      break;
    case ExposureMode::kCenterWeighted:
      j = {{"mode", "center_weighted"},
           {"cap_s", p.cap_s},
           {"window_fraction", p.window_fraction},
           {"target_fraction", p.target_fraction},
           {"statistic", p.statistic == MeterStatistic::kMax ? "max" : "p99"}};
      break;
    case ExposureMode::kBracketed:
      j = {{"mode", "bracketed"}, {"durations_s", p.durations_s}, {"cap_s", p.cap_s}};
      break;
  }
}

void from_json(const nlohmann::json& j, ExposurePlan& p) {
  p = ExposurePlan{};
  const auto mode = j.value("mode", std::string("center_weighted"));
  if (mode == "fixed") {
    p.mode = ExposureMode::kFixed;
  } else if (mode == "center_weighted") {
    p.mode = ExposureMode::kCenterWeighted;
  } else if (mode == "bracketed") {
    p.mode = ExposureMode::kBracketed;
  } else {
    throw Error(ErrorCode::kConfig, "unknown exposure mode '" + mode + "'");
  }
  p.t_s = j.value("t_s", p.t_s);
  p.cap_s = j.value("cap_s", p.cap_s);
  p.window_fraction = j.value("window_fraction", p.window_fraction);
  p.target_fraction = j.value("target_fraction", p.target_fraction);
  const auto stat = j.value("statistic", std::string("max"));
  if (stat == "max") {
    p.statistic = MeterStatistic::kMax;
  } else if (stat == "p99") {
    p.statistic = MeterStatistic::kP99;
  } else {
    throw Error(ErrorCode::kConfig, "unknown metering statistic '" + stat + "'");
  }
  p.durations_s = j.value("durations_s", p.durations_s);
  p.validate();
}

}  // namespace camsim
