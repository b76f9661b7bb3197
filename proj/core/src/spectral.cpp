#include "camsim/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "camsim/error.hpp"
#include "photopic_table.hpp"

namespace camsim {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDisjointGrids: return "disjoint grids";
    case ErrorCode::kWrongUnit: return "wrong unit";
    case ErrorCode::kBadMagic: return "bad magic";
    case ErrorCode::kTruncatedPayload: return "truncated payload";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kIo: return "io error";
    case ErrorCode::kSingularMatrix: return "singular matrix";
    case ErrorCode::kUnsupportedCfa: return "unsupported cfa";
    case ErrorCode::kValidation: return "validation error";
    case ErrorCode::kConfig: return "config error";
  }
  return "unknown";
}

WavelengthGrid::WavelengthGrid(double start, double step, std::size_t n)
    : start_nm(start), step_nm(step), count(n) {
  if (!(start > 0.0) || !(step > 0.0) || n < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "wavelength grid needs start_nm > 0, step_nm > 0, count >= 1");
  }
}

WavelengthGrid default_grid() { return WavelengthGrid(400.0, 10.0, 31); }

const char* to_string(SpectrumUnit unit) {
  switch (unit) {
    case SpectrumUnit::kPhotonRadiance: return "photon_radiance";
    case SpectrumUnit::kPhotonIrradiance: return "photon_irradiance";
    case SpectrumUnit::kEnergyRadiance: return "energy_radiance";
    case SpectrumUnit::kEnergyIrradiance: return "energy_irradiance";
    case SpectrumUnit::kDimensionless: return "dimensionless";
  }
  return "dimensionless";
}

SpectrumUnit spectrum_unit_from_string(const std::string& s) {
  for (auto u : {SpectrumUnit::kPhotonRadiance, SpectrumUnit::kPhotonIrradiance,
                 SpectrumUnit::kEnergyRadiance, SpectrumUnit::kEnergyIrradiance,
                 SpectrumUnit::kDimensionless}) {
    if (s == to_string(u)) return u;
  }
  throw Error(ErrorCode::kWrongUnit, "unknown spectrum unit '" + s + "'");
}

Spectrum::Spectrum(WavelengthGrid grid, SpectrumUnit unit, std::vector<double> values)
    : grid_(grid), unit_(unit), values_(std::move(values)) {
  if (values_.size() != grid_.count) {
    throw Error(ErrorCode::kInvalidArgument, "spectrum length does not match grid count");
  }
  for (double v : values_) {
    if (!std::isfinite(v) || v < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "spectrum values must be finite and >= 0");
    }
    if (unit_ == SpectrumUnit::kDimensionless && v > 1.0) {
      throw Error(ErrorCode::kInvalidArgument, "dimensionless spectrum values must lie in [0,1]");
    }
  }
}

Spectrum Spectrum::constant(const WavelengthGrid& grid, SpectrumUnit unit, double value) {
  return Spectrum(grid, unit, std::vector<double>(grid.count, value));
}

Spectrum Spectrum::scaled(double k) const {
  std::vector<double> v(values_);
  for (auto& x : v) x *= k;
  return Spectrum(grid_, unit_, std::move(v));
}

double Spectrum::at(double wavelength_nm) const {
  const double pos = (wavelength_nm - grid_.start_nm) / grid_.step_nm;
  const double last = static_cast<double>(grid_.count - 1);
  constexpr double kTol = 1e-9;
  if (pos < -kTol || pos > last + kTol) return 0.0;
  if (grid_.count == 1) return values_[0];
  const double clamped = std::clamp(pos, 0.0, last);
  auto i0 = static_cast<std::size_t>(std::floor(clamped));
  if (i0 >= grid_.count - 1) return values_.back();
  const double frac = clamped - static_cast<double>(i0);
  return values_[i0] * (1.0 - frac) + values_[i0 + 1] * frac;
}

double photon_energy_j(double wavelength_nm) {
  return kPlanck * kSpeedOfLight / (wavelength_nm * 1e-9);
}

namespace {

bool is_energy(SpectrumUnit u) {
  return u == SpectrumUnit::kEnergyRadiance || u == SpectrumUnit::kEnergyIrradiance;
}

bool is_photon(SpectrumUnit u) {
  return u == SpectrumUnit::kPhotonRadiance || u == SpectrumUnit::kPhotonIrradiance;
}

}  // namespace

Spectrum to_photons(const Spectrum& s) {
  if (!is_energy(s.unit())) return s;
  std::vector<double> v(s.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = s[i] / photon_energy_j(s.grid().wavelength(i));
  }
  auto unit = s.unit() == SpectrumUnit::kEnergyRadiance ? SpectrumUnit::kPhotonRadiance
                                                        : SpectrumUnit::kPhotonIrradiance;
  return Spectrum(s.grid(), unit, std::move(v));
}

Spectrum to_energy(const Spectrum& s) {
  if (!is_photon(s.unit())) return s;
  std::vector<double> v(s.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = s[i] * photon_energy_j(s.grid().wavelength(i));
  }
  auto unit = s.unit() == SpectrumUnit::kPhotonRadiance ? SpectrumUnit::kEnergyRadiance
                                                        : SpectrumUnit::kEnergyIrradiance;
  return Spectrum(s.grid(), unit, std::move(v));
}

Spectrum resample(const Spectrum& s, const WavelengthGrid& target) {
  const double lo = std::max(s.grid().start_nm, target.start_nm);
  const double hi = std::min(s.grid().end_nm(), target.end_nm());
  if (lo > hi + 1e-9) {
    throw Error(ErrorCode::kDisjointGrids, "disjoint grids");
  }
  if (s.grid() == target) return s;
  std::vector<double> v(target.count);
  for (std::size_t i = 0; i < target.count; ++i) v[i] = s.at(target.wavelength(i));
  return Spectrum(target, s.unit(), std::move(v));
}

double photopic(double wavelength_nm) {
  using detail::kPhotopic1nm;
  const double pos = wavelength_nm - detail::kPhotopicStartNm;
  const double last = static_cast<double>(detail::kPhotopicCount - 1);
  if (pos < 0.0 || pos > last) return 0.0;
  auto i0 = static_cast<std::size_t>(std::floor(pos));
  if (i0 >= detail::kPhotopicCount - 1) return kPhotopic1nm.back();
  const double frac = pos - static_cast<double>(i0);
  return kPhotopic1nm[i0] * (1.0 - frac) + kPhotopic1nm[i0 + 1] * frac;
}

Spectrum photopic_curve(const WavelengthGrid& grid) {
  std::vector<double> v(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) v[i] = photopic(grid.wavelength(i));
  return Spectrum(grid, SpectrumUnit::kDimensionless, std::move(v));
}

std::vector<double> photon_luminous_weights(const WavelengthGrid& grid) {
  std::vector<double> w(grid.count);
  for (std::size_t i = 0; i < grid.count; ++i) {
    const double lambda = grid.wavelength(i);
    w[i] = kLuminousEfficacy * photopic(lambda) * photon_energy_j(lambda) * grid.step_nm;
  }
  return w;
}

namespace {

double photometric_sum(const Spectrum& s) {
  const auto& g = s.grid();
  double sum = 0.0;
  if (is_energy(s.unit())) {
    for (std::size_t i = 0; i < s.size(); ++i) sum += photopic(g.wavelength(i)) * s[i];
    return kLuminousEfficacy * sum * g.step_nm;
  }
  const auto w = photon_luminous_weights(g);
  for (std::size_t i = 0; i < s.size(); ++i) sum += w[i] * s[i];
  return sum;
}

}  // namespace

double luminance_cd_m2(const Spectrum& radiance) {
  if (radiance.unit() != SpectrumUnit::kPhotonRadiance &&
      radiance.unit() != SpectrumUnit::kEnergyRadiance) {
    throw Error(ErrorCode::kWrongUnit,
                std::string("luminance needs a radiance spectrum, got ") + to_string(radiance.unit()));
  }
  return photometric_sum(radiance);
}

double illuminance_lux(const Spectrum& irradiance) {
  if (irradiance.unit() != SpectrumUnit::kPhotonIrradiance &&
      irradiance.unit() != SpectrumUnit::kEnergyIrradiance) {
    throw Error(ErrorCode::kWrongUnit,
                std::string("illuminance needs an irradiance spectrum, got ") + to_string(irradiance.unit()));
  }
  return photometric_sum(irradiance);
}

void to_json(nlohmann::json& j, const WavelengthGrid& g) {
  j = nlohmann::json{{"start_nm", g.start_nm}, {"step_nm", g.step_nm}, {"count", g.count}};
}

void from_json(const nlohmann::json& j, WavelengthGrid& g) {
  g = WavelengthGrid(j.at("start_nm").get<double>(), j.at("step_nm").get<double>(),
                     j.at("count").get<std::size_t>());
}

void to_json(nlohmann::json& j, const Spectrum& s) {
  j = nlohmann::json{{"start_nm", s.grid().start_nm},
                     {"step_nm", s.grid().step_nm},
                     {"count", s.grid().count},
                     {"unit", to_string(s.unit())},
                     {"values", s.values()}};
}

void from_json(const nlohmann::json& j, Spectrum& s) {
  WavelengthGrid g = j.get<WavelengthGrid>();
  s = Spectrum(g, spectrum_unit_from_string(j.value("unit", std::string("dimensionless"))),
               j.at("values").get<std::vector<double>>());
}

}  // namespace camsim
