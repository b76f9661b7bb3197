#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace camsim {

inline constexpr double kPlanck = 6.62607015e-34;       // J·s
inline constexpr double kSpeedOfLight = 299792458.0;    // m/s
inline constexpr double kLuminousEfficacy = 683.0;      // lm/W at 555 nm

/// Uniform wavelength sampling: start_nm, start_nm + step_nm, ...
struct WavelengthGrid {
  double start_nm = 400.0;
  double step_nm = 10.0;
  std::size_t count = 31;

  WavelengthGrid() = default;
  WavelengthGrid(double start, double step, std::size_t n);

  double wavelength(std::size_t i) const noexcept { return start_nm + step_nm * static_cast<double>(i); }
  double end_nm() const noexcept { return wavelength(count - 1); }

  friend bool operator==(const WavelengthGrid&, const WavelengthGrid&) = default;
};

/// 400–700 nm in 10 nm steps.
WavelengthGrid default_grid();

enum class SpectrumUnit {
  kPhotonRadiance,     // photons/(s·m²·nm·sr)
  kPhotonIrradiance,   // photons/(s·m²·nm)
  kEnergyRadiance,     // W/(m²·nm·sr)
  kEnergyIrradiance,   // W/(m²·nm)
  kDimensionless,      // reflectance, transmittance, QE
};

const char* to_string(SpectrumUnit unit);
SpectrumUnit spectrum_unit_from_string(const std::string& s);

class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(WavelengthGrid grid, SpectrumUnit unit, std::vector<double> values);

  static Spectrum constant(const WavelengthGrid& grid, SpectrumUnit unit, double value);

  const WavelengthGrid& grid() const noexcept { return grid_; }
  SpectrumUnit unit() const noexcept { return unit_; }
  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }

  Spectrum scaled(double k) const;
  /// Linear interpolation at one wavelength; zero outside the support.
  double at(double wavelength_nm) const;

  friend bool operator==(const Spectrum&, const Spectrum&) = default;

 private:
  WavelengthGrid grid_;
  SpectrumUnit unit_ = SpectrumUnit::kDimensionless;
  std::vector<double> values_;
};

/// Energy of one photon at the given wavelength, in joules.
double photon_energy_j(double wavelength_nm);

/// Energy-unit spectra become photon-rate spectra; photon spectra pass through.
Spectrum to_photons(const Spectrum& s);
/// Photon-rate spectra become energy spectra; energy spectra pass through.
Spectrum to_energy(const Spectrum& s);

/// Resamples onto `target` by linear interpolation inside the source support
/// and zero outside. Throws kDisjointGrids when the ranges do not overlap.
Spectrum resample(const Spectrum& s, const WavelengthGrid& target);

/// CIE 1924 photopic V(λ) on a 1 nm table, linearly interpolated.
double photopic(double wavelength_nm);
/// V(λ) sampled on a grid (dimensionless).
Spectrum photopic_curve(const WavelengthGrid& grid);

/// 683 · Σ V(λ) L_W(λ) Δλ. Accepts photon or energy radiance.
double luminance_cd_m2(const Spectrum& radiance);
/// 683 · Σ V(λ) E_W(λ) Δλ. Accepts photon or energy irradiance.
double illuminance_lux(const Spectrum& irradiance);

/// Photometric weights w_i such that luminance = Σ w_i · photon_value_i.
std::vector<double> photon_luminous_weights(const WavelengthGrid& grid);

void to_json(nlohmann::json& j, const WavelengthGrid& g);
void from_json(const nlohmann::json& j, WavelengthGrid& g);
void to_json(nlohmann::json& j, const Spectrum& s);
void from_json(const nlohmann::json& j, Spectrum& s);

}  // namespace camsim
