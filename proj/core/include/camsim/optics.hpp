#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "camsim/scene.hpp"
#include "camsim/spectral_cube.hpp"

namespace camsim {

struct LensSpec {
  double focal_length_mm = 6.0;
  double f_number = 4.0;
  double fov_deg = 112.0;
  double transmission = 1.0;                 // scalar, used when the spectrum is absent
  std::optional<Spectrum> transmission_spectrum;
  double psf_fwhm_um = 1.5;
  bool cos4_falloff = false;

  /// Throws kInvalidArgument when the invariants do not hold.
  void validate() const;
};

/// Sensor-plane spectral irradiance, photons/(s·m²·nm).
struct IrradianceCube {
  SpectralCube cube;
  double mean_illuminance_lux = 0.0;
  std::vector<std::string> warnings;
};

/// E(λ) = π·T(λ)·L(λ) / (1 + 4N²), optionally with cos⁴ falloff.
IrradianceCube radiance_to_irradiance(const Scene& scene, const LensSpec& lens);

/// Separable Gaussian blur with σ = FWHM / 2.3548 and half-sample symmetric
/// edges. Skipped with a warning when pitch > FWHM / 2.
IrradianceCube apply_psf(const IrradianceCube& in, const LensSpec& lens);

/// The normalized 1-D kernel used by apply_psf, taps −r..r.
std::vector<double> gaussian_kernel(double fwhm_um, double pitch_um);

/// radiance_to_irradiance followed by apply_psf.
IrradianceCube sensor_irradiance(const Scene& scene, const LensSpec& lens);

/// Mean illuminance of a cube, via the photopic weights.
double mean_illuminance_lux(const SpectralCube& cube);

void to_json(nlohmann::json& j, const LensSpec& l);
void from_json(const nlohmann::json& j, LensSpec& l);

}  // namespace camsim
