#pragma once

#include <array>
#include <vector>

#include "camsim/spectral.hpp"

namespace camsim {

using Mat3 = std::array<std::array<double, 3>, 3>;
using Vec3 = std::array<double, 3>;

Mat3 identity3();
Vec3 mul(const Mat3& m, const Vec3& v);
Mat3 mul(const Mat3& a, const Mat3& b);
double determinant(const Mat3& m);
/// Throws kSingularMatrix when |det| is negligible.
Mat3 inverse(const Mat3& m);

/// CIE standard illuminant D65 relative SPD (100 at 560 nm), energy units,
/// sampled from the 10 nm table and resampled to `grid`.
Spectrum d65_relative(const WavelengthGrid& grid);

/// D65 photon irradiance spectrum scaled to the requested illuminance.
Spectrum d65_irradiance(const WavelengthGrid& grid, double lux);

/// CIE 1931 2° colour matching functions from the multi-lobe Gaussian fit
/// (Wyman, Sloan & Shirley 2013). Returns {x̄, ȳ, z̄}.
Vec3 cmf_xyz(double wavelength_nm);

/// XYZ (D65 white) to linear sRGB.
Mat3 xyz_to_linear_srgb();

/// 24 smooth synthetic reflectance patches: 18 chromatic, then 6 neutrals
/// from 0.90 down to 0.03.
std::vector<Spectrum> reference_patches(const WavelengthGrid& grid);
inline constexpr std::size_t kNeutralPatchBegin = 18;

}  // namespace camsim
