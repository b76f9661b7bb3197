#include "camsim/colorimetry.hpp"

#include <cmath>

#include "camsim/error.hpp"

namespace camsim {

Mat3 identity3() { return Mat3{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}; }

Vec3 mul(const Mat3& m, const Vec3& v) {
  Vec3 out{};
  for (int r = 0; r < 3; ++r) out[r] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2];
  return out;
}

Mat3 mul(const Mat3& a, const Mat3& b) {
  Mat3 out{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      out[r][c] = a[r][0] * b[0][c] + a[r][1] * b[1][c] + a[r][2] * b[2][c];
  return out;
}

double determinant(const Mat3& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat3 inverse(const Mat3& m) {
  const double det = determinant(m);
  double scale = 0.0;
  for (const auto& row : m)
    for (double v : row) scale = std::max(scale, std::abs(v));
  if (scale == 0.0 || std::abs(det) <= 1e-12 * scale * scale * scale) {
    throw Error(ErrorCode::kSingularMatrix, "singular 3x3 matrix");
  }
  Mat3 inv{};
  inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  inv[1][0] = (m[1][2] * m[2][0] - m[1][0] * m[2][2]) / det;
  inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  inv[2][0] = (m[1][0] * m[2][1] - m[1][1] * m[2][0]) / det;
  inv[2][1] = (m[0][1] * m[2][0] - m[0][0] * m[2][1]) / det;
  inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  return inv;
}

namespace {

// CIE D65, 380..780 nm at 10 nm.
constexpr std::array<double, 41> kD65 = {
    49.9755, 54.6482, 82.7549, 91.486,  93.4318, 86.6823, 104.865, 117.008, 117.812,
    114.861, 115.923, 108.811, 109.354, 107.802, 104.79,  107.689, 104.405, 104.046,
    100.0,   96.3342, 95.788,  88.6856, 90.0062, 89.5991, 87.6987, 83.2886, 83.6992,
    80.0268, 80.2146, 82.2778, 78.2842, 69.7213, 71.6091, 74.349,  61.604,  69.8856,
    75.087,  63.5927, 46.4182, 66.8054, 63.3828};

double lobe(double x, double mu, double s_lo, double s_hi) {
  const double t = (x - mu) / (x < mu ? s_lo : s_hi);
  return std::exp(-0.5 * t * t);
}

double gauss(double x, double mu, double sigma) {
  const double t = (x - mu) / sigma;
  return std::exp(-0.5 * t * t);
}

}  // namespace

Spectrum d65_relative(const WavelengthGrid& grid) {
  Spectrum table(WavelengthGrid(380.0, 10.0, kD65.size()), SpectrumUnit::kEnergyIrradiance,
                 std::vector<double>(kD65.begin(), kD65.end()));
  return resample(table, grid);
}

Spectrum d65_irradiance(const WavelengthGrid& grid, double lux) {
  Spectrum photons = to_photons(d65_relative(grid));
  const double base = illuminance_lux(photons);
  return photons.scaled(base > 0.0 ? lux / base : 0.0);
}

Vec3 cmf_xyz(double l) {
  const double x = 1.056 * lobe(l, 599.8, 37.9, 31.0) + 0.362 * lobe(l, 442.0, 16.0, 26.7) -
                   0.065 * lobe(l, 501.1, 20.4, 26.2);
  const double y = 0.821 * lobe(l, 568.8, 46.9, 40.5) + 0.286 * lobe(l, 530.9, 16.3, 31.1);
  const double z = 1.217 * lobe(l, 437.0, 11.8, 36.0) + 0.681 * lobe(l, 459.0, 26.0, 13.8);
  return {x, y, z};
}

Mat3 xyz_to_linear_srgb() {
  return Mat3{{{3.2404542, -1.5371385, -0.4985314},
               {-0.9692660, 1.8760108, 0.0415560},
               {0.0556434, -0.2040259, 1.0572252}}};
}

std::vector<Spectrum> reference_patches(const WavelengthGrid& grid) {
  std::vector<Spectrum> out;
  out.reserve(24);
  auto make = [&](auto&& fn) {
    std::vector<double> v(grid.count);
    for (std::size_t i = 0; i < grid.count; ++i) {
      v[i] = std::clamp(fn(grid.wavelength(i)), 0.0, 1.0);
    }
    out.emplace_back(grid, SpectrumUnit::kDimensionless, std::move(v));
  };
  // Band-pass patches stepping through hue.
  for (int k = 0; k < 9; ++k) {
    const double mu = 420.0 + 35.0 * k;
    make([&](double l) { return 0.05 + 0.75 * gauss(l, mu, 28.0); });
  }
  // Long-pass edges (yellows, oranges, reds).
  for (int k = 0; k < 4; ++k) {
    const double edge = 500.0 + 40.0 * k;
    make([&](double l) { return 0.06 + 0.8 / (1.0 + std::exp(-(l - edge) / 12.0)); });
  }
  // Short-pass edges (blues, cyans).
  for (int k = 0; k < 3; ++k) {
    const double edge = 480.0 + 40.0 * k;
    make([&](double l) { return 0.06 + 0.7 / (1.0 + std::exp((l - edge) / 14.0)); });
  }
  // Band-stop patches (magentas).
  for (int k = 0; k < 2; ++k) {
    const double mu = 520.0 + 40.0 * k;
    make([&](double l) { return 0.75 - 0.65 * gauss(l, mu, 35.0); });
  }
  for (double level : {0.90, 0.59, 0.36, 0.19, 0.09, 0.03}) {
    make([&](double) { return level; });
  }
  return out;
}

}  // namespace camsim
