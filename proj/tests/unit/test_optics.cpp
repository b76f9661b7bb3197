#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "camsim/error.hpp"
#include "camsim/optics.hpp"

using namespace camsim;

namespace {

Scene uniform_scene(std::size_t rows, std::size_t cols, double pitch, float value) {
  Scene s;
  s.radiance = SpectralCube(rows, cols, WavelengthGrid(400, 100, 4), SpectrumUnit::kPhotonRadiance, pitch);
  std::fill(s.radiance.data().begin(), s.radiance.data().end(), value);
  s.depth = Plane<float>(rows, cols, kBackgroundDepthM);
  s.instances = Plane<std::uint16_t>(rows, cols, 0);
  return s;
}

IrradianceCube impulse(std::size_t n, double pitch) {
  IrradianceCube irr;
  irr.cube = SpectralCube(n, n, WavelengthGrid(550, 10, 1), SpectrumUnit::kPhotonIrradiance, pitch);
  irr.cube.pixel(n / 2, n / 2)[0] = 1.0f;
  return irr;
}

double total(const SpectralCube& c) {
  double s = 0.0;
  for (float v : c.data()) s += v;
  return s;
}

}  // namespace

TEST(Optics, CameraEquationOnUniformScene) {
  LensSpec lens;
  lens.f_number = 2.8;
  lens.transmission = 0.9;
  const Scene s = uniform_scene(8, 8, 0.75, 1e18f);
  const IrradianceCube irr = radiance_to_irradiance(s, lens);
  const double expect = std::numbers::pi * 0.9 * 1e18 / (1.0 + 4.0 * 2.8 * 2.8);
  for (float v : irr.cube.data()) EXPECT_NEAR(v / expect, 1.0, 1e-6);
  EXPECT_EQ(irr.cube.unit(), SpectrumUnit::kPhotonIrradiance);
}

TEST(Optics, IlluminanceFollowsLuminance) {
  // E_sensor = π·T·L / (1 + 4N²) holds photometrically as well.
  LensSpec lens;
  const Scene s = uniform_scene(4, 4, 0.75, 3e17f);
  const IrradianceCube irr = radiance_to_irradiance(s, lens);
  Spectrum px(s.radiance.grid(), SpectrumUnit::kPhotonRadiance, {3e17, 3e17, 3e17, 3e17});
  const double L = luminance_cd_m2(px);
  EXPECT_NEAR(irr.mean_illuminance_lux / (std::numbers::pi * L / 65.0), 1.0, 1e-6);
}

TEST(Optics, TransmissionSpectrumOverridesScalar) {
  LensSpec lens;
  lens.transmission = 1.0;
  lens.transmission_spectrum = Spectrum(WavelengthGrid(400, 100, 4), SpectrumUnit::kDimensionless, {0.1, 0.2, 0.3, 0.4});
  const Scene s = uniform_scene(2, 2, 0.75, 1e18f);
  const IrradianceCube irr = radiance_to_irradiance(s, lens);
  const auto px = irr.cube.pixel(0, 0);
  for (std::size_t k = 0; k < 4; ++k) {
    EXPECT_NEAR(px[k] / (std::numbers::pi * 0.1 * (k + 1) * 1e18 / 65.0), 1.0, 1e-6);
  }
}

TEST(Optics, Cos4FalloffDimsCorners) {
  LensSpec lens;
  lens.cos4_falloff = true;
  const Scene s = uniform_scene(64, 64, 20.0, 1e18f);
  const IrradianceCube irr = radiance_to_irradiance(s, lens);
  const double centre = irr.cube.pixel(32, 32)[0];
  const double corner = irr.cube.pixel(0, 0)[0];
  auto cos4 = [](double dx_um, double dy_um) {
    const double f = 6000.0;
    const double c2 = f * f / (f * f + dx_um * dx_um + dy_um * dy_um);
    return c2 * c2;
  };
  // Pixel centres: corner at (-31.5, -31.5) cells, "centre" at (0.5, 0.5).
  EXPECT_NEAR(corner / centre, cos4(630.0, 630.0) / cos4(10.0, 10.0), 1e-5);
  EXPECT_LT(corner, centre);
}

TEST(Optics, KernelIsNormalizedAndSymmetric) {
  for (double pitch : {0.25, 0.375, 0.75}) {
    const auto k = gaussian_kernel(1.5, pitch);
    double sum = 0.0;
    for (double v : k) sum += v;
    EXPECT_NEAR(sum, 1.0, 1e-12);
    for (std::size_t i = 0; i < k.size(); ++i) EXPECT_DOUBLE_EQ(k[i], k[k.size() - 1 - i]);
    const double sigma = 1.5 / (2.0 * std::sqrt(2.0 * std::log(2.0))) / pitch;
    EXPECT_EQ(k.size(), 2 * static_cast<std::size_t>(std::ceil(4.0 * sigma)) + 1);
  }
}

TEST(Optics, PsfConservesFluxIncludingAtEdges) {
  LensSpec lens;
  for (std::size_t pos : {0ul, 1ul, 20ul}) {
    IrradianceCube irr;
    irr.cube = SpectralCube(41, 41, WavelengthGrid(550, 10, 1), SpectrumUnit::kPhotonIrradiance, 0.375);
    irr.cube.pixel(pos, pos)[0] = 1.0f;
    const IrradianceCube out = apply_psf(irr, lens);
    EXPECT_NEAR(total(out.cube), 1.0, 1e-6) << pos;
  }
}

TEST(Optics, PsfSecondMomentMatchesSigma) {
  LensSpec lens;
  const double pitch = 0.375;
  const IrradianceCube out = apply_psf(impulse(61, pitch), lens);
  double m2 = 0.0, m0 = 0.0;
  for (std::size_t c = 0; c < 61; ++c) {
    double col = 0.0;
    for (std::size_t r = 0; r < 61; ++r) col += out.cube.pixel(r, c)[0];
    const double x = (static_cast<double>(c) - 30.0) * pitch;
    m0 += col;
    m2 += col * x * x;
  }
  const double sigma_um = 1.5 / (2.0 * std::sqrt(2.0 * std::log(2.0)));
  EXPECT_NEAR(std::sqrt(m2 / m0) / sigma_um, 1.0, 0.01);
}

TEST(Optics, UniformFieldUnchangedByPsf) {
  LensSpec lens;
  const Scene s = uniform_scene(32, 32, 0.375, 1e18f);
  const IrradianceCube irr = radiance_to_irradiance(s, lens);
  const IrradianceCube out = apply_psf(irr, lens);
  for (std::size_t i = 0; i < out.cube.data().size(); ++i) {
    EXPECT_NEAR(out.cube.data()[i] / irr.cube.data()[i], 1.0, 1e-6);
  }
}

TEST(Optics, CoarseGridSkipsBlurWithWarning) {
  LensSpec lens;
  const IrradianceCube in = impulse(9, 1.0);
  const IrradianceCube out = apply_psf(in, lens);
  EXPECT_EQ(out.cube, in.cube);
  ASSERT_EQ(out.warnings.size(), 1u);
}

TEST(Optics, InvalidLensRejected) {
  LensSpec lens;
  lens.f_number = 0.3;
  EXPECT_THROW(lens.validate(), Error);
  lens = LensSpec{};
  lens.transmission = 1.5;
  EXPECT_THROW(lens.validate(), Error);
}

TEST(Optics, JsonRoundTrip) {
  LensSpec lens;
  lens.f_number = 2.0;
  lens.cos4_falloff = true;
  const nlohmann::json j = lens;
  EXPECT_EQ(nlohmann::json(j.get<LensSpec>()), j);
}
