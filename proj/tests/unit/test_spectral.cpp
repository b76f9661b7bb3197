#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "camsim/colorimetry.hpp"
#include "camsim/error.hpp"
#include "camsim/spectral.hpp"

using namespace camsim;

namespace {

constexpr double kH = 6.62607015e-34;
constexpr double kC = 299792458.0;

Spectrum ramp(const WavelengthGrid& g, SpectrumUnit unit) {
  std::vector<double> v(g.count);
  for (std::size_t i = 0; i < g.count; ++i) v[i] = 1.0 + 0.01 * g.wavelength(i);
  return Spectrum(g, unit, v);
}

}  // namespace

TEST(Spectral, PhotonEnergyMatchesPlanckRelation) {
  for (double nm : {400.0, 555.0, 700.0}) {
    EXPECT_NEAR(photon_energy_j(nm), kH * kC / (nm * 1e-9), 1e-30);
  }
}

TEST(Spectral, EnergyToPhotonsDividesByPhotonEnergy) {
  const WavelengthGrid g(400, 50, 7);
  const Spectrum e = ramp(g, SpectrumUnit::kEnergyRadiance);
  const Spectrum p = to_photons(e);
  EXPECT_EQ(p.unit(), SpectrumUnit::kPhotonRadiance);
  for (std::size_t i = 0; i < g.count; ++i) {
    const double lambda = g.wavelength(i) * 1e-9;
    EXPECT_NEAR(p[i] / (e[i] * lambda / (kH * kC)), 1.0, 1e-12);
  }
}

TEST(Spectral, PhotonEnergyRoundTrip) {
  const WavelengthGrid g(380, 5, 81);
  for (auto unit : {SpectrumUnit::kEnergyRadiance, SpectrumUnit::kEnergyIrradiance}) {
    const Spectrum e = ramp(g, unit);
    const Spectrum back = to_energy(to_photons(e));
    EXPECT_EQ(back.unit(), unit);
    for (std::size_t i = 0; i < g.count; ++i) EXPECT_NEAR(back[i] / e[i], 1.0, 1e-12);
  }
}

TEST(Spectral, DimensionlessSpectraPassThroughConversions) {
  const Spectrum r = Spectrum::constant(default_grid(), SpectrumUnit::kDimensionless, 0.3);
  EXPECT_EQ(to_photons(r), r);
  EXPECT_EQ(to_energy(r), r);
}

TEST(Spectral, ResampleOnSameGridIsIdentity) {
  const Spectrum s = ramp(default_grid(), SpectrumUnit::kPhotonRadiance);
  const Spectrum r = resample(s, default_grid());
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_DOUBLE_EQ(r[i], s[i]);
}

TEST(Spectral, ResampleIsExactForLinearSpectra) {
  const Spectrum s = ramp(WavelengthGrid(400, 10, 31), SpectrumUnit::kPhotonRadiance);
  const WavelengthGrid fine(403, 7, 40);
  const Spectrum r = resample(s, fine);
  for (std::size_t i = 0; i < fine.count; ++i) {
    const double nm = fine.wavelength(i);
    const double expect = nm <= 700.0 ? 1.0 + 0.01 * nm : 0.0;
    EXPECT_NEAR(r[i], expect, 1e-12) << nm;
  }
}

TEST(Spectral, ResampleDisjointGridsThrows) {
  const Spectrum s = ramp(WavelengthGrid(400, 10, 11), SpectrumUnit::kPhotonRadiance);
  try {
    resample(s, WavelengthGrid(600, 10, 5));
    FAIL() << "expected kDisjointGrids";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDisjointGrids);
  }
}

TEST(Spectral, AtInterpolatesAndIsZeroOutside) {
  const Spectrum s(WavelengthGrid(500, 10, 2), SpectrumUnit::kPhotonRadiance, {1.0, 3.0});
  EXPECT_DOUBLE_EQ(s.at(505.0), 2.0);
  EXPECT_DOUBLE_EQ(s.at(499.0), 0.0);
  EXPECT_DOUBLE_EQ(s.at(511.0), 0.0);
}

TEST(Spectral, DimensionlessValuesAboveOneRejected) {
  EXPECT_THROW(Spectrum(WavelengthGrid(500, 10, 2), SpectrumUnit::kDimensionless, {0.5, 1.01}), Error);
  EXPECT_NO_THROW(Spectrum(WavelengthGrid(500, 10, 2), SpectrumUnit::kDimensionless, {0.0, 1.0}));
}

TEST(Spectral, PhotopicPeaksAtUnityNear555) {
  EXPECT_NEAR(photopic(555.0), 1.0, 1e-4);
  EXPECT_LT(photopic(450.0), 0.05);
  EXPECT_LT(photopic(650.0), 0.12);
  EXPECT_EQ(photopic(300.0), 0.0);
  EXPECT_EQ(photopic(900.0), 0.0);
}

TEST(Spectral, PhotopicAreaMatchesCieIntegral) {
  // ∫V(λ)dλ over the visible range is 106.86 nm for the 1924 function.
  double area = 0.0;
  for (int nm = 360; nm <= 830; ++nm) area += photopic(nm);
  EXPECT_NEAR(area, 106.86, 0.5);
}

TEST(Spectral, LuminanceOfFlatEnergyRadiance) {
  const WavelengthGrid g(360, 1, 471);
  const Spectrum flat = Spectrum::constant(g, SpectrumUnit::kEnergyRadiance, 1e-3);
  double sum_v = 0.0;
  for (std::size_t i = 0; i < g.count; ++i) sum_v += photopic(g.wavelength(i));
  EXPECT_NEAR(luminance_cd_m2(flat), 683.0 * 1e-3 * sum_v, 1e-9);
}

TEST(Spectral, LuminanceIsUnitAgnostic) {
  const Spectrum e = ramp(default_grid(), SpectrumUnit::kEnergyRadiance).scaled(1e-3);
  EXPECT_NEAR(luminance_cd_m2(to_photons(e)) / luminance_cd_m2(e), 1.0, 1e-12);
}

TEST(Spectral, PhotonLuminousWeightsReproduceLuminance) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1e16);
  const WavelengthGrid g = default_grid();
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> v(g.count);
    for (auto& x : v) x = u(rng);
    const Spectrum photons(g, SpectrumUnit::kPhotonRadiance, v);
    const auto w = photon_luminous_weights(g);
    double lum = 0.0;
    for (std::size_t i = 0; i < g.count; ++i) lum += w[i] * v[i];
    EXPECT_NEAR(lum / luminance_cd_m2(photons), 1.0, 1e-12);
  }
}

TEST(Spectral, D65HitsRequestedIlluminanceOnAnyGrid) {
  for (const auto& g : {default_grid(), WavelengthGrid(400, 50, 7), WavelengthGrid(380, 5, 81)}) {
    for (double lux : {10.0, 500.0, 20000.0}) {
      EXPECT_NEAR(illuminance_lux(d65_irradiance(g, lux)) / lux, 1.0, 1e-12);
    }
  }
}

TEST(Spectral, JsonRoundTrip) {
  const Spectrum s = ramp(WavelengthGrid(400, 25, 13), SpectrumUnit::kPhotonIrradiance);
  const nlohmann::json j = s;
  EXPECT_EQ(j.get<Spectrum>(), s);
}

TEST(Spectral, InvalidGridThrows) {
  EXPECT_THROW(WavelengthGrid(400, 0, 5), Error);
  EXPECT_THROW(WavelengthGrid(400, 10, 0), Error);
}
