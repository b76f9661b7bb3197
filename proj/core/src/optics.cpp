#include "camsim/optics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "camsim/error.hpp"
#include "camsim/parallel.hpp"

namespace camsim {

void LensSpec::validate() const {
  if (!(f_number > 0.5)) throw Error(ErrorCode::kInvalidArgument, "f_number must exceed 0.5");
  if (!(focal_length_mm > 0.0)) throw Error(ErrorCode::kInvalidArgument, "focal_length_mm must be positive");
  if (!(psf_fwhm_um > 0.0)) throw Error(ErrorCode::kInvalidArgument, "psf_fwhm_um must be positive");
  if (transmission < 0.0 || transmission > 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "transmission must lie in [0, 1]");
  }
}

double mean_illuminance_lux(const SpectralCube& cube) {
  const auto w = photon_luminous_weights(cube.grid());
  const std::size_t nb = cube.bands();
  const std::size_t n = cube.rows() * cube.cols();
  if (n == 0) return 0.0;
  double total = 0.0;
  const float* d = cube.data().data();
  for (std::size_t p = 0; p < n; ++p) {
    double s = 0.0;
    for (std::size_t k = 0; k < nb; ++k) s += w[k] * d[p * nb + k];
    total += s;
  }
  return total / static_cast<double>(n);
}

IrradianceCube radiance_to_irradiance(const Scene& scene, const LensSpec& lens) {
  lens.validate();
  const auto& L = scene.radiance;
  const std::size_t nb = L.bands();
  std::vector<double> gain(nb, lens.transmission);
  if (lens.transmission_spectrum) {
    const Spectrum t = resample(*lens.transmission_spectrum, L.grid());
    for (std::size_t k = 0; k < nb; ++k) gain[k] = t[k];
  }
  const double N = lens.f_number;
  for (auto& g : gain) g *= std::numbers::pi / (1.0 + 4.0 * N * N);

  IrradianceCube out;
  out.cube = SpectralCube(L.rows(), L.cols(), L.grid(), SpectrumUnit::kPhotonIrradiance, L.pitch_um());
  const double cy = 0.5 * static_cast<double>(L.rows());
  const double cx = 0.5 * static_cast<double>(L.cols());
  const double f_um = lens.focal_length_mm * 1000.0;
  parallel_for(L.rows(), [&](std::size_t r) {
    for (std::size_t c = 0; c < L.cols(); ++c) {
      double falloff = 1.0;
      if (lens.cos4_falloff) {
        const double dx = (static_cast<double>(c) + 0.5 - cx) * L.pitch_um();
        const double dy = (static_cast<double>(r) + 0.5 - cy) * L.pitch_um();
        const double cos2 = f_um * f_um / (f_um * f_um + dx * dx + dy * dy);
        falloff = cos2 * cos2;
      }
      auto src = L.pixel(r, c);
      auto dst = out.cube.pixel(r, c);
      for (std::size_t k = 0; k < nb; ++k) {
        dst[k] = static_cast<float>(gain[k] * falloff * src[k]);
      }
    }
  });
  out.mean_illuminance_lux = mean_illuminance_lux(out.cube);
  return out;
}

std::vector<double> gaussian_kernel(double fwhm_um, double pitch_um) {
  const double sigma = fwhm_um / (2.0 * std::sqrt(2.0 * std::numbers::ln2)) / pitch_um;
  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  std::vector<double> k(2 * static_cast<std::size_t>(radius) + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double v = std::exp(-0.5 * (i * i) / (sigma * sigma));
    k[static_cast<std::size_t>(i + radius)] = v;
    sum += v;
  }
  for (auto& v : k) v /= sum;
  return k;
}

namespace {

// Half-sample symmetric reflection: ... 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
// Every source sample contributes its full kernel weight, so flux is kept.
std::size_t reflect(long i, long n) {
  const long period = 2 * n;
  long m = i % period;
  if (m < 0) m += period;
  return static_cast<std::size_t>(m < n ? m : period - 1 - m);
}

}  // namespace

namespace {

// The vertical pass only reads the intermediate buffer, so the result can
// overwrite the input cube.
void psf_in_place(IrradianceCube& out, const LensSpec& lens) {
  lens.validate();
  const double pitch = out.cube.pitch_um();
  if (pitch > lens.psf_fwhm_um / 2.0) {
    out.warnings.push_back("grid pitch " + std::to_string(pitch) + " um exceeds PSF FWHM/2; blur skipped");
    return;
  }
  const auto kernel = gaussian_kernel(lens.psf_fwhm_um, pitch);
  const long radius = static_cast<long>(kernel.size() / 2);
  const std::size_t H = out.cube.rows(), W = out.cube.cols(), nb = out.cube.bands();
  const float* src = out.cube.data().data();

  // Horizontal pass into a double buffer, vertical pass back to float. Each
  // tap is one contiguous multiply-add over a (reflect-padded) row.
  const std::size_t row_len = W * nb;
  std::vector<double> tmp(H * row_len, 0.0);
  parallel_for(H, [&](std::size_t r) {
    std::vector<double> padded((W + 2 * static_cast<std::size_t>(radius)) * nb);
    for (long c = -radius; c < static_cast<long>(W) + radius; ++c) {
      const float* px = src + (r * W + reflect(c, static_cast<long>(W))) * nb;
      std::copy(px, px + nb, padded.begin() + (c + radius) * static_cast<long>(nb));
    }
    double* acc = tmp.data() + r * row_len;
    for (long t = 0; t <= 2 * radius; ++t) {
      const double w = kernel[static_cast<std::size_t>(t)];
      const double* p = padded.data() + static_cast<std::size_t>(t) * nb;
      for (std::size_t j = 0; j < row_len; ++j) acc[j] += w * p[j];
    }
  });
  float* dst = out.cube.data().data();
  parallel_for(H, [&](std::size_t r) {
    std::vector<double> acc(row_len, 0.0);
    for (long t = -radius; t <= radius; ++t) {
      const std::size_t rr = reflect(static_cast<long>(r) + t, static_cast<long>(H));
      const double w = kernel[static_cast<std::size_t>(t + radius)];
      const double* p = tmp.data() + rr * row_len;
      for (std::size_t j = 0; j < row_len; ++j) acc[j] += w * p[j];
    }
    for (std::size_t j = 0; j < row_len; ++j) dst[r * row_len + j] = static_cast<float>(acc[j]);
  });
  out.mean_illuminance_lux = mean_illuminance_lux(out.cube);
}

}  // namespace

IrradianceCube apply_psf(const IrradianceCube& in, const LensSpec& lens) {
  IrradianceCube out = in;
  psf_in_place(out, lens);
  return out;
}

IrradianceCube sensor_irradiance(const Scene& scene, const LensSpec& lens) {
  IrradianceCube irr = radiance_to_irradiance(scene, lens);
  psf_in_place(irr, lens);
  return irr;
}

void to_json(nlohmann::json& j, const LensSpec& l) {
  j = nlohmann::json{{"focal_length_mm", l.focal_length_mm},
                     {"f_number", l.f_number},
                     {"fov_deg", l.fov_deg},
                     {"transmission", l.transmission},
                     {"psf_fwhm_um", l.psf_fwhm_um},
                     {"cos4_falloff", l.cos4_falloff}};
  if (l.transmission_spectrum) j["transmission"] = *l.transmission_spectrum;
}

void from_json(const nlohmann::json& j, LensSpec& l) {
  l = LensSpec{};
  l.focal_length_mm = j.value("focal_length_mm", l.focal_length_mm);
  l.f_number = j.value("f_number", l.f_number);
  l.fov_deg = j.value("fov_deg", l.fov_deg);
  if (j.contains("transmission")) {
    const auto& t = j.at("transmission");
    if (t.is_number()) {
      l.transmission = t.get<double>();
    } else {
      l.transmission_spectrum = t.get<Spectrum>();
    }
  }
  l.psf_fwhm_um = j.value("psf_fwhm_um", l.psf_fwhm_um);
  l.cos4_falloff = j.value("cos4_falloff", l.cos4_falloff);
  l.validate();
}

}  // namespace camsim
