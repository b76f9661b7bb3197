#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "camsim/spectral.hpp"

namespace camsim {

/// H×W×Nλ raster stored [row][col][wave]. `pitch_um` is the physical spacing
/// of grid cells on the sensor-conjugate plane.
class SpectralCube {
 public:
  SpectralCube() = default;
  SpectralCube(std::size_t rows, std::size_t cols, WavelengthGrid grid, SpectrumUnit unit,
               double pitch_um)
      : rows_(rows), cols_(cols), grid_(grid), unit_(unit), pitch_um_(pitch_um),
        data_(rows * cols * grid.count, 0.0f) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t bands() const noexcept { return grid_.count; }
  const WavelengthGrid& grid() const noexcept { return grid_; }
  SpectrumUnit unit() const noexcept { return unit_; }
  void set_unit(SpectrumUnit u) noexcept { unit_ = u; }
  double pitch_um() const noexcept { return pitch_um_; }

  std::span<float> pixel(std::size_t r, std::size_t c) {
    return {data_.data() + (r * cols_ + c) * grid_.count, grid_.count};
  }
  std::span<const float> pixel(std::size_t r, std::size_t c) const {
    return {data_.data() + (r * cols_ + c) * grid_.count, grid_.count};
  }

  std::vector<float>& data() noexcept { return data_; }
  const std::vector<float>& data() const noexcept { return data_; }

  /// Spatial mean spectrum.
  Spectrum mean_spectrum() const;

  friend bool operator==(const SpectralCube&, const SpectralCube&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  WavelengthGrid grid_;
  SpectrumUnit unit_ = SpectrumUnit::kPhotonRadiance;
  double pitch_um_ = 1.0;
  std::vector<float> data_;
};

}  // namespace camsim
