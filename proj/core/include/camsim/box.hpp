#pragma once

#include <algorithm>

namespace camsim {

/// Axis-aligned box in sensor pixels, [x_min, x_max) × [y_min, y_max).
struct Box {
  double x_min = 0, y_min = 0, x_max = 0, y_max = 0;

  double width() const noexcept { return x_max - x_min; }
  double height() const noexcept { return y_max - y_min; }
  double area() const noexcept { return std::max(0.0, width()) * std::max(0.0, height()); }
  bool valid() const noexcept { return x_max > x_min && y_max > y_min; }

  friend bool operator==(const Box&, const Box&) = default;
};

}  // namespace camsim
