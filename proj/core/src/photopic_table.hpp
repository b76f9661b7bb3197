#pragma once

#include <array>
#include <cstddef>

namespace camsim::detail {

inline constexpr double kPhotopicStartNm = 380.0;
inline constexpr std::size_t kPhotopicCount = 401;  // 380..780 nm, 1 nm

extern const std::array<double, kPhotopicCount> kPhotopic1nm;

}  // namespace camsim::detail
