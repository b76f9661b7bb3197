#pragma once

#include <filesystem>

#include "camsim/isp.hpp"

namespace camsim {

/// 8-bit binary output: P6 for three channels, P5 for one. Values are
/// clamped to [0,1] and scaled to 255.
void write_ppm(const Image& img, const std::filesystem::path& path);
Image read_ppm(const std::filesystem::path& path);

/// Little-endian PFM (scale −1), rows stored bottom-up. "PF" or "Pf".
void write_pfm(const Image& img, const std::filesystem::path& path);
Image read_pfm(const std::filesystem::path& path);

}  // namespace camsim
