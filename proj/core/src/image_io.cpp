#include "camsim/image_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <fstream>
#include <sstream>

#include "camsim/error.hpp"

namespace camsim {

namespace fs = std::filesystem;

void write_ppm(const Image& img, const fs::path& path) {
  if (img.channels != 1 && img.channels != 3) {
    throw Error(ErrorCode::kInvalidArgument, "PPM output needs 1 or 3 channels");
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  f << (img.channels == 3 ? "P6" : "P5") << '\n' << img.cols << ' ' << img.rows << "\n255\n";
  std::vector<char> bytes(img.data.size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const double v = std::isfinite(img.data[i]) ? std::clamp(img.data[i], 0.0, 1.0) : 0.0;
    bytes[i] = static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0)));
  }
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

namespace {

// Reads one whitespace-delimited header token, skipping '#' comments.
std::string header_token(std::istream& in) {
  std::string tok;
  while (in >> tok) {
    if (tok[0] != '#') return tok;
    std::string rest;
    std::getline(in, rest);
  }
  throw Error(ErrorCode::kTruncatedPayload, "image header ended early");
}

}  // namespace

Image read_ppm(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  const std::string magic = header_token(f);
  if (magic != "P6" && magic != "P5") throw Error(ErrorCode::kBadMagic, "not a binary PPM/PGM: " + path.string());
  const auto cols = std::stoul(header_token(f));
  const auto rows = std::stoul(header_token(f));
  const auto maxval = std::stoul(header_token(f));
  if (maxval != 255) throw Error(ErrorCode::kInvalidArgument, "only 8-bit PPM is supported");
  f.get();
  Image img(rows, cols, magic == "P6" ? 3 : 1, ColorSpace::kSRGBEncoded);
  std::vector<char> bytes(img.data.size());
  f.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (f.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw Error(ErrorCode::kTruncatedPayload, "PPM payload shorter than header dimensions");
  }
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    img.data[i] = static_cast<unsigned char>(bytes[i]) / 255.0;
  }
  return img;
}

void write_pfm(const Image& img, const fs::path& path) {
  if (img.channels != 1 && img.channels != 3) {
    throw Error(ErrorCode::kInvalidArgument, "PFM output needs 1 or 3 channels");
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  f << (img.channels == 3 ? "PF" : "Pf") << '\n' << img.cols << ' ' << img.rows << "\n-1.0\n";
  const std::size_t stride = img.cols * img.channels;
  std::vector<char> bytes(img.data.size() * 4);
  std::size_t o = 0;
  for (std::size_t r = img.rows; r-- > 0;) {
    for (std::size_t i = 0; i < stride; ++i) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(img.data[r * stride + i]));
      for (int b = 0; b < 4; ++b) bytes[o++] = static_cast<char>((bits >> (8 * b)) & 0xFF);
    }
  }
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

Image read_pfm(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  const std::string magic = header_token(f);
  if (magic != "PF" && magic != "Pf") throw Error(ErrorCode::kBadMagic, "not a PFM file: " + path.string());
  const auto cols = std::stoul(header_token(f));
  const auto rows = std::stoul(header_token(f));
  const double scale = std::stod(header_token(f));
  if (scale >= 0.0) throw Error(ErrorCode::kInvalidArgument, "only little-endian PFM is supported");
  f.get();
  Image img(rows, cols, magic == "PF" ? 3 : 1, ColorSpace::kLinearSRGB);
  const std::size_t stride = cols * img.channels;
  std::vector<char> bytes(img.data.size() * 4);
  f.read(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (f.gcount() != static_cast<std::streamsize>(bytes.size())) {
    throw Error(ErrorCode::kTruncatedPayload, "PFM payload shorter than header dimensions");
  }
  std::size_t o = 0;
  for (std::size_t r = rows; r-- > 0;) {
    for (std::size_t i = 0; i < stride; ++i) {
      std::uint32_t bits = 0;
      for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[o++])) << (8 * b);
      img.data[r * stride + i] = std::bit_cast<float>(bits);
    }
  }
  return img;
}

}  // namespace camsim
