#include <fstream>

#include <gtest/gtest.h>

#include "camsim/error.hpp"
#include "camsim/image_io.hpp"
#include "test_util.hpp"

using namespace camsim;

TEST(ImageIo, PpmRoundTripQuantizesTo8Bit) {
  camsim::testing::TempDir tmp;
  Image img(3, 5, 3, ColorSpace::kSRGBEncoded);
  for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = static_cast<double>(i) / 44.0;
  write_ppm(img, tmp / "a.ppm");
  const Image back = read_ppm(tmp / "a.ppm");
  ASSERT_EQ(back.rows, 3u);
  ASSERT_EQ(back.cols, 5u);
  ASSERT_EQ(back.channels, 3u);
  for (std::size_t i = 0; i < img.data.size(); ++i) EXPECT_NEAR(back.data[i], img.data[i], 0.5 / 255.0 + 1e-12);
}

TEST(ImageIo, PpmHeaderAndClamping) {
  camsim::testing::TempDir tmp;
  Image img(1, 2, 1, ColorSpace::kSensorLinear);
  img.data = {-1.0, 2.0};
  write_ppm(img, tmp / "g.pgm");
  std::ifstream f(tmp / "g.pgm", std::ios::binary);
  std::string magic;
  f >> magic;
  EXPECT_EQ(magic, "P5");
  const Image back = read_ppm(tmp / "g.pgm");
  EXPECT_EQ(back.data, (std::vector<double>{0.0, 1.0}));
}

TEST(ImageIo, PfmRoundTripIsFloatExact) {
  camsim::testing::TempDir tmp;
  for (std::size_t ch : {1u, 3u}) {
    Image img(4, 3, ch, ColorSpace::kLinearSRGB);
    for (std::size_t i = 0; i < img.data.size(); ++i) img.data[i] = static_cast<float>(0.1 * static_cast<double>(i) - 0.3);
    write_pfm(img, tmp / "a.pfm");
    const Image back = read_pfm(tmp / "a.pfm");
    ASSERT_EQ(back.channels, ch);
    EXPECT_EQ(back.data, img.data);
  }
}

TEST(ImageIo, PfmStoresRowsBottomUp) {
  camsim::testing::TempDir tmp;
  Image img(2, 1, 1, ColorSpace::kLinearSRGB);
  img.data = {1.0, 2.0};
  write_pfm(img, tmp / "b.pfm");
  std::ifstream f(tmp / "b.pfm", std::ios::binary);
  std::string line;
  std::getline(f, line);
  EXPECT_EQ(line, "Pf");
  std::getline(f, line);
  std::getline(f, line);
  EXPECT_EQ(std::stod(line), -1.0);
  float first = 0.0f;
  f.read(reinterpret_cast<char*>(&first), 4);
  EXPECT_EQ(first, 2.0f);
}

TEST(ImageIo, MissingOrGarbageFilesThrow) {
  camsim::testing::TempDir tmp;
  EXPECT_THROW(read_ppm(tmp / "missing.ppm"), Error);
  std::ofstream(tmp / "bad.ppm") << "P3\n1 1\n255\n0 0 0\n";
  EXPECT_THROW(read_ppm(tmp / "bad.ppm"), Error);
}
