#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>

#include "stereo/error.hpp"
#include "stereo/io.hpp"
#include "test_util.hpp"

using namespace stereo;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return Errc::IoFailure;
}

std::string float_bytes(float f, bool big_endian) {
  char b[4];
  std::memcpy(b, &f, 4);
  if (big_endian) std::swap(b[0], b[3]), std::swap(b[1], b[2]);
  return std::string(b, 4);
}

}  // namespace

TEST(Pgm, RoundTrip) {
  const GrayImage img = stereo::testing::random_image(13, 7, 1);
  EXPECT_EQ(decode_pgm(encode_pgm(img)), img);
}

TEST(Pgm, ParsesHeaderComments) {
  const std::string bytes = std::string("P5\n# made by hand\n2 1\n255\n") + char(7) + char(250);
  const GrayImage img = decode_pgm(bytes);
  EXPECT_EQ(img.width(), 2);
  EXPECT_EQ(img(0, 0), 7);
  EXPECT_EQ(img(1, 0), 250);
}

TEST(Pgm, Errors) {
  EXPECT_EQ(code_of([] { decode_pgm("P5\n2 2\n65535\n"); }), Errc::UnsupportedFormat);
  EXPECT_EQ(code_of([] { decode_pgm("P2\n2 2\n255\n"); }), Errc::UnsupportedFormat);
  EXPECT_EQ(code_of([] { decode_pgm("P5\n2 2\n255\nab"); }), Errc::TruncatedData);
  EXPECT_EQ(code_of([] { decode_pgm("P5\nxx 2\n255\n"); }), Errc::MalformedHeader);
  EXPECT_EQ(code_of([] { decode_pgm(""); }), Errc::MalformedHeader);
}

TEST(Ppm, RoundTrip) {
  RgbImage img(5, 4);
  for (int i = 0; i < 20; ++i) img.data()[i] = Rgb{std::uint8_t(i), std::uint8_t(2 * i), std::uint8_t(255 - i)};
  EXPECT_EQ(decode_ppm(encode_ppm(img)), img);
}

TEST(Pfm, RoundTripKeepsNaN) {
  FloatImage img(4, 3);
  for (int i = 0; i < 12; ++i) img.data()[i] = 0.25f * i - 1.0f;
  img(2, 1) = std::nanf("");
  const FloatImage back = decode_pfm(encode_pfm(img));
  for (int i = 0; i < 12; ++i) {
    if (std::isnan(img.data()[i]))
      EXPECT_TRUE(std::isnan(back.data()[i]));
    else
      EXPECT_EQ(back.data()[i], img.data()[i]);
  }
}

TEST(Pfm, HandBuiltBigEndianFileIsBottomUp) {
  // 2x2, positive scale: big-endian; first stored row is the bottom image row.
  std::string bytes = "Pf\n2 2\n1.0\n";
  for (float f : {3.f, 4.f, 1.f, 2.f}) bytes += float_bytes(f, true);
  const FloatImage img = decode_pfm(bytes);
  EXPECT_EQ(img(0, 0), 1.f);
  EXPECT_EQ(img(1, 0), 2.f);
  EXPECT_EQ(img(0, 1), 3.f);
  EXPECT_EQ(img(1, 1), 4.f);
}

TEST(Pfm, EncodesLittleEndianNegativeScale) {
  FloatImage img(1, 2);
  img(0, 0) = 5.f;
  img(0, 1) = 6.f;
  const std::string bytes = encode_pfm(img);
  const std::string header = "Pf\n1 2\n-1.0\n";
  ASSERT_EQ(bytes.substr(0, header.size()), header);
  EXPECT_EQ(bytes.substr(header.size()), float_bytes(6.f, false) + float_bytes(5.f, false));
}

TEST(Pfm, ColourPfmUnsupported) {
  EXPECT_EQ(code_of([] { decode_pfm("PF\n1 1\n-1.0\n............"); }), Errc::UnsupportedFormat);
  EXPECT_EQ(code_of([] { decode_pfm("Pf\n2 2\n-1.0\nabc"); }), Errc::TruncatedData);
}

TEST(DisparityFiles, InvalidRoundTripsThroughMinusOne) {
  const auto dir = std::filesystem::temp_directory_path() / "stereo_io_test";
  std::filesystem::create_directories(dir);
  DisparityMap m(3, 2, 0, 64);
  m.set(0, 0, 12.5);
  m.set(2, 1, 63.0625);
  const std::string path = (dir / "d.pfm").string();
  save_disparity_pfm(m, path);
  EXPECT_EQ(load_pfm(path)(1, 0), -1.f);
  EXPECT_EQ(load_disparity_pfm(path, 0, 64), m);
  save_disparity_pgm(m, (dir / "d.pgm").string());
  EXPECT_EQ(load_pgm((dir / "d.pgm").string())(2, 1), 251);
  std::filesystem::remove_all(dir);
}

TEST(Files, MissingFileIsIoFailure) {
  EXPECT_EQ(code_of([] { read_file("/nonexistent/file.pgm"); }), Errc::IoFailure);
}
