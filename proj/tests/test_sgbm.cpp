#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "stereo/error.hpp"
#include "stereo/parallel.hpp"
#include "stereo/sgbm.hpp"
#include "test_util.hpp"

using namespace stereo;
using stereo::testing::random_image;
using stereo::testing::shift_left;
using stereo::testing::smooth_texture;

namespace {

SgbmParams wta_params(int d_max) {
  SgbmParams p;
  p.d_max = d_max;
  p.sad_window = 3;
  p.directions = 1;
  p.p1 = 0;
  p.p2 = 0;
  p.uniqueness_ratio = 0;
  p.disp12_max_diff = -1;
  p.speckle_window = 0;
  p.subpixel = false;
  return p;
}

// Winner-take-all over windowed SAD of the clamped horizontal Sobel; only
// candidates with x - d >= 0 exist.
DisparityMap oracle_wta(const GrayImage& l, const GrayImage& r, const SgbmParams& p) {
  const int w = l.width(), h = l.height(), rad = p.sad_window / 2;
  auto pref = [&](const GrayImage& img, int x, int y) {
    const int xl = std::clamp(x - 1, 0, w - 1), xr = std::clamp(x + 1, 0, w - 1);
    int s = 0;
    for (int j = -1; j <= 1; ++j) {
      const int yy = std::clamp(y + j, 0, h - 1);
      s += (j == 0 ? 2 : 1) * (img(xl, yy) - img(xr, yy));
    }
    return std::clamp(s, -p.pre_filter_cap, p.pre_filter_cap);
  };
  DisparityMap out(w, h, p.d_min, p.d_max);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      int best = INT32_MAX, best_d = -1;
      for (int d = p.d_min; d <= std::min(p.d_max, x); ++d) {
        int c = 0;
        for (int j = -rad; j <= rad; ++j)
          for (int i = -rad; i <= rad; ++i) {
            const int cx = std::clamp(x + i, 0, w - 1), cy = std::clamp(y + j, 0, h - 1);
            c += std::abs(pref(l, cx, cy) - pref(r, std::max(cx - d, 0), cy));
          }
        if (c < best) {
          best = c;
          best_d = d;
        }
      }
      if (best_d >= 0) out.set(x, y, best_d);
    }
  return out;
}

}  // namespace

TEST(Sgbm, WinnerTakeAllMatchesSadOracle) {
  for (std::uint32_t seed = 1; seed <= 3; ++seed) {
    const GrayImage l = random_image(16, 16, seed);
    const GrayImage r = random_image(16, 16, seed + 100);
    const auto p = wta_params(8);
    EXPECT_EQ(block_match(l, r, p), oracle_wta(l, r, p)) << "seed " << seed;
  }
}

TEST(Sgbm, WinnerTakeAllOnShiftedTexture) {
  const GrayImage l = random_image(24, 16, 7);
  const GrayImage r = shift_left(l, 4, 30);
  const auto p = wta_params(8);
  EXPECT_EQ(block_match(l, r, p), oracle_wta(l, r, p));
}

TEST(Sgbm, UniformShiftRecovered) {
  const GrayImage l = smooth_texture(320, 240, 5);
  const GrayImage r = shift_left(l, 12, 128);
  const auto map = block_match(l, r, SgbmParams::for_resolution(320, 240));
  int n = 0, good = 0;
  for (int y = 10; y < 230; ++y)
    for (int x = 110; x < 310; ++x) {
      ++n;
      good += map.valid(x, y) && std::abs(map.at(x, y) - 12.0f) <= 1.0f;
    }
  EXPECT_GE(good, 0.85 * n);
}

TEST(Sgbm, ConstantImagesAreMostlyInvalid) {
  const GrayImage c(200, 60, 100);
  const auto map = block_match(c, c, SgbmParams::for_resolution(200, 60));
  EXPECT_LE(map.valid_count(), std::size_t(0.01 * 200 * 60));
}

TEST(Sgbm, StricterUniquenessNeverAddsPixels) {
  const GrayImage l = smooth_texture(160, 80, 9);
  GrayImage r = shift_left(l, 6, 128);
  r = stereo::testing::fill_rect(r, 40, 20, 30, 30, 128);
  SgbmParams p = SgbmParams::for_resolution(160, 80);
  p.d_max = 40;
  p.speckle_window = 0;
  std::size_t prev = SIZE_MAX;
  DisparityMap prev_map;
  for (int u : {0, 5, 15, 30, 60}) {
    p.uniqueness_ratio = u;
    const auto m = block_match(l, r, p);
    EXPECT_LE(m.valid_count(), prev);
    if (prev != SIZE_MAX)
      for (int y = 0; y < 80; ++y)
        for (int x = 0; x < 160; ++x)
          if (m.valid(x, y)) EXPECT_TRUE(prev_map.valid(x, y));
    prev = m.valid_count();
    prev_map = m;
  }
}

TEST(Sgbm, OutputsLieInRange) {
  const GrayImage l = random_image(120, 40, 1), r = random_image(120, 40, 2);
  SgbmParams p;
  p.d_min = 4;
  p.d_max = 30;
  const auto m = block_match(l, r, p);
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 120; ++x)
      if (m.valid(x, y)) {
        EXPECT_GE(m.at(x, y), 4.0f);
        EXPECT_LE(m.at(x, y), 30.0f);
        EXPECT_LE(m.at(x, y), float(x) + 0.5f);
      }
}

TEST(Sgbm, TooSmallImageThrows) {
  try {
    block_match(GrayImage(100, 50), GrayImage(100, 50), SgbmParams{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::ImageTooSmall);
  }
}

TEST(Sgbm, SizeMismatchThrows) {
  EXPECT_THROW(block_match(GrayImage(200, 50), GrayImage(201, 50), SgbmParams{}), Error);
}

TEST(Sgbm, ParameterValidation) {
  SgbmParams p;
  p.sad_window = 4;
  EXPECT_THROW(p.validate(), Error);
  p = SgbmParams{};
  p.p2 = p.p1 - 1;
  EXPECT_THROW(p.validate(), Error);
  p = SgbmParams{};
  p.uniqueness_ratio = 101;
  EXPECT_THROW(p.validate(), Error);
  EXPECT_EQ(SgbmParams::for_resolution(640, 480).d_max, 127);
  EXPECT_EQ(SgbmParams::for_resolution(320, 240).d_max, 95);
}

TEST(Sgbm, DeterministicAcrossThreadCaps) {
  const GrayImage l = smooth_texture(200, 100, 3);
  const GrayImage r = shift_left(l, 7, 128);
  SgbmParams p;
  p.d_max = 40;
  set_thread_cap(1);
  const auto a = block_match(l, r, p);
  set_thread_cap(3);
  const auto b = block_match(l, r, p);
  set_thread_cap(0);
  EXPECT_EQ(a, b);
}

TEST(SpeckleFilter, RemovesSmallRegionsOnly) {
  DisparityMap m(20, 20, 0, 60);
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 20; ++x) m.set(x, y, 10.0);
  // A 3x3 island at disparity 40 inside the plane.
  for (int y = 5; y < 8; ++y)
    for (int x = 5; x < 8; ++x) m.set(x, y, 40.0);
  filter_speckles(m, 10, 2);
  for (int y = 5; y < 8; ++y)
    for (int x = 5; x < 8; ++x) EXPECT_FALSE(m.valid(x, y));
  EXPECT_EQ(m.valid_count(), 400u - 9u);
}

TEST(SpeckleFilter, RangeJoinsGradualRamps) {
  DisparityMap m(30, 1, 0, 60);
  for (int x = 0; x < 30; ++x) m.set(x, 0, 1.0 + x);
  DisparityMap strict = m;
  filter_speckles(m, 20, 1);
  EXPECT_EQ(m.valid_count(), 30u);
  filter_speckles(strict, 2, 0);
  EXPECT_EQ(strict.valid_count(), 0u);
}

TEST(Prefilter, ClampsSobel) {
  GrayImage img(6, 3, 0);
  for (int y = 0; y < 3; ++y) img(3, y) = 255;
  const auto g = prefilter_xsobel(img, 63);
  EXPECT_EQ(g(2, 1), -63);
  EXPECT_EQ(g(4, 1), 63);
  EXPECT_EQ(g(0, 1), 0);
}
