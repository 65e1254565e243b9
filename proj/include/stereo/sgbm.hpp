#pragma once

#include <cstdint>

#include "stereo/disparity_map.hpp"
#include "stereo/image.hpp"

namespace stereo {

/// Semi-global block matching baseline ("SGBM-lite": four aggregation
/// directions). Defaults are the tuned indoor setting.
struct SgbmParams {
  int pre_filter_cap = 63;
  int sad_window = 7;
  int p1 = 8 * 7 * 7;
  int p2 = 32 * 7 * 7;
  int uniqueness_ratio = 15;  ///< percent; 0 disables the test
  int speckle_window = 50;    ///< px; 0 disables speckle removal
  int speckle_range = 16;     ///< px
  int disp12_max_diff = 0;    ///< px; negative disables the left-right check
  int d_min = 0;
  int d_max = 127;
  int directions = 4;         ///< first n of: left-to-right, right-to-left, top-down, diagonal
  bool subpixel = true;

  void validate() const;
  static SgbmParams for_resolution(int width, int height);
};

/// Horizontal Sobel response clamped to [-cap, cap].
Image<std::int16_t> prefilter_xsobel(const GrayImage& img, int cap);

DisparityMap block_match(const GrayImage& left, const GrayImage& right, const SgbmParams& p);

/// Invalidates 4-connected regions of similar disparity (neighbours within
/// max_diff px) containing fewer than max_size pixels.
void filter_speckles(DisparityMap& map, int max_size, int max_diff);

}  // namespace stereo
