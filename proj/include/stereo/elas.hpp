#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "stereo/delaunay.hpp"
#include "stereo/disparity_map.hpp"
#include "stereo/image.hpp"

namespace stereo {

/// Tunables of the support-point + MAP matcher.
struct ElasParams {
  int grid_step = 5;                ///< support grid spacing, px
  double support_ratio = 0.9;       ///< max best/second-best descriptor distance
  int consistency_tolerance = 1;    ///< left-right re-match tolerance, px
  int min_support_texture = 16;     ///< min sum of |descriptor| at a support node
  int support_window = 1;           ///< neighbourhood for the agreement check, grid cells; 0 disables it
  int support_agreement = 2;        ///< max disparity difference of an agreeing neighbour, px
  int min_support_neighbours = 3;   ///< agreeing neighbours a support needs to survive
  double gamma = 0.05;              ///< uniform floor weight of the prior
  double sigma = 3.0;               ///< prior width, px
  double beta = 0.03;               ///< likelihood scale per descriptor L1 unit
  int d_min = 0;
  int d_max = 95;
  int lr_tolerance = 2;             ///< dense left-right check, px; negative disables it
  bool left_only = true;            ///< post-process only the left map
  bool subsample = false;           ///< infer on the even-pixel grid, upsample afterwards
  bool subpixel = true;             ///< parabola refinement of the MAP disparity
  double speckle_tolerance = 2.0;   ///< max deviation from the 3x3 median, px
  int gap_width = 7;                ///< longest horizontal hole filled by interpolation, px

  void validate() const;

  /// 640-wide input: range [0,127] with subsampling; smaller: [0,95] without.
  static ElasParams for_resolution(int width, int height);
};

/// Per-pixel descriptor: 3x3 Sobel responses (horizontal then vertical) at
/// eight fixed offsets of the 5x5 neighbourhood, each scaled by 1/4 and
/// saturated to [-127, 127]. Stored biased by +128 so that L1 distances can
/// be taken on unsigned bytes.
class DescriptorField {
 public:
  static constexpr int kLength = 16;
  static constexpr int kOffsets[8][2] = {{0, -2}, {-1, -1}, {1, -1}, {-2, 0},
                                         {0, 0},  {2, 0},   {-1, 1}, {1, 1}};

  DescriptorField() = default;
  DescriptorField(int width, int height)
      : width_(width), height_(height), bytes_(std::size_t(width) * height * kLength, 128) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }

  const std::uint8_t* at(int x, int y) const noexcept {
    return bytes_.data() + (std::size_t(y) * width_ + x) * kLength;
  }
  std::uint8_t* at(int x, int y) noexcept { return bytes_.data() + (std::size_t(y) * width_ + x) * kLength; }

  /// Signed saturated response k of the descriptor at (x, y).
  int value(int x, int y, int k) const noexcept { return int(at(x, y)[k]) - 128; }

  friend bool operator==(const DescriptorField&, const DescriptorField&) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> bytes_;
};

struct SupportPoint {
  int u = 0;
  int v = 0;
  int d = 0;
  friend bool operator==(const SupportPoint&, const SupportPoint&) = default;
};

/// Raw 3x3 Sobel responses with replicated borders. The horizontal kernel is
/// [1 0 -1; 2 0 -2; 1 0 -1], the vertical one its transpose.
Image<std::int16_t> sobel_horizontal(const GrayImage& img);
Image<std::int16_t> sobel_vertical(const GrayImage& img);

DescriptorField compute_descriptors(const GrayImage& img);

/// L1 distance between two descriptors.
int descriptor_distance(const std::uint8_t* a, const std::uint8_t* b) noexcept;

/// Keeps supports with at least min_support_neighbours other supports within
/// support_window grid cells whose disparity differs by at most support_agreement.
std::vector<SupportPoint> filter_isolated_supports(std::span<const SupportPoint> supports, const ElasParams& p);
/// Ratio test, left-right re-match, then filter_isolated_supports.
std::vector<SupportPoint> extract_support_points(const DescriptorField& left, const DescriptorField& right,
                                                 const ElasParams& p);

/// Triangulation of the supports plus the four image corners (d = d_min).
Triangulation support_triangulation(std::span<const SupportPoint> supports, int width, int height);

/// Piecewise-linear interpolation of support disparities over their Delaunay
/// triangulation; the prior mean at every pixel.
FloatImage support_prior_mean(std::span<const SupportPoint> supports, int width, int height, const ElasParams& p);

/// Negative log prior of disparity d given prior mean mu:
///   -log(gamma + (1 - gamma) * exp(-(d - mu)^2 / (2 sigma^2)))  if |d - mu| <= 3 sigma
///   -log(gamma)                                                 otherwise
double prior_penalty(int d, double mu, const ElasParams& p) noexcept;

/// Per-pixel MAP disparity. Energy E(d) = beta * L1(d) + prior_penalty(d, mu);
/// candidates are [d_min, min(d_max, u)], the smallest energy wins with ties
/// going to the smaller disparity, followed by optional parabola refinement.
DisparityMap dense_disparity(const DescriptorField& left, const DescriptorField& right,
                             std::span<const SupportPoint> supports, const ElasParams& p);

/// Same inference with an explicit prior-mean field.
DisparityMap dense_disparity(const DescriptorField& left, const DescriptorField& right, const FloatImage& prior_mean,
                             const ElasParams& p);

/// MAP inference for the right view: the match of right (u, v) is left (u + d, v).
DisparityMap dense_disparity_right(const DescriptorField& left, const DescriptorField& right,
                                   const FloatImage& prior_mean, const ElasParams& p);

/// Supports moved to their right-image position (u - d, v); on collisions the
/// larger disparity is kept, points on the image border are dropped.
std::vector<SupportPoint> right_view_supports(std::span<const SupportPoint> supports, int width);

/// Speckle invalidation, horizontal gap filling, then upsampling of the even
/// grid when subsample is set.
DisparityMap postprocess(const DisparityMap& map, const ElasParams& p);

/// Invalidates left pixels whose right-view disparity disagrees by more than
/// the tolerance.
void left_right_check(DisparityMap& left, const DisparityMap& right, int tolerance);

struct ElasPair {
  DisparityMap left;
  DisparityMap right;  ///< right-view map; post-processed only when left_only is off
};

/// Full matcher: descriptors, supports, MAP inference for both views, the
/// left-right check and postprocessing. Frames without any support yield
/// all-invalid maps.
ElasPair compute_elas_pair(const GrayImage& left, const GrayImage& right, const ElasParams& p);
DisparityMap compute_elas(const GrayImage& left, const GrayImage& right, const ElasParams& p);

GrayImage mirror_horizontal(const GrayImage& img);

}  // namespace stereo
