#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "stereo/geometry.hpp"
#include "stereo/image.hpp"

namespace stereo {

struct SegParams {
  int blur_size = 5;
  double blur1_sigma = 1.5;
  int threshold = 50;  ///< 8-bit disparity scale
  int dilations = 4;
  double blur2_sigma = 2.0;
  int erosions = 2;
  int u_plus = 20;
  int u_minus = 10;
  int min_blob_area = 20 * 20;
  int roi_margin = 20;
  int buffer_len = 3;

  void validate() const;
  /// Minimum blob side scales with image width: 20 px at 320, 40 px at 640.
  static SegParams for_resolution(int width, int height);
};

struct Rect {
  int x = 0, y = 0, w = 0, h = 0;
  friend bool operator==(const Rect&, const Rect&) = default;
};

struct Blob {
  Mask mask;  ///< full image size
  int area = 0;
  std::uint8_t seed_value = 0;
  GridPoint seed;
  Vec2 centroid = Vec2::Zero();
  Rect bbox;
  double mean_value = 0.0;
};

/// Corners of a region of interest, (x1, y1) exclusive; fractional after averaging.
struct RoiBox {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

struct SmoothedTarget {
  Vec2 centroid = Vec2::Zero();
  RoiBox roi;
};

struct SegResult {
  std::optional<Blob> blob;
  bool missed = true;
  Vec2 centroid = Vec2::Zero();
  Rect roi;
  std::optional<SmoothedTarget> smoothed;
};

struct BlobGeometry {
  Vec2 centroid = Vec2::Zero();
  Rect roi;
};

/// 1-D Gaussian weights quantized to integers summing to 256.
std::vector<int> gaussian_kernel_q8(double sigma, int size);
/// Separable fixed-point Gaussian, replicated borders, round half up.
GrayImage gaussian_blur(const GrayImage& img, double sigma, int size);
/// 3x3 rectangular max / min filters applied n times; pixels outside the image are ignored.
GrayImage dilate(const GrayImage& img, int iterations);
GrayImage erode(const GrayImage& img, int iterations);

/// blur(sigma1) -> zero below threshold -> dilate x4 -> blur(sigma2) -> erode x2.
GrayImage preprocess(const GrayImage& disparity8, const SegParams& p);

/// Accepted region-growing values for a seed of value v: [v - v/u_minus, v + v/u_plus].
std::pair<double, double> growth_interval(int v, const SegParams& p);

/// Brightest-pixel region growing with size gating. nullopt means missed.
std::optional<Blob> select_foremost_blob(const GrayImage& filtered, const SegParams& p);

/// Number of 4-connected components of a mask.
int count_components(const Mask& mask);

/// Centroid and margin-expanded, clamped bounding box. Throws
/// MultipleComponents unless the mask is a single component.
BlobGeometry centroid_roi(const Blob& blob, const SegParams& p, int width, int height);

/// Mean centroid and ROI corners over the non-missed entries; nullopt if all missed.
std::optional<SmoothedTarget> temporal_smooth(std::span<const SegResult> buffer);

/// All 4-connected regions of pixels >= threshold with area >= min_area,
/// nearest (highest mean value) first.
std::vector<Blob> segment_by_threshold(const GrayImage& disparity8, int threshold, int min_area);

/// Builds a blob from its pixel list (indices y * width + x).
Blob make_blob(const GrayImage& values, std::span<const int> pixels);

/// Stateful per-sequence segmenter holding the temporal buffer.
class ForemostSegmenter {
 public:
  explicit ForemostSegmenter(SegParams p);

  SegResult process(const GrayImage& disparity8);
  void reset() { history_.clear(); }
  const SegParams& params() const noexcept { return params_; }

 private:
  SegParams params_;
  std::deque<SegResult> history_;
};

}  // namespace stereo
