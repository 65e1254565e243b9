#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "stereo/image.hpp"

namespace stereo {

/// Per-pixel disparity in 1/16 px fixed point. Invalid pixels hold exactly
/// kInvalid; every other value lies in [d_min, d_max].
class DisparityMap {
 public:
  static constexpr int kScale = 16;
  static constexpr std::int16_t kInvalid = -1;

  DisparityMap() = default;
  DisparityMap(int width, int height, int d_min, int d_max)
      : raw_(width, height, kInvalid), d_min_(d_min), d_max_(d_max) {}

  int width() const noexcept { return raw_.width(); }
  int height() const noexcept { return raw_.height(); }
  int d_min() const noexcept { return d_min_; }
  int d_max() const noexcept { return d_max_; }

  bool valid(int x, int y) const noexcept { return raw_(x, y) != kInvalid; }
  std::int16_t raw(int x, int y) const noexcept { return raw_(x, y); }
  void set_raw(int x, int y, std::int16_t v) noexcept { raw_(x, y) = v; }

  /// Disparity in pixels, NaN when invalid.
  float at(int x, int y) const noexcept {
    const auto v = raw_(x, y);
    return v == kInvalid ? std::nanf("") : static_cast<float>(v) / kScale;
  }

  /// Stores d rounded to the nearest 1/16 px and clamped to the range.
  void set(int x, int y, double d) noexcept { raw_(x, y) = encode(d); }
  void invalidate(int x, int y) noexcept { raw_(x, y) = kInvalid; }

  std::int16_t encode(double d) const noexcept {
    double q = std::floor(d * kScale + 0.5);
    q = std::clamp(q, double(d_min_ * kScale), double(d_max_ * kScale));
    return static_cast<std::int16_t>(q);
  }

  const Image<std::int16_t>& raw_image() const noexcept { return raw_; }
  Image<std::int16_t>& raw_image() noexcept { return raw_; }

  std::size_t valid_count() const noexcept {
    std::size_t n = 0;
    for (auto v : raw_.pixels()) n += (v != kInvalid);
    return n;
  }

  friend bool operator==(const DisparityMap&, const DisparityMap&) = default;

 private:
  Image<std::int16_t> raw_;
  int d_min_ = 0;
  int d_max_ = 0;
};

/// Float view with NaN for invalid pixels.
FloatImage to_float(const DisparityMap& map);
/// Builds a map from float disparities; NaN or negative values become invalid.
DisparityMap from_float(const FloatImage& img, int d_min, int d_max);
/// 8-bit visualization: value * 255 / d_max rounded, invalid = 0.
GrayImage to_8bit(const DisparityMap& map);

}  // namespace stereo
