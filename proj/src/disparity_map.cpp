#include "stereo/disparity_map.hpp"

namespace stereo {

FloatImage to_float(const DisparityMap& map) {
  FloatImage out(map.width(), map.height());
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x) out(x, y) = map.at(x, y);
  return out;
}

DisparityMap from_float(const FloatImage& img, int d_min, int d_max) {
  DisparityMap out(img.width(), img.height(), d_min, d_max);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) {
      const float v = img(x, y);
      if (std::isfinite(v) && v >= 0.0f) out.set(x, y, v);
    }
  return out;
}

GrayImage to_8bit(const DisparityMap& map) {
  GrayImage out(map.width(), map.height(), 0);
  if (map.d_max() <= 0) return out;
  const double scale = 255.0 / map.d_max();
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x) {
      if (!map.valid(x, y)) continue;
      const double v = std::floor(map.at(x, y) * scale + 0.5);
      out(x, y) = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
    }
  return out;
}

}  // namespace stereo
