#include "stereo/overlay.hpp"

#include <cmath>

#include "stereo/error.hpp"

namespace stereo {
namespace {

void dot(RgbImage& img, const Vec2& c, Rgb color) {
  const int cx = static_cast<int>(std::lround(c.x())), cy = static_cast<int>(std::lround(c.y()));
  for (int y = cy - 1; y <= cy + 1; ++y)
    for (int x = cx - 1; x <= cx + 1; ++x)
      if (img.contains(x, y)) img(x, y) = color;
}

}  // namespace

RgbImage render_overlay(const RgbImage& image, const SegResult& seg, const TrackRecord& record) {
  RgbImage out = image;
  if (seg.missed || !seg.blob) return out;
  const Blob& b = *seg.blob;
  require(b.mask.width() == image.width() && b.mask.height() == image.height(), Errc::SizeMismatch,
          "blob mask and image differ in size");
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!b.mask.data()[i]) continue;
    Rgb& p = out.data()[i];
    p = {static_cast<std::uint8_t>((p.r + kOverlayTint.r) / 2), static_cast<std::uint8_t>((p.g + kOverlayTint.g) / 2),
         static_cast<std::uint8_t>((p.b + kOverlayTint.b) / 2)};
  }
  const Rect& r = seg.roi;
  if (r.w > 0 && r.h > 0) {
    const int x1 = r.x + r.w - 1, y1 = r.y + r.h - 1;
    for (int x = r.x; x <= x1; ++x) {
      if (out.contains(x, r.y)) out(x, r.y) = kOverlayRoi;
      if (out.contains(x, y1)) out(x, y1) = kOverlayRoi;
    }
    for (int y = r.y; y <= y1; ++y) {
      if (out.contains(r.x, y)) out(r.x, y) = kOverlayRoi;
      if (out.contains(x1, y)) out(x1, y) = kOverlayRoi;
    }
  }
  dot(out, seg.centroid, kOverlayRawCentroid);
  if (record.centroid) dot(out, *record.centroid, kOverlaySmoothedCentroid);
  return out;
}

}  // namespace stereo
