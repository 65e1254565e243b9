#pragma once

#include "stereo/attention.hpp"
#include "stereo/image.hpp"
#include "stereo/segmentation.hpp"

namespace stereo {

inline constexpr Rgb kOverlayTint{0, 160, 255};
inline constexpr Rgb kOverlayRawCentroid{255, 0, 0};
inline constexpr Rgb kOverlaySmoothedCentroid{0, 255, 0};
inline constexpr Rgb kOverlayRoi{255, 255, 0};

/// Blob mask blended 50% with the tint, ROI outline, and 3x3 dots for the
/// frame centroid and the smoothed one. A missed frame is returned unchanged.
RgbImage render_overlay(const RgbImage& image, const SegResult& seg, const TrackRecord& record);

}  // namespace stereo
