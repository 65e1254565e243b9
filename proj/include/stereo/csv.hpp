#pragma once

#include <optional>
#include <span>
#include <string>

#include "stereo/attention.hpp"
#include "stereo/segmentation.hpp"

namespace stereo {

/// `frame,hit,u,v,x,y,z,t_rect_ms,t_disp_ms,t_seg_ms`; missed frames leave
/// the position fields empty.
std::string track_csv(std::span<const TrackRecord> records);
/// `frame,hit,u,v` for a per-frame centroid series.
std::string centroid_csv(std::span<const std::optional<Vec2>> centroids);
/// `frame,a_hit,b_hit,du,dv` followed by nothing else; summary lives elsewhere.
std::string difference_csv(const TrackComparison& cmp);
std::string segmentation_csv_header();
/// `frame,missed,seed_v,area,cu,cv,x,y,w,h` (bbox of the blob).
std::string segmentation_csv_row(int frame, const SegResult& seg);

}  // namespace stereo
