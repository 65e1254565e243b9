#pragma once

#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stereo/disparity_map.hpp"
#include "stereo/elas.hpp"
#include "stereo/geometry.hpp"
#include "stereo/segmentation.hpp"
#include "stereo/sgbm.hpp"

namespace stereo {

/// Simulated gaze: first-order lag of the fixation point towards each target.
struct GazeState {
  Vec3 fixation = Vec3(0, 0, 1);
  Vec3 direction = Vec3(0, 0, 1);
  double alpha = 0.6;
};

/// fixation' = alpha * target + (1 - alpha) * fixation; direction follows it.
GazeState gaze_fixate(const GazeState& state, const Vec3& target);

enum class MatcherId { Elas, Sgbm };

std::string to_string(MatcherId id);
MatcherId parse_matcher(const std::string& name);

struct MatcherConfig {
  MatcherId id = MatcherId::Elas;
  ElasParams elas;
  SgbmParams sgbm;

  int d_max() const { return id == MatcherId::Elas ? elas.d_max : sgbm.d_max; }
  static MatcherConfig for_resolution(MatcherId id, int width, int height);
};

DisparityMap compute_disparity(const GrayImage& left, const GrayImage& right, const MatcherConfig& cfg);

struct StageTimings {
  double rect_ms = 0;
  double disp_ms = 0;
  double seg_ms = 0;
  double total_ms = 0;
};

struct TrackRecord {
  int frame = 0;
  /// Segmentation found a blob in this very frame.
  bool detected = false;
  std::optional<Vec2> raw_centroid;
  /// Temporally smoothed centroid and its triangulated point; empty on a miss.
  std::optional<Vec2> centroid;
  std::optional<Vec3> point;
  StageTimings timings;

  bool hit() const noexcept { return point.has_value(); }
};

struct TrackerParams {
  MatcherConfig matcher;
  SegParams seg;
  double gaze_alpha = 0.6;

  void validate() const;
  static TrackerParams for_resolution(MatcherId id, int width, int height);
};

struct TrackStep {
  TrackRecord record;
  SegResult segmentation;
  DisparityMap disparity;
};

/// Closed-loop pipeline over one sequence: rectify, match, segment, then
/// triangulate the smoothed centroid with the buffered blob disparity and
/// move the simulated gaze. Not safe for concurrent callers.
class AttentionTracker {
 public:
  AttentionTracker(const StereoRig& rig, TrackerParams params);

  /// Raw (unrectified) images in; pairs from an already rectified rig pass through.
  TrackStep step(const GrayImage& left, const GrayImage& right);

  const GazeState& gaze() const noexcept { return gaze_; }
  const TrackerParams& params() const noexcept { return params_; }
  const RectifiedCamera& camera() const noexcept { return camera_; }
  bool rectifies() const noexcept { return maps_.has_value(); }
  void reset();

 private:
  TrackerParams params_;
  std::optional<RectificationMaps> maps_;
  RectifiedCamera camera_;
  ForemostSegmenter segmenter_;
  std::deque<std::optional<double>> disparities_;
  GazeState gaze_;
  int frame_ = 0;
};

/// True when both cameras share intrinsics and the right one is a pure
/// horizontal shift of the left.
bool is_rectified(const StereoRig& rig);

/// Median valid disparity under a mask, if any pixel is valid.
std::optional<double> median_disparity(const DisparityMap& map, const Mask& mask);

/// Hue window in degrees on the HSV circle; the window may wrap through 0.
struct HueWindow {
  double center = 0.0;
  double half_width = 20.0;
  double min_saturation = 0.4;
  double min_value = 0.15;

  bool contains(Rgb c) const noexcept;
};

/// Centroid of the largest 4-connected component inside the hue window,
/// empty when that component is smaller than min_area.
std::optional<Vec2> colorblob_detect(const RgbImage& image, const HueWindow& window, int min_area);

struct FrameDifference {
  int frame = 0;
  bool a_hit = false;
  bool b_hit = false;
  double du = 0;  ///< b - a, defined when both hit
  double dv = 0;
};

struct TrackComparison {
  std::vector<FrameDifference> frames;
  int mutual_hits = 0;
  int misses_a = 0;
  int misses_b = 0;
  double mean_abs_du = 0;
  double mean_abs_dv = 0;
  double max_abs_du = 0;
  double max_abs_dv = 0;
};

TrackComparison compare_tracks(std::span<const TrackRecord> a, std::span<const std::optional<Vec2>> b);

}  // namespace stereo
