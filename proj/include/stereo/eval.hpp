#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "stereo/attention.hpp"
#include "stereo/disparity_map.hpp"
#include "stereo/geometry.hpp"
#include "stereo/image.hpp"

namespace stereo {

/// Percentage of frames without a detection, plus (when gt masks are given,
/// one per record) frames whose centroid falls outside the mask of the true
/// closest object. A frame with an empty mask counts a detection as wrong.
double missed_blob_ratio(std::span<const TrackRecord> records, std::span<const Mask> gt_masks = {});

struct BadPixelStats {
  double bad_percent = 0;      ///< among pixels valid in both maps
  double density_percent = 0;  ///< valid estimates among valid gt pixels
  std::size_t evaluated = 0;   ///< valid gt pixels considered
};

/// |d - gt| > threshold counted over pixels valid in both; gt NaN or negative
/// means no ground truth. The optional mask restricts the evaluation.
BadPixelStats bad_pixel_rate(const DisparityMap& map, const FloatImage& gt, double threshold,
                             const Mask* eval_mask = nullptr);
BadPixelStats bad_pixel_rate(const DisparityMap& map, const DisparityMap& gt, double threshold,
                             const Mask* eval_mask = nullptr);

/// Pixels with ground truth at least `band` px (Chebyshev) away from any
/// occluded pixel and from any gt jump larger than 1 px.
Mask evaluation_mask(const FloatImage& gt, const Mask& occluded, int band);

struct BenchFrame {
  GrayImage left;
  GrayImage right;
  std::optional<FloatImage> gt_disparity;
  std::optional<Mask> eval_mask;    ///< restricts bad-pixel statistics
  std::optional<Mask> target_mask;  ///< gt mask of the closest object
};

struct BenchFrameRow {
  int frame = 0;
  bool detected = false;
  bool wrong = false;
  double disp_ms = 0;
  double seg_ms = 0;
  double total_ms = 0;
  double bad1 = -1;  ///< -1 when the frame has no gt
  double bad2 = -1;
  double density = -1;
  friend bool operator==(const BenchFrameRow&, const BenchFrameRow&) = default;
};

struct BenchReport {
  std::string matcher;
  int width = 0;
  int height = 0;
  int d_min = 0;
  int d_max = 0;
  int frames = 0;
  double mean_disp_ms = 0;
  double mean_seg_ms = 0;
  double mean_total_ms = 0;
  double median_disp_ms = 0;
  double median_seg_ms = 0;
  double median_total_ms = 0;
  double missed_percent = 0;
  double bad1_percent = -1;  ///< -1 without any gt
  double bad2_percent = -1;
  double density_percent = -1;
  bool partial = false;
  std::string error;
  std::vector<std::pair<std::string, std::string>> params;
  std::vector<BenchFrameRow> rows;

  /// key=value block followed by a per-frame CSV appendix.
  std::string to_text() const;
  static BenchReport parse(const std::string& text);

  friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

/// Every tunable of the tracker as ordered key/value pairs.
std::vector<std::pair<std::string, std::string>> parameter_dump(const TrackerParams& p);

/// Runs the tracker on every frame with per-stage wall-clock timing. Pipeline
/// errors stop the run and mark the report partial.
BenchReport run_benchmark(std::span<const BenchFrame> sequence, const StereoRig& rig, const TrackerParams& params);

}  // namespace stereo
