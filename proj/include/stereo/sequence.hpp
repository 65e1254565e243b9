#pragma once

#include <optional>
#include <string>
#include <vector>

#include "stereo/eval.hpp"
#include "stereo/scenegen.hpp"

namespace stereo {

// On-disk sequence layout: NNN_L.pgm, NNN_R.pgm (required), NNN_C.ppm (left
// colour), NNN_gt.pfm (gt disparity, -1 = none), NNN_labels.pgm,
// NNN_occ.pgm (255 = occluded), NNN_mask.pgm (closest object, 255 = inside),
// plus calib.txt and scene.txt in the directory.

std::string frame_path(const std::string& dir, int frame, const std::string& suffix);

/// Number of consecutive frames with both images present, counted from 0.
int count_frames(const std::string& dir);

/// Renders every frame of the spec into dir (created if missing).
void write_scene(const SceneSpec& spec, const std::string& dir);

/// Loads frame pairs and whatever ground truth is present; the evaluation
/// mask excludes a `band` px zone around occlusions and depth jumps.
std::vector<BenchFrame> load_sequence(const std::string& dir, int band = 3);

}  // namespace stereo
