#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "stereo/geometry.hpp"
#include "stereo/image.hpp"

namespace stereo {

enum class Shape { Rect, Sphere };

/// Textured scene object. Positions are in the left camera frame (meters);
/// with an end position the object moves linearly over the sequence.
struct Primitive {
  Shape shape = Shape::Rect;
  Vec3 center = Vec3(0, 0, 1);
  std::optional<Vec3> end_center;
  double width = 0.1;   ///< rect, m
  double height = 0.1;  ///< rect, m
  double radius = 0.05; ///< sphere, m
  std::uint64_t texture_seed = 1;
  double contrast = 1.0;     ///< 0 gives a texture-less surface
  double texture_cell = 0.0; ///< lattice spacing in m; 0 picks ~3 px at the nearest depth
  Rgb color{128, 128, 128};
};

struct Background {
  double depth = 2.0;  ///< 0 disables the background plane
  std::uint64_t texture_seed = 7;
  double contrast = 1.0;
  double texture_cell = 0.0;
  Rgb color{128, 128, 128};
};

/// Rectified pinhole pair (left camera at the origin, right camera at
/// (baseline, 0, 0)) viewing a set of primitives in front of a background.
struct SceneSpec {
  int width = 320;
  int height = 240;
  double focal = 260.0;
  double cx = 159.5;
  double cy = 119.5;
  double baseline = 0.068;
  std::vector<Primitive> objects;
  Background background;
  double noise_sigma = 0.0;  ///< additive Gaussian, 8-bit units
  std::uint64_t noise_seed = 1;
  int frames = 1;

  void validate() const;
  Vec3 position(const Primitive& obj, int frame) const;
  StereoRig rig() const;
  RectifiedCamera camera() const { return {focal, baseline, cx, cy}; }
  double disparity_at_depth(double z) const { return focal * baseline / z; }
  double depth_for_disparity(double d) const { return focal * baseline / d; }

  static SceneSpec parse(const std::string& text);
  static SceneSpec load(const std::string& path);
  std::string to_text() const;

  /// Default desk rig: 320x240, f = 260 px, b = 0.068 m, background at 2 m.
  static SceneSpec desk(int width = 320, int height = 240);
};

struct RenderedFrame {
  GrayImage left;
  GrayImage right;
  RgbImage color_left;
  FloatImage gt_disparity;  ///< left view, NaN where nothing is hit
  /// 0 background, k + 1 for object k, 255 for empty space.
  GrayImage labels;
  /// Set where the left pixel is not visible in the right view.
  Mask occluded;
};

RenderedFrame render(const SceneSpec& spec, int frame);

/// Lazily rendered, deterministic frame sequence.
class SceneSequence {
 public:
  explicit SceneSequence(SceneSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

  int size() const noexcept { return spec_.frames; }
  RenderedFrame operator[](int frame) const { return render(spec_, frame); }
  const SceneSpec& spec() const noexcept { return spec_; }

  class iterator {
   public:
    using value_type = RenderedFrame;
    using difference_type = std::ptrdiff_t;
    iterator(const SceneSequence* seq, int i) : seq_(seq), i_(i) {}
    RenderedFrame operator*() const { return (*seq_)[i_]; }
    iterator& operator++() {
      ++i_;
      return *this;
    }
    bool operator==(const iterator& o) const { return i_ == o.i_; }

   private:
    const SceneSequence* seq_;
    int i_;
  };
  iterator begin() const { return {this, 0}; }
  iterator end() const { return {this, spec_.frames}; }

 private:
  SceneSpec spec_;
};

/// Index of the object nearest to the camera (smallest center depth) among
/// those visible in the frame, if any.
std::optional<int> closest_visible_object(const SceneSpec& spec, const RenderedFrame& frame, int frame_index);

/// Mask of the pixels labelled with the given object.
Mask object_mask(const RenderedFrame& frame, int object_index);

/// Textured fronto-parallel square over a textured background plane;
/// disparities are chosen from the seed within [fg_min, fg_max] and [bg_min, bg_max].
SceneSpec two_plane_scene(std::uint64_t seed, int width = 320, int height = 240);

}  // namespace stereo
