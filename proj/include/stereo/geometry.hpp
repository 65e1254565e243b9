#pragma once

#include <Eigen/Core>
#include <string>

#include "stereo/image.hpp"

namespace stereo {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat34 = Eigen::Matrix<double, 3, 4>;

struct CameraIntrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
  double skew = 0.0;

  Mat3 matrix() const;
  void validate() const;
};

/// Rigid transform taking points from a reference frame into the camera
/// frame: X_cam = R * X_ref + t.
struct CameraExtrinsics {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  void validate() const;
};

struct ProjectionMatrix {
  Mat34 P = Mat34::Zero();

  static ProjectionMatrix from(const CameraIntrinsics& k, const CameraExtrinsics& e);
};

/// Two-camera rig. relative_pose maps left-camera coordinates into the
/// right camera frame.
struct StereoRig {
  CameraIntrinsics left;
  CameraIntrinsics right;
  CameraExtrinsics relative_pose;
  int width = 0;
  int height = 0;

  double baseline() const { return relative_pose.translation.norm(); }
  void validate() const;

  static StereoRig load(const std::string& path);
  static StereoRig parse(const std::string& text);
  std::string to_text() const;

  /// Horizontal, already-rectified pair with identical pinhole cameras.
  static StereoRig ideal(int width, int height, double focal, double baseline);
};

/// Parameters of the common rectified camera pair.
struct RectifiedCamera {
  double focal = 0.0;
  double baseline = 0.0;
  double cx = 0.0;
  double cy = 0.0;
};

/// Per destination pixel source coordinates, stored interleaved (x, y).
class PixelMap {
 public:
  PixelMap() = default;
  PixelMap(int width, int height) : width_(width), height_(height), xy_(2 * std::size_t(width) * height) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  Vec2 at(int x, int y) const {
    const std::size_t i = 2 * (std::size_t(y) * width_ + x);
    return {xy_[i], xy_[i + 1]};
  }
  void set(int x, int y, const Vec2& src) {
    const std::size_t i = 2 * (std::size_t(y) * width_ + x);
    xy_[i] = src.x();
    xy_[i + 1] = src.y();
  }
  std::size_t entries() const noexcept { return xy_.size() / 2; }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<double> xy_;
};

struct RectificationMaps {
  PixelMap map_left;
  PixelMap map_right;
  RectifiedCamera camera;
  /// Rotations from each original camera frame into its rectified frame.
  Mat3 rotation_left = Mat3::Identity();
  Mat3 rotation_right = Mat3::Identity();
  CameraIntrinsics original_left;
  CameraIntrinsics original_right;

  /// Forward mapping of an original image pixel to its rectified position.
  Vec2 rectify_left(const Vec2& pixel) const;
  Vec2 rectify_right(const Vec2& pixel) const;
};

Vec2 project(const ProjectionMatrix& P, const Vec3& X);

RectificationMaps compute_rectification(const StereoRig& rig);

/// Point in the left rectified camera frame for a rectified left pixel with
/// the given disparity.
Vec3 triangulate(const Vec2& pixel, double disparity, const RectifiedCamera& camera);
inline Vec3 triangulate(const Vec2& pixel, double disparity, const RectificationMaps& maps) {
  return triangulate(pixel, disparity, maps.camera);
}

struct WarpResult {
  GrayImage image;
  Mask valid;  ///< 0 where the source position fell outside the input
};

/// Bilinear resampling through a map; out-of-bounds destinations are 0.
WarpResult warp(const GrayImage& src, const PixelMap& map);
RgbImage warp(const RgbImage& src, const PixelMap& map);

}  // namespace stereo
