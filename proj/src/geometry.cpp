#include "stereo/geometry.hpp"

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <cmath>

#include "stereo/error.hpp"
#include "stereo/keyvalue.hpp"
#include "stereo/parallel.hpp"

namespace stereo {

Mat3 CameraIntrinsics::matrix() const {
  Mat3 k;
  k << fx, skew, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

void CameraIntrinsics::validate() const {
  require(fx > 0.0 && fy > 0.0, Errc::InvalidParameter, "focal lengths must be positive");
  require(std::isfinite(cx) && std::isfinite(cy) && std::isfinite(skew), Errc::InvalidParameter,
          "principal point and skew must be finite");
}

void CameraExtrinsics::validate() const {
  const double ortho = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  require(ortho <= 1e-9, Errc::InvalidParameter, "rotation is not orthonormal");
  require(std::abs(rotation.determinant() - 1.0) <= 1e-9, Errc::InvalidParameter,
          "rotation is not proper (det != 1)");
  require(translation.allFinite(), Errc::InvalidParameter, "translation must be finite");
}

ProjectionMatrix ProjectionMatrix::from(const CameraIntrinsics& k, const CameraExtrinsics& e) {
  Mat34 rt;
  rt.leftCols<3>() = e.rotation;
  rt.col(3) = e.translation;
  return {k.matrix() * rt};
}

void StereoRig::validate() const {
  left.validate();
  right.validate();
  relative_pose.validate();
  require(width > 0 && height > 0, Errc::InvalidParameter, "image size must be positive");
}

StereoRig StereoRig::ideal(int width, int height, double focal, double baseline) {
  StereoRig rig;
  rig.width = width;
  rig.height = height;
  rig.left = {focal, focal, (width - 1) / 2.0, (height - 1) / 2.0, 0.0};
  rig.right = rig.left;
  rig.relative_pose.translation = Vec3(-baseline, 0.0, 0.0);
  return rig;
}

namespace {

CameraIntrinsics read_intrinsics(const KeyValueFile& kv, const std::string& side) {
  return {kv.get_double(side + ".fx"), kv.get_double(side + ".fy"), kv.get_double(side + ".cx"),
          kv.get_double(side + ".cy"), kv.get_double(side + ".skew", 0.0)};
}

void write_intrinsics(KeyValueFile& kv, const std::string& side, const CameraIntrinsics& k) {
  kv.set(side + ".fx", k.fx);
  kv.set(side + ".fy", k.fy);
  kv.set(side + ".cx", k.cx);
  kv.set(side + ".cy", k.cy);
  if (k.skew != 0.0) kv.set(side + ".skew", k.skew);
}

StereoRig rig_from(const KeyValueFile& kv) {
  StereoRig rig;
  rig.left = read_intrinsics(kv, "left");
  rig.right = read_intrinsics(kv, "right");
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      rig.relative_pose.rotation(r, c) = kv.get_double("pose.r" + std::to_string(r) + std::to_string(c));
  rig.relative_pose.translation =
      Vec3(kv.get_double("pose.tx"), kv.get_double("pose.ty"), kv.get_double("pose.tz"));
  rig.width = kv.get_int("width");
  rig.height = kv.get_int("height");
  rig.validate();
  return rig;
}

}  // namespace

StereoRig StereoRig::load(const std::string& path) { return rig_from(KeyValueFile::load(path)); }
StereoRig StereoRig::parse(const std::string& text) { return rig_from(KeyValueFile::parse(text)); }

std::string StereoRig::to_text() const {
  KeyValueFile kv;
  write_intrinsics(kv, "left", left);
  write_intrinsics(kv, "right", right);
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c)
      kv.set("pose.r" + std::to_string(r) + std::to_string(c), relative_pose.rotation(r, c));
  kv.set("pose.tx", relative_pose.translation.x());
  kv.set("pose.ty", relative_pose.translation.y());
  kv.set("pose.tz", relative_pose.translation.z());
  kv.set("width", width);
  kv.set("height", height);
  return kv.to_string();
}

Vec2 project(const ProjectionMatrix& P, const Vec3& X) {
  const Vec3 sx = P.P * X.homogeneous();
  if (std::abs(sx.z()) < 1e-12) throw Error(Errc::PointAtInfinity, "point lies on the camera plane");
  return sx.head<2>() / sx.z();
}

namespace {

Vec2 rectified_to_source(const Vec3& ray_rect, const Mat3& rotation, const CameraIntrinsics& k) {
  const Vec3 ray = rotation.transpose() * ray_rect;
  if (ray.z() <= 1e-12) return {-1.0, -1.0};
  const double x = ray.x() / ray.z();
  const double y = ray.y() / ray.z();
  return {k.fx * x + k.skew * y + k.cx, k.fy * y + k.cy};
}

Vec2 source_to_rectified(const Vec2& pixel, const Mat3& rotation, const CameraIntrinsics& k,
                         const RectifiedCamera& cam) {
  const Vec3 ray = rotation * (k.matrix().inverse() * pixel.homogeneous());
  if (std::abs(ray.z()) < 1e-12) throw Error(Errc::PointAtInfinity, "pixel maps to infinity");
  return {cam.focal * ray.x() / ray.z() + cam.cx, cam.focal * ray.y() / ray.z() + cam.cy};
}

}  // namespace

Vec2 RectificationMaps::rectify_left(const Vec2& pixel) const {
  return source_to_rectified(pixel, rotation_left, original_left, camera);
}

Vec2 RectificationMaps::rectify_right(const Vec2& pixel) const {
  return source_to_rectified(pixel, rotation_right, original_right, camera);
}

RectificationMaps compute_rectification(const StereoRig& rig) {
  rig.validate();
  const Mat3& R = rig.relative_pose.rotation;
  const Vec3 right_center = -R.transpose() * rig.relative_pose.translation;
  const double baseline = right_center.norm();
  if (baseline < 1e-6) throw Error(Errc::DegenerateRig, "baseline below 1e-6 m");
  if (right_center.x() <= 0.0 || right_center.x() < std::abs(right_center.y()))
    throw Error(Errc::DegenerateRig, "baseline is not predominantly horizontal left-to-right");

  // New x axis along the baseline; y perpendicular to it and to the mean
  // optical axis of the two cameras.
  const Vec3 ex = right_center / baseline;
  const Vec3 mean_axis = (Vec3::UnitZ() + R.transpose() * Vec3::UnitZ()).normalized();
  Vec3 ey = mean_axis.cross(ex);
  if (ey.norm() < 1e-6) throw Error(Errc::DegenerateRig, "baseline parallel to the viewing direction");
  ey.normalize();
  const Vec3 ez = ex.cross(ey);

  RectificationMaps maps;
  maps.rotation_left.row(0) = ex.transpose();
  maps.rotation_left.row(1) = ey.transpose();
  maps.rotation_left.row(2) = ez.transpose();
  maps.rotation_right = maps.rotation_left * R.transpose();
  maps.original_left = rig.left;
  maps.original_right = rig.right;
  maps.camera.focal = (rig.left.fx + rig.left.fy + rig.right.fx + rig.right.fy) / 4.0;
  maps.camera.baseline = baseline;
  maps.camera.cx = (rig.left.cx + rig.right.cx) / 2.0;
  maps.camera.cy = (rig.left.cy + rig.right.cy) / 2.0;

  maps.map_left = PixelMap(rig.width, rig.height);
  maps.map_right = PixelMap(rig.width, rig.height);
  const auto& cam = maps.camera;
  parallel_for(0, rig.height, [&](int y0, int y1) {
    for (int v = y0; v < y1; ++v) {
      for (int u = 0; u < rig.width; ++u) {
        const Vec3 ray((u - cam.cx) / cam.focal, (v - cam.cy) / cam.focal, 1.0);
        maps.map_left.set(u, v, rectified_to_source(ray, maps.rotation_left, rig.left));
        maps.map_right.set(u, v, rectified_to_source(ray, maps.rotation_right, rig.right));
      }
    }
  });
  return maps;
}

Vec3 triangulate(const Vec2& pixel, double disparity, const RectifiedCamera& camera) {
  if (!(disparity > 1e-6)) throw Error(Errc::ZeroDisparity, "disparity must exceed 1e-6 px");
  const double z = camera.focal * camera.baseline / disparity;
  return {(pixel.x() - camera.cx) * z / camera.focal, (pixel.y() - camera.cy) * z / camera.focal, z};
}

namespace {

template <typename T, typename Blend>
void warp_into(const Image<T>& src, const PixelMap& map, Image<T>& dst, Mask* valid, Blend blend) {
  const int w = src.width();
  const int h = src.height();
  parallel_for(0, map.height(), [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < map.width(); ++x) {
        const Vec2 s = map.at(x, y);
        if (!(s.x() >= 0.0 && s.y() >= 0.0 && s.x() <= w - 1 && s.y() <= h - 1)) {
          dst(x, y) = T{};
          if (valid) (*valid)(x, y) = 0;
          continue;
        }
        const int x0 = static_cast<int>(s.x());
        const int y0i = static_cast<int>(s.y());
        const int x1 = std::min(x0 + 1, w - 1);
        const int y1i = std::min(y0i + 1, h - 1);
        const double ax = s.x() - x0;
        const double ay = s.y() - y0i;
        dst(x, y) = blend(src(x0, y0i), src(x1, y0i), src(x0, y1i), src(x1, y1i), ax, ay);
        if (valid) (*valid)(x, y) = 1;
      }
    }
  });
}

std::uint8_t bilinear(double p00, double p10, double p01, double p11, double ax, double ay) {
  const double top = p00 + (p10 - p00) * ax;
  const double bottom = p01 + (p11 - p01) * ax;
  const double v = top + (bottom - top) * ay;
  return static_cast<std::uint8_t>(std::clamp(std::floor(v + 0.5), 0.0, 255.0));
}

}  // namespace

WarpResult warp(const GrayImage& src, const PixelMap& map) {
  WarpResult out{GrayImage(map.width(), map.height()), Mask(map.width(), map.height())};
  warp_into(src, map, out.image, &out.valid,
            [](std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d, double ax, double ay) {
              return bilinear(a, b, c, d, ax, ay);
            });
  return out;
}

RgbImage warp(const RgbImage& src, const PixelMap& map) {
  RgbImage out(map.width(), map.height());
  warp_into(src, map, out, nullptr, [](Rgb a, Rgb b, Rgb c, Rgb d, double ax, double ay) {
    return Rgb{bilinear(a.r, b.r, c.r, d.r, ax, ay), bilinear(a.g, b.g, c.g, d.g, ax, ay),
               bilinear(a.b, b.b, c.b, d.b, ax, ay)};
  });
  return out;
}

}  // namespace stereo
