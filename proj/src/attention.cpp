#include "stereo/attention.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "stereo/error.hpp"

namespace stereo {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

GazeState gaze_fixate(const GazeState& state, const Vec3& target) {
  require(target.allFinite(), Errc::InvalidParameter, "gaze target must be finite");
  require(target.z() > 0, Errc::NonPositiveDepth, "gaze target must lie in front of the camera");
  GazeState next = state;
  next.fixation = state.alpha * target + (1.0 - state.alpha) * state.fixation;
  next.direction = next.fixation.normalized();
  return next;
}

std::string to_string(MatcherId id) { return id == MatcherId::Elas ? "elas" : "sgbm"; }

MatcherId parse_matcher(const std::string& name) {
  if (name == "elas") return MatcherId::Elas;
  if (name == "sgbm") return MatcherId::Sgbm;
  throw Error(Errc::InvalidParameter, "unknown matcher '" + name + "' (expected elas or sgbm)");
}

MatcherConfig MatcherConfig::for_resolution(MatcherId id, int width, int height) {
  return {id, ElasParams::for_resolution(width, height), SgbmParams::for_resolution(width, height)};
}

DisparityMap compute_disparity(const GrayImage& left, const GrayImage& right, const MatcherConfig& cfg) {
  return cfg.id == MatcherId::Elas ? compute_elas(left, right, cfg.elas) : block_match(left, right, cfg.sgbm);
}

void TrackerParams::validate() const {
  matcher.elas.validate();
  matcher.sgbm.validate();
  seg.validate();
  require(gaze_alpha > 0 && gaze_alpha <= 1, Errc::InvalidParameter, "gaze alpha must be in (0, 1]");
}

TrackerParams TrackerParams::for_resolution(MatcherId id, int width, int height) {
  TrackerParams p;
  p.matcher = MatcherConfig::for_resolution(id, width, height);
  p.seg = SegParams::for_resolution(width, height);
  return p;
}

bool is_rectified(const StereoRig& rig) {
  const auto& l = rig.left;
  const auto& r = rig.right;
  const auto& t = rig.relative_pose.translation;
  return l.fx == r.fx && l.fy == r.fy && l.cx == r.cx && l.cy == r.cy && l.skew == r.skew && l.fx == l.fy &&
         l.skew == 0 && rig.relative_pose.rotation == Mat3::Identity() && t.y() == 0 && t.z() == 0 && t.x() < 0;
}

AttentionTracker::AttentionTracker(const StereoRig& rig, TrackerParams params)
    : params_(std::move(params)), segmenter_(params_.seg) {
  params_.validate();
  rig.validate();
  if (is_rectified(rig)) {
    camera_ = {rig.left.fx, rig.baseline(), rig.left.cx, rig.left.cy};
  } else {
    maps_ = compute_rectification(rig);
    camera_ = maps_->camera;
  }
  gaze_.alpha = params_.gaze_alpha;
}

void AttentionTracker::reset() {
  segmenter_.reset();
  disparities_.clear();
  gaze_ = GazeState{};
  gaze_.alpha = params_.gaze_alpha;
  frame_ = 0;
}

std::optional<double> median_disparity(const DisparityMap& map, const Mask& mask) {
  require(map.width() == mask.width() && map.height() == mask.height(), Errc::SizeMismatch,
          "mask and disparity sizes differ");
  std::vector<std::int16_t> vals;
  for (int y = 0; y < map.height(); ++y)
    for (int x = 0; x < map.width(); ++x)
      if (mask(x, y) && map.valid(x, y)) vals.push_back(map.raw(x, y));
  if (vals.empty()) return std::nullopt;
  const std::size_t mid = vals.size() / 2;
  std::nth_element(vals.begin(), vals.begin() + mid, vals.end());
  double m = vals[mid];
  if (vals.size() % 2 == 0) m = 0.5 * (m + *std::max_element(vals.begin(), vals.begin() + mid));
  return m / DisparityMap::kScale;
}

TrackStep AttentionTracker::step(const GrayImage& left, const GrayImage& right) {
  require(left.same_size(right), Errc::SizeMismatch, "left and right images differ in size");
  const auto t_start = Clock::now();
  TrackStep out;
  TrackRecord& rec = out.record;
  rec.frame = frame_++;

  auto t0 = Clock::now();
  GrayImage l_rect, r_rect;
  if (maps_) {
    l_rect = warp(left, maps_->map_left).image;
    r_rect = warp(right, maps_->map_right).image;
  }
  const GrayImage& l = maps_ ? l_rect : left;
  const GrayImage& r = maps_ ? r_rect : right;
  rec.timings.rect_ms = ms_since(t0);

  t0 = Clock::now();
  out.disparity = compute_disparity(l, r, params_.matcher);
  rec.timings.disp_ms = ms_since(t0);

  t0 = Clock::now();
  out.segmentation = segmenter_.process(to_8bit(out.disparity));
  rec.timings.seg_ms = ms_since(t0);

  const SegResult& seg = out.segmentation;
  std::optional<double> d_frame;
  if (!seg.missed) {
    rec.detected = true;
    rec.raw_centroid = seg.centroid;
    d_frame = median_disparity(out.disparity, seg.blob->mask);
  }
  disparities_.push_back(d_frame);
  while (static_cast<int>(disparities_.size()) > params_.seg.buffer_len) disparities_.pop_front();

  if (seg.smoothed) {
    double sum = 0;
    int n = 0;
    for (const auto& d : disparities_)
      if (d) {
        sum += *d;
        ++n;
      }
    if (n > 0) {
      try {
        const Vec3 p = triangulate(seg.smoothed->centroid, sum / n, camera_);
        gaze_ = gaze_fixate(gaze_, p);
        rec.centroid = seg.smoothed->centroid;
        rec.point = p;
      } catch (const Error& e) {
        if (e.code() != Errc::ZeroDisparity && e.code() != Errc::NonPositiveDepth) throw;
      }
    }
  }
  rec.timings.total_ms = ms_since(t_start);
  return out;
}

bool HueWindow::contains(Rgb c) const noexcept {
  const double r = c.r / 255.0, g = c.g / 255.0, b = c.b / 255.0;
  const double mx = std::max({r, g, b}), mn = std::min({r, g, b});
  const double chroma = mx - mn;
  if (mx < min_value || mx <= 0 || chroma / mx < min_saturation || chroma <= 0) return false;
  double h;
  if (mx == r)
    h = 60.0 * std::fmod((g - b) / chroma + 6.0, 6.0);
  else if (mx == g)
    h = 60.0 * ((b - r) / chroma + 2.0);
  else
    h = 60.0 * ((r - g) / chroma + 4.0);
  double diff = std::fabs(h - center);
  diff = std::min(diff, 360.0 - diff);
  return diff <= half_width;
}

std::optional<Vec2> colorblob_detect(const RgbImage& image, const HueWindow& window, int min_area) {
  const int w = image.width(), h = image.height();
  Mask in(w, h, 0);
  for (std::size_t i = 0; i < in.size(); ++i) in.data()[i] = window.contains(image.data()[i]);
  std::vector<int> label(in.size(), -1), stack, best_pixels, pixels;
  int next = 0;
  for (int start = 0; start < static_cast<int>(in.size()); ++start) {
    if (!in.data()[start] || label[start] >= 0) continue;
    pixels.clear();
    stack.assign(1, start);
    label[start] = next;
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      pixels.push_back(i);
      const int x = i % w, y = i / w;
      const int nb[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
      for (const auto& q : nb) {
        if (q[0] < 0 || q[1] < 0 || q[0] >= w || q[1] >= h) continue;
        const int j = q[1] * w + q[0];
        if (in.data()[j] && label[j] < 0) {
          label[j] = next;
          stack.push_back(j);
        }
      }
    }
    ++next;
    if (pixels.size() > best_pixels.size()) best_pixels = pixels;
  }
  if (best_pixels.empty() || static_cast<int>(best_pixels.size()) < min_area) return std::nullopt;
  double sx = 0, sy = 0;
  for (int i : best_pixels) {
    sx += i % w;
    sy += i / w;
  }
  return Vec2(sx / best_pixels.size(), sy / best_pixels.size());
}

TrackComparison compare_tracks(std::span<const TrackRecord> a, std::span<const std::optional<Vec2>> b) {
  require(a.size() == b.size(), Errc::LengthMismatch,
          "track lengths differ: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  TrackComparison c;
  double su = 0, sv = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    FrameDifference f;
    f.frame = a[i].frame;
    f.a_hit = a[i].centroid.has_value();
    f.b_hit = b[i].has_value();
    c.misses_a += !f.a_hit;
    c.misses_b += !f.b_hit;
    if (f.a_hit && f.b_hit) {
      f.du = b[i]->x() - a[i].centroid->x();
      f.dv = b[i]->y() - a[i].centroid->y();
      ++c.mutual_hits;
      su += std::abs(f.du);
      sv += std::abs(f.dv);
      c.max_abs_du = std::max(c.max_abs_du, std::abs(f.du));
      c.max_abs_dv = std::max(c.max_abs_dv, std::abs(f.dv));
    }
    c.frames.push_back(f);
  }
  if (c.mutual_hits > 0) {
    c.mean_abs_du = su / c.mutual_hits;
    c.mean_abs_dv = sv / c.mutual_hits;
  }
  return c;
}

}  // namespace stereo
