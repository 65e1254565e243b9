#include "stereo/scenegen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <fstream>
#include <sstream>

#include "stereo/error.hpp"
#include "stereo/keyvalue.hpp"
#include "stereo/parallel.hpp"

namespace stereo {
namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

double lattice(std::uint64_t seed, std::int64_t ix, std::int64_t iy) {
  const std::uint64_t h = splitmix(seed ^ splitmix(std::uint64_t(ix) * 0x632BE59BD9B4E019ull ^ splitmix(std::uint64_t(iy))));
  return double(h >> 11) * (1.0 / 9007199254740992.0);
}

double smooth(double t) { return t * t * (3.0 - 2.0 * t); }

double value_noise(std::uint64_t seed, double x, double y) {
  const double fx = std::floor(x), fy = std::floor(y);
  const auto ix = static_cast<std::int64_t>(fx), iy = static_cast<std::int64_t>(fy);
  const double tx = smooth(x - fx), ty = smooth(y - fy);
  const double a = lattice(seed, ix, iy), b = lattice(seed, ix + 1, iy);
  const double c = lattice(seed, ix, iy + 1), d = lattice(seed, ix + 1, iy + 1);
  return (a + (b - a) * tx) + ((c + (d - c) * tx) - (a + (b - a) * tx)) * ty;
}

// Two-octave value noise in [0, 1).
double texture(std::uint64_t seed, double u, double v) {
  return 0.65 * value_noise(seed, u, v) + 0.35 * value_noise(splitmix(seed), 2.13 * u + 17.3, 2.13 * v - 5.1);
}

Rgb shade(Rgb base, double contrast, double n) {
  const double m = 1.0 + contrast * (2.0 * n - 1.0) * 0.5;
  auto ch = [m](std::uint8_t c) { return static_cast<std::uint8_t>(std::clamp(std::floor(c * m + 0.5), 0.0, 255.0)); };
  return {ch(base.r), ch(base.g), ch(base.b)};
}

struct Hit {
  double z = std::numeric_limits<double>::infinity();
  int label = 255;
  Rgb color;
};

struct PlacedObject {
  const Primitive* obj;
  Vec3 c;
  double cell;
};

class Renderer {
 public:
  Renderer(const SceneSpec& s, int frame) : s_(s) {
    for (const auto& o : s.objects) {
      double zmin = std::min(o.center.z(), o.end_center ? o.end_center->z() : o.center.z());
      if (o.shape == Shape::Sphere) zmin = std::max(zmin - o.radius, 1e-3);
      const double cell = o.texture_cell > 0 ? o.texture_cell : 3.0 * zmin / s.focal;
      placed_.push_back({&o, s.position(o, frame), cell});
    }
    bg_cell_ = s.background.texture_cell > 0 ? s.background.texture_cell : 3.0 * s.background.depth / s.focal;
  }

  // Nearest surface along the ray from (ox, 0, 0) through image point (u, v).
  Hit cast(double ox, double u, double v) const {
    const double dx = (u - s_.cx) / s_.focal, dy = (v - s_.cy) / s_.focal;
    Hit best;
    for (std::size_t k = 0; k < placed_.size(); ++k) {
      const auto& p = placed_[k];
      const Primitive& o = *p.obj;
      double z = 0, tx = 0, ty = 0;
      if (o.shape == Shape::Rect) {
        z = p.c.z();
        const double X = ox + dx * z, Y = dy * z;
        if (z <= 0 || std::abs(X - p.c.x()) > o.width / 2 || std::abs(Y - p.c.y()) > o.height / 2) continue;
        tx = X - p.c.x();
        ty = Y - p.c.y();
      } else {
        // |o + t d - c|^2 = r^2 with d = (dx, dy, 1); z = t.
        const Vec3 oc(ox - p.c.x(), -p.c.y(), -p.c.z());
        const Vec3 dir(dx, dy, 1.0);
        const double a = dir.squaredNorm(), b = 2.0 * oc.dot(dir), c = oc.squaredNorm() - o.radius * o.radius;
        const double disc = b * b - 4 * a * c;
        if (disc < 0) continue;
        z = (-b - std::sqrt(disc)) / (2 * a);
        if (z <= 0) continue;
        tx = ox + dx * z - p.c.x();
        ty = dy * z - p.c.y();
      }
      if (z < best.z) {
        best.z = z;
        best.label = static_cast<int>(k) + 1;
        best.color = shade(o.color, o.contrast, texture(o.texture_seed, tx / p.cell, ty / p.cell));
      }
    }
    if (s_.background.depth > 0 && s_.background.depth < best.z) {
      const double z = s_.background.depth;
      best.z = z;
      best.label = 0;
      best.color = shade(s_.background.color, s_.background.contrast,
                         texture(s_.background.texture_seed, (ox + dx * z) / bg_cell_, (dy * z) / bg_cell_));
    }
    return best;
  }

 private:
  const SceneSpec& s_;
  std::vector<PlacedObject> placed_;
  double bg_cell_ = 1.0;
};

void add_noise(GrayImage& img, double sigma, std::uint64_t seed) {
  if (sigma <= 0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, sigma);
  for (auto& v : img.pixels()) v = static_cast<std::uint8_t>(std::clamp(std::floor(v + n(rng) + 0.5), 0.0, 255.0));
}

void add_noise(RgbImage& img, double sigma, std::uint64_t seed) {
  if (sigma <= 0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, sigma);
  auto f = [&](std::uint8_t c) { return static_cast<std::uint8_t>(std::clamp(std::floor(c + n(rng) + 0.5), 0.0, 255.0)); };
  for (auto& p : img.pixels()) p = {f(p.r), f(p.g), f(p.b)};
}

Rgb parse_rgb(const std::string& text) {
  std::stringstream ss(text);
  std::string part;
  int c[3], i = 0;
  while (std::getline(ss, part, ',')) {
    require(i < 3, Errc::InvalidParameter, "color needs three components: " + text);
    c[i] = parse_int(part);
    require(c[i] >= 0 && c[i] <= 255, Errc::InvalidParameter, "color component out of range: " + text);
    ++i;
  }
  require(i == 3, Errc::InvalidParameter, "color needs three components: " + text);
  return {std::uint8_t(c[0]), std::uint8_t(c[1]), std::uint8_t(c[2])};
}

std::string rgb_text(Rgb c) {
  return std::to_string(c.r) + "," + std::to_string(c.g) + "," + std::to_string(c.b);
}

}  // namespace

void SceneSpec::validate() const {
  require(width > 0 && height > 0, Errc::InvalidParameter, "scene size must be positive");
  require(focal > 0, Errc::InvalidParameter, "scene focal must be positive");
  require(baseline >= 0, Errc::InvalidParameter, "scene baseline must be >= 0");
  require(frames >= 1, Errc::InvalidParameter, "scene needs at least one frame");
  require(noise_sigma >= 0, Errc::InvalidParameter, "noise sigma must be >= 0");
  require(background.depth >= 0, Errc::InvalidParameter, "background depth must be >= 0 (0 disables)");
  for (const auto& o : objects) {
    require(o.center.z() > 0 && (!o.end_center || o.end_center->z() > 0), Errc::InvalidParameter,
            "object depths must be positive");
    require(o.contrast >= 0 && o.contrast <= 1, Errc::InvalidParameter, "object contrast must be in [0,1]");
    if (o.shape == Shape::Rect)
      require(o.width > 0 && o.height > 0, Errc::InvalidParameter, "rect size must be positive");
    else
      require(o.radius > 0, Errc::InvalidParameter, "sphere radius must be positive");
  }
}

Vec3 SceneSpec::position(const Primitive& obj, int frame) const {
  if (!obj.end_center || frames <= 1) return obj.center;
  const double t = double(frame) / double(frames - 1);
  return obj.center + (*obj.end_center - obj.center) * t;
}

StereoRig SceneSpec::rig() const {
  StereoRig r;
  r.width = width;
  r.height = height;
  r.left = {focal, focal, cx, cy, 0.0};
  r.right = r.left;
  r.relative_pose.translation = Vec3(-baseline, 0, 0);
  return r;
}

SceneSpec SceneSpec::desk(int width, int height) {
  SceneSpec s;
  s.width = width;
  s.height = height;
  s.focal = 260.0 * width / 320.0;
  s.cx = (width - 1) / 2.0;
  s.cy = (height - 1) / 2.0;
  return s;
}

SceneSpec SceneSpec::parse(const std::string& text) {
  const auto kv = KeyValueFile::parse(text);
  SceneSpec s;
  s.width = kv.get_int("width", s.width);
  s.height = kv.get_int("height", s.height);
  s.focal = kv.get_double("focal", s.focal);
  s.cx = kv.get_double("cx", (s.width - 1) / 2.0);
  s.cy = kv.get_double("cy", (s.height - 1) / 2.0);
  s.baseline = kv.get_double("baseline", s.baseline);
  s.frames = kv.get_int("frames", s.frames);
  s.noise_sigma = kv.get_double("noise.sigma", s.noise_sigma);
  s.noise_seed = static_cast<std::uint64_t>(kv.get_int("noise.seed", 1));
  s.background.depth = kv.get_double("background.depth", s.background.depth);
  s.background.texture_seed = static_cast<std::uint64_t>(kv.get_int("background.seed", 7));
  s.background.contrast = kv.get_double("background.contrast", s.background.contrast);
  s.background.texture_cell = kv.get_double("background.cell", 0.0);
  if (auto c = kv.find("background.color")) s.background.color = parse_rgb(*c);

  for (int i = 0;; ++i) {
    const std::string pre = "object." + std::to_string(i) + ".";
    if (!kv.has(pre + "type")) break;
    Primitive o;
    const auto& type = kv.get(pre + "type");
    if (type == "rect")
      o.shape = Shape::Rect;
    else if (type == "sphere")
      o.shape = Shape::Sphere;
    else
      throw Error(Errc::InvalidParameter, pre + "type must be rect or sphere");
    o.center = Vec3(kv.get_double(pre + "x", 0), kv.get_double(pre + "y", 0), kv.get_double(pre + "z"));
    if (kv.has(pre + "end.z"))
      o.end_center = Vec3(kv.get_double(pre + "end.x", o.center.x()), kv.get_double(pre + "end.y", o.center.y()),
                          kv.get_double(pre + "end.z"));
    o.width = kv.get_double(pre + "width", o.width);
    o.height = kv.get_double(pre + "height", o.height);
    o.radius = kv.get_double(pre + "radius", o.radius);
    o.texture_seed = static_cast<std::uint64_t>(kv.get_int(pre + "seed", i + 11));
    o.contrast = kv.get_double(pre + "contrast", o.contrast);
    o.texture_cell = kv.get_double(pre + "cell", 0.0);
    if (auto c = kv.find(pre + "color")) o.color = parse_rgb(*c);
    s.objects.push_back(o);
  }
  s.validate();
  return s;
}

SceneSpec SceneSpec::load(const std::string& path) {
  std::ifstream probe(path);
  require(static_cast<bool>(probe), Errc::IoFailure, "cannot open " + path);
  std::stringstream ss;
  ss << probe.rdbuf();
  return parse(ss.str());
}

std::string SceneSpec::to_text() const {
  KeyValueFile kv;
  kv.set("width", width);
  kv.set("height", height);
  kv.set("focal", focal);
  kv.set("cx", cx);
  kv.set("cy", cy);
  kv.set("baseline", baseline);
  kv.set("frames", frames);
  kv.set("noise.sigma", noise_sigma);
  kv.set("noise.seed", static_cast<int>(noise_seed));
  kv.set("background.depth", background.depth);
  kv.set("background.seed", static_cast<int>(background.texture_seed));
  kv.set("background.contrast", background.contrast);
  kv.set("background.cell", background.texture_cell);
  kv.set("background.color", rgb_text(background.color));
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const auto& o = objects[i];
    const std::string pre = "object." + std::to_string(i) + ".";
    kv.set(pre + "type", std::string(o.shape == Shape::Rect ? "rect" : "sphere"));
    kv.set(pre + "x", o.center.x());
    kv.set(pre + "y", o.center.y());
    kv.set(pre + "z", o.center.z());
    if (o.end_center) {
      kv.set(pre + "end.x", o.end_center->x());
      kv.set(pre + "end.y", o.end_center->y());
      kv.set(pre + "end.z", o.end_center->z());
    }
    if (o.shape == Shape::Rect) {
      kv.set(pre + "width", o.width);
      kv.set(pre + "height", o.height);
    } else {
      kv.set(pre + "radius", o.radius);
    }
    kv.set(pre + "seed", static_cast<int>(o.texture_seed));
    kv.set(pre + "contrast", o.contrast);
    kv.set(pre + "cell", o.texture_cell);
    kv.set(pre + "color", rgb_text(o.color));
  }
  return kv.to_string();
}

RenderedFrame render(const SceneSpec& spec, int frame) {
  spec.validate();
  require(frame >= 0 && frame < spec.frames, Errc::InvalidParameter, "frame index out of range");
  const int w = spec.width, h = spec.height;
  const Renderer r(spec, frame);
  RenderedFrame out{GrayImage(w, h), GrayImage(w, h), RgbImage(w, h), FloatImage(w, h, std::nanf("")),
                    GrayImage(w, h, 255), Mask(w, h, 1)};
  RgbImage color_right(w, h);
  const double fb = spec.focal * spec.baseline;

  parallel_for(0, h, [&](int y0, int y1) {
    for (int v = y0; v < y1; ++v) {
      for (int u = 0; u < w; ++u) {
        const Hit hl = r.cast(0.0, u, v);
        const Hit hr = r.cast(spec.baseline, u, v);
        out.color_left(u, v) = hl.color;
        color_right(u, v) = hr.color;
        if (hl.label == 255) continue;
        out.labels(u, v) = static_cast<std::uint8_t>(hl.label);
        const double d = fb / hl.z;
        out.gt_disparity(u, v) = static_cast<float>(d);
        // Visible in the right view iff the right ray through the matching
        // point reaches the same surface.
        const double ur = u - d;
        if (ur < 0) continue;
        const Hit back = r.cast(spec.baseline, ur, v);
        if (back.label == hl.label && std::abs(back.z - hl.z) <= 1e-9 * hl.z) out.occluded(u, v) = 0;
      }
    }
  });

  if (std::all_of(out.labels.pixels().begin(), out.labels.pixels().end(), [](std::uint8_t l) { return l == 255; }))
    throw Error(Errc::EmptyFrustum, "no surface is visible in frame " + std::to_string(frame));

  const std::uint64_t base = splitmix(spec.noise_seed ^ splitmix(std::uint64_t(frame)));
  add_noise(out.color_left, spec.noise_sigma, splitmix(base + 3));
  out.left = to_gray(out.color_left);
  out.right = to_gray(color_right);
  add_noise(out.left, spec.noise_sigma, splitmix(base + 1));
  add_noise(out.right, spec.noise_sigma, splitmix(base + 2));
  return out;
}

std::optional<int> closest_visible_object(const SceneSpec& spec, const RenderedFrame& frame, int frame_index) {
  std::vector<char> visible(spec.objects.size(), 0);
  for (auto l : frame.labels.pixels())
    if (l >= 1 && l != 255 && std::size_t(l - 1) < visible.size()) visible[l - 1] = 1;
  std::optional<int> best;
  double best_z = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < spec.objects.size(); ++k) {
    if (!visible[k]) continue;
    const double z = spec.position(spec.objects[k], frame_index).z();
    if (z < best_z) {
      best_z = z;
      best = static_cast<int>(k);
    }
  }
  return best;
}

Mask object_mask(const RenderedFrame& frame, int object_index) {
  Mask m(frame.labels.width(), frame.labels.height(), 0);
  for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = frame.labels.data()[i] == object_index + 1;
  return m;
}

SceneSpec two_plane_scene(std::uint64_t seed, int width, int height) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> fg_disp(35.0, 60.0), bg_disp(6.0, 16.0);
  std::uniform_real_distribution<double> size_frac(0.3, 0.45), pos(-0.15, 0.15);
  SceneSpec s = SceneSpec::desk(width, height);
  s.background.depth = s.depth_for_disparity(bg_disp(rng));
  s.background.texture_seed = rng();
  Primitive fg;
  fg.shape = Shape::Rect;
  const double z = s.depth_for_disparity(fg_disp(rng));
  const double side_px = size_frac(rng) * height;
  fg.width = fg.height = side_px * z / s.focal;
  fg.center = Vec3(pos(rng) * width * z / s.focal, pos(rng) * height * z / s.focal, z);
  fg.texture_seed = rng();
  s.objects.push_back(fg);
  return s;
}

}  // namespace stereo
