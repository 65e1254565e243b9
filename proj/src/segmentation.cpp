#include "stereo/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "stereo/error.hpp"
#include "stereo/parallel.hpp"

namespace stereo {

void SegParams::validate() const {
  require(blur_size >= 1 && blur_size % 2 == 1, Errc::InvalidParameter, "seg.blur_size must be odd and positive");
  require(blur1_sigma > 0 && blur2_sigma > 0, Errc::InvalidParameter, "seg blur sigmas must be positive");
  require(threshold >= 0 && threshold <= 255, Errc::InvalidParameter, "seg.threshold must be in [0,255]");
  require(dilations >= 0 && erosions >= 0, Errc::InvalidParameter, "seg morphology counts must be >= 0");
  require(u_plus > 0 && u_minus > 0, Errc::InvalidParameter, "seg.u_plus and seg.u_minus must be positive");
  require(min_blob_area >= 1, Errc::InvalidParameter, "seg.min_blob_area must be >= 1");
  require(roi_margin >= 0, Errc::InvalidParameter, "seg.roi_margin must be >= 0");
  require(buffer_len >= 1, Errc::InvalidParameter, "seg.buffer_len must be >= 1");
}

SegParams SegParams::for_resolution(int width, int /*height*/) {
  SegParams p;
  const int side = std::max(1, static_cast<int>(std::lround(20.0 * width / 320.0)));
  p.min_blob_area = side * side;
  return p;
}

std::vector<int> gaussian_kernel_q8(double sigma, int size) {
  const int r = size / 2;
  std::vector<double> g(size);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) sum += g[i + r] = std::exp(-double(i * i) / (2.0 * sigma * sigma));
  std::vector<int> q(size);
  int total = 0;
  for (int i = 0; i < size; ++i) total += q[i] = static_cast<int>(std::lround(256.0 * g[i] / sum));
  q[r] += 256 - total;
  return q;
}

GrayImage gaussian_blur(const GrayImage& img, double sigma, int size) {
  const auto q = gaussian_kernel_q8(sigma, size);
  const int r = size / 2, w = img.width(), h = img.height();
  Image<int> tmp(w, h);
  parallel_for(0, h, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y)
      for (int x = 0; x < w; ++x) {
        int s = 0;
        for (int i = -r; i <= r; ++i) s += q[i + r] * img(clamp_index(x + i, w), y);
        tmp(x, y) = s;
      }
  });
  GrayImage out(w, h);
  parallel_for(0, h, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y)
      for (int x = 0; x < w; ++x) {
        int s = 0;
        for (int j = -r; j <= r; ++j) s += q[j + r] * tmp(x, clamp_index(y + j, h));
        out(x, y) = static_cast<std::uint8_t>((s + 32768) >> 16);
      }
  });
  return out;
}

namespace {

template <typename Pick>
GrayImage morph(const GrayImage& img, int iterations, Pick pick) {
  GrayImage cur = img;
  const int w = img.width(), h = img.height();
  for (int it = 0; it < iterations; ++it) {
    GrayImage next(w, h);
    parallel_for(0, h, [&](int y0, int y1) {
      for (int y = y0; y < y1; ++y)
        for (int x = 0; x < w; ++x) {
          std::uint8_t v = cur(x, y);
          for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx)
              if (cur.contains(x + dx, y + dy)) v = pick(v, cur(x + dx, y + dy));
          next(x, y) = v;
        }
    });
    cur = std::move(next);
  }
  return cur;
}

}  // namespace

GrayImage dilate(const GrayImage& img, int iterations) {
  return morph(img, iterations, [](std::uint8_t a, std::uint8_t b) { return std::max(a, b); });
}

GrayImage erode(const GrayImage& img, int iterations) {
  return morph(img, iterations, [](std::uint8_t a, std::uint8_t b) { return std::min(a, b); });
}

GrayImage preprocess(const GrayImage& disparity8, const SegParams& p) {
  p.validate();
  GrayImage g = gaussian_blur(disparity8, p.blur1_sigma, p.blur_size);
  for (auto& v : g.pixels())
    if (v < p.threshold) v = 0;
  g = dilate(g, p.dilations);
  g = gaussian_blur(g, p.blur2_sigma, p.blur_size);
  return erode(g, p.erosions);
}

std::pair<double, double> growth_interval(int v, const SegParams& p) {
  return {v - double(v) / p.u_minus, v + double(v) / p.u_plus};
}

Blob make_blob(const GrayImage& values, std::span<const int> pixels) {
  const int w = values.width();
  Blob b;
  b.mask = Mask(values.width(), values.height(), 0);
  b.area = static_cast<int>(pixels.size());
  int x0 = w, y0 = values.height(), x1 = -1, y1 = -1;
  double sx = 0, sy = 0, sv = 0;
  int best_idx = -1;
  for (int idx : pixels) {
    const int x = idx % w, y = idx / w;
    b.mask(x, y) = 1;
    sx += x;
    sy += y;
    sv += values(x, y);
    x0 = std::min(x0, x);
    y0 = std::min(y0, y);
    x1 = std::max(x1, x);
    y1 = std::max(y1, y);
    if (best_idx < 0 || values(x, y) > values(best_idx % w, best_idx / w) ||
        (values(x, y) == values(best_idx % w, best_idx / w) && idx < best_idx))
      best_idx = idx;
  }
  if (b.area > 0) {
    b.centroid = Vec2(sx / b.area, sy / b.area);
    b.bbox = {x0, y0, x1 - x0 + 1, y1 - y0 + 1};
    b.mean_value = sv / b.area;
    b.seed = {best_idx % w, best_idx / w};
    b.seed_value = values(b.seed.x, b.seed.y);
  }
  return b;
}

namespace {

// 4-connected flood fill from seed over pixels accepted by `accept`; returns
// the visited pixel indices in visit order.
template <typename Accept>
std::vector<int> flood(const GrayImage& img, int seed, Accept accept, std::vector<char>& visited) {
  const int w = img.width(), h = img.height();
  std::vector<int> out, stack{seed};
  visited[seed] = 1;
  while (!stack.empty()) {
    const int idx = stack.back();
    stack.pop_back();
    out.push_back(idx);
    const int x = idx % w, y = idx / w;
    const int nb[4][2] = {{x - 1, y}, {x + 1, y}, {x, y - 1}, {x, y + 1}};
    for (const auto& n : nb) {
      if (n[0] < 0 || n[1] < 0 || n[0] >= w || n[1] >= h) continue;
      const int j = n[1] * w + n[0];
      if (visited[j] || !accept(img.data()[j])) continue;
      visited[j] = 1;
      stack.push_back(j);
    }
  }
  return out;
}

}  // namespace

std::optional<Blob> select_foremost_blob(const GrayImage& filtered, const SegParams& p) {
  p.validate();
  GrayImage work = filtered;
  std::vector<char> visited(work.size());
  while (true) {
    const auto it = std::max_element(work.pixels().begin(), work.pixels().end());
    if (it == work.pixels().end() || *it == 0) return std::nullopt;
    const int seed = static_cast<int>(it - work.pixels().begin());
    const int v = *it;
    std::fill(visited.begin(), visited.end(), 0);
    const auto region = flood(
        work, seed,
        [&](std::uint8_t q) { return p.u_minus * (v - int(q)) <= v && p.u_plus * (int(q) - v) <= v; }, visited);
    if (static_cast<int>(region.size()) >= p.min_blob_area) {
      Blob b = make_blob(work, region);
      b.seed = {seed % work.width(), seed / work.width()};
      b.seed_value = static_cast<std::uint8_t>(v);
      return b;
    }
    for (int idx : region) work.data()[idx] = 0;
  }
}

int count_components(const Mask& mask) {
  std::vector<char> visited(mask.size());
  int n = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!mask.data()[i] || visited[i]) continue;
    flood(mask, static_cast<int>(i), [](std::uint8_t q) { return q != 0; }, visited);
    ++n;
  }
  return n;
}

BlobGeometry centroid_roi(const Blob& blob, const SegParams& p, int width, int height) {
  const int n = count_components(blob.mask);
  if (n != 1) throw Error(Errc::MultipleComponents, "blob mask has " + std::to_string(n) + " components");
  BlobGeometry g;
  g.centroid = blob.centroid;
  const int x0 = std::max(0, blob.bbox.x - p.roi_margin);
  const int y0 = std::max(0, blob.bbox.y - p.roi_margin);
  const int x1 = std::min(width, blob.bbox.x + blob.bbox.w + p.roi_margin);
  const int y1 = std::min(height, blob.bbox.y + blob.bbox.h + p.roi_margin);
  g.roi = {x0, y0, x1 - x0, y1 - y0};
  return g;
}

std::optional<SmoothedTarget> temporal_smooth(std::span<const SegResult> buffer) {
  SmoothedTarget t;
  int n = 0;
  for (const auto& r : buffer) {
    if (r.missed) continue;
    t.centroid += r.centroid;
    t.roi.x0 += r.roi.x;
    t.roi.y0 += r.roi.y;
    t.roi.x1 += r.roi.x + r.roi.w;
    t.roi.y1 += r.roi.y + r.roi.h;
    ++n;
  }
  if (n == 0) return std::nullopt;
  t.centroid /= n;
  t.roi = {t.roi.x0 / n, t.roi.y0 / n, t.roi.x1 / n, t.roi.y1 / n};
  return t;
}

std::vector<Blob> segment_by_threshold(const GrayImage& disparity8, int threshold, int min_area) {
  std::vector<char> visited(disparity8.size());
  std::vector<Blob> blobs;
  for (std::size_t i = 0; i < disparity8.size(); ++i) {
    if (visited[i] || disparity8.data()[i] < threshold) continue;
    const auto region =
        flood(disparity8, static_cast<int>(i), [&](std::uint8_t q) { return q >= threshold; }, visited);
    if (static_cast<int>(region.size()) >= min_area) blobs.push_back(make_blob(disparity8, region));
  }
  std::stable_sort(blobs.begin(), blobs.end(),
                   [](const Blob& a, const Blob& b) { return a.mean_value > b.mean_value; });
  return blobs;
}

ForemostSegmenter::ForemostSegmenter(SegParams p) : params_(p) { params_.validate(); }

SegResult ForemostSegmenter::process(const GrayImage& disparity8) {
  SegResult r;
  if (auto blob = select_foremost_blob(preprocess(disparity8, params_), params_)) {
    try {
      const auto g = centroid_roi(*blob, params_, disparity8.width(), disparity8.height());
      r.centroid = g.centroid;
      r.roi = g.roi;
      r.blob = std::move(blob);
      r.missed = false;
    } catch (const Error& e) {
      if (e.code() != Errc::MultipleComponents) throw;
    }
  }
  history_.push_back(r);
  while (static_cast<int>(history_.size()) > params_.buffer_len) history_.pop_front();
  std::vector<SegResult> view(history_.begin(), history_.end());
  r.smoothed = temporal_smooth(view);
  history_.back().smoothed = r.smoothed;
  return r;
}

}  // namespace stereo
