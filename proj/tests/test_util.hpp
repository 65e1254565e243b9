#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "stereo/image.hpp"
#include "stereo/segmentation.hpp"

namespace stereo::testing {

inline GrayImage random_image(int w, int h, std::uint32_t seed) {
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> dist(0, 255);
  GrayImage img(w, h);
  for (auto& v : img.pixels()) v = static_cast<std::uint8_t>(dist(rng));
  return img;
}

/// Smooth random texture: random values on a coarse lattice, bilinearly
/// interpolated, so that gradients are well defined.
inline GrayImage smooth_texture(int w, int h, std::uint32_t seed, int cell = 3) {
  const int gw = w / cell + 3, gh = h / cell + 3;
  const GrayImage lattice = random_image(gw, gh, seed);
  GrayImage img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const double fx = double(x) / cell, fy = double(y) / cell;
      const int ix = int(fx), iy = int(fy);
      const double tx = fx - ix, ty = fy - iy;
      const double a = lattice(ix, iy), b = lattice(ix + 1, iy), c = lattice(ix, iy + 1), d = lattice(ix + 1, iy + 1);
      img(x, y) = static_cast<std::uint8_t>(std::lround((a * (1 - tx) + b * tx) * (1 - ty) + (c * (1 - tx) + d * tx) * ty));
    }
  return img;
}

/// right(x, y) = left(x + shift, y), so the true disparity is `shift`.
inline GrayImage shift_left(const GrayImage& left, int shift, std::uint8_t fill = 0) {
  GrayImage right(left.width(), left.height(), fill);
  for (int y = 0; y < left.height(); ++y)
    for (int x = 0; x + shift < left.width(); ++x) right(x, y) = left(x + shift, y);
  return right;
}

inline GrayImage fill_rect(GrayImage img, int x0, int y0, int w, int h, std::uint8_t v) {
  for (int y = y0; y < y0 + h; ++y)
    for (int x = x0; x < x0 + w; ++x)
      if (img.contains(x, y)) img(x, y) = v;
  return img;
}

// Straight-line reference of the segmentation pipeline, written directly
// from the definitions: 2-D convolution with the outer product of the
// quantized kernel, threshold, min/max over 3x3 neighbourhoods, and a
// seeded region grow scanned pixel by pixel.

inline std::vector<int> reference_kernel(double sigma) {
  double g[5], sum = 0;
  for (int i = 0; i < 5; ++i) {
    g[i] = std::exp(-((i - 2) * (i - 2)) / (2 * sigma * sigma));
    sum += g[i];
  }
  std::vector<int> q(5);
  int total = 0;
  for (int i = 0; i < 5; ++i) {
    q[i] = int(std::floor(256 * g[i] / sum + 0.5));
    total += q[i];
  }
  q[2] += 256 - total;
  return q;
}

inline GrayImage reference_blur(const GrayImage& in, double sigma) {
  const auto k = reference_kernel(sigma);
  const int w = in.width(), h = in.height();
  GrayImage out(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      long s = 0;
      for (int j = -2; j <= 2; ++j)
        for (int i = -2; i <= 2; ++i) {
          const int xx = std::min(std::max(x + i, 0), w - 1), yy = std::min(std::max(y + j, 0), h - 1);
          s += long(k[i + 2]) * k[j + 2] * in(xx, yy);
        }
      out(x, y) = static_cast<std::uint8_t>((s + 32768) / 65536);
    }
  return out;
}

inline GrayImage reference_morph(const GrayImage& in, bool dilate) {
  GrayImage out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y)
    for (int x = 0; x < in.width(); ++x) {
      int v = in(x, y);
      for (int j = -1; j <= 1; ++j)
        for (int i = -1; i <= 1; ++i)
          if (in.contains(x + i, y + j)) v = dilate ? std::max<int>(v, in(x + i, y + j)) : std::min<int>(v, in(x + i, y + j));
      out(x, y) = static_cast<std::uint8_t>(v);
    }
  return out;
}

inline GrayImage reference_preprocess(const GrayImage& in) {
  GrayImage g = reference_blur(in, 1.5);
  for (auto& v : g.pixels()) v = v < 50 ? 0 : v;
  for (int i = 0; i < 4; ++i) g = reference_morph(g, true);
  g = reference_blur(g, 2.0);
  for (int i = 0; i < 2; ++i) g = reference_morph(g, false);
  return g;
}

/// Mask of the selected region (all zero when missed).
inline Mask reference_select(GrayImage img, int min_area) {
  const int w = img.width(), h = img.height();
  while (true) {
    int best = -1, bx = 0, by = 0;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        if (img(x, y) > best) {
          best = img(x, y);
          bx = x;
          by = y;
        }
    Mask region(w, h, 0);
    if (best <= 0) return region;
    const double lo = best - best / 10.0, hi = best + best / 20.0;
    region(bx, by) = 1;
    // Grow until no change: a pixel joins when it is in range and touches the region.
    for (bool changed = true; changed;) {
      changed = false;
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
          if (region(x, y) || img(x, y) < lo || img(x, y) > hi) continue;
          const bool touches = (x > 0 && region(x - 1, y)) || (x + 1 < w && region(x + 1, y)) ||
                               (y > 0 && region(x, y - 1)) || (y + 1 < h && region(x, y + 1));
          if (touches) {
            region(x, y) = 1;
            changed = true;
          }
        }
    }
    int area = 0;
    for (auto v : region.pixels()) area += v;
    if (area >= min_area) return region;
    for (int i = 0; i < int(region.size()); ++i)
      if (region.data()[i]) img.data()[i] = 0;
  }
}

}  // namespace stereo::testing
