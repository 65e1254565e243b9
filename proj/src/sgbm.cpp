#include "stereo/sgbm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "stereo/elas.hpp"
#include "stereo/error.hpp"
#include "stereo/parallel.hpp"

namespace stereo {

void SgbmParams::validate() const {
  require(sad_window >= 3 && sad_window % 2 == 1, Errc::InvalidParameter, "sgbm.sad_window must be odd and >= 3");
  require(p1 >= 0 && p2 >= p1, Errc::InvalidParameter, "sgbm penalties must satisfy p2 >= p1 >= 0");
  require(uniqueness_ratio >= 0 && uniqueness_ratio <= 100, Errc::InvalidParameter,
          "sgbm.uniqueness_ratio must be in [0,100]");
  require(pre_filter_cap >= 1 && pre_filter_cap <= 1020, Errc::InvalidParameter,
          "sgbm.pre_filter_cap must be in [1,1020]");
  require(speckle_window >= 0 && speckle_range >= 0, Errc::InvalidParameter, "sgbm speckle settings must be >= 0");
  require(d_min >= 0 && d_max >= d_min && d_max <= 1000, Errc::InvalidParameter,
          "sgbm disparity range must satisfy 0 <= d_min <= d_max <= 1000");
  require(directions >= 1 && directions <= 4, Errc::InvalidParameter, "sgbm.directions must be in [1,4]");
  // Aggregated costs are held in 16 bits.
  const long max_cost = long(sad_window) * sad_window * 2 * pre_filter_cap + p2;
  require(max_cost * directions < 65535, Errc::InvalidParameter, "sgbm cost range exceeds 16 bits");
}

SgbmParams SgbmParams::for_resolution(int width, int /*height*/) {
  SgbmParams p;
  p.d_max = width >= 640 ? 127 : 95;
  return p;
}

Image<std::int16_t> prefilter_xsobel(const GrayImage& img, int cap) {
  auto g = sobel_horizontal(img);
  for (auto& v : g.pixels()) v = static_cast<std::int16_t>(std::clamp<int>(v, -cap, cap));
  return g;
}

namespace {

using Cost = std::uint16_t;

struct Volume {
  int w, h, nd;
  std::vector<Cost> data;
  Volume(int w_, int h_, int nd_) : w(w_), h(h_), nd(nd_), data(std::size_t(w_) * h_ * nd_) {}
  Cost* at(int x, int y) { return data.data() + (std::size_t(y) * w + x) * nd; }
  const Cost* at(int x, int y) const { return data.data() + (std::size_t(y) * w + x) * nd; }
};

// Windowed SAD over the prefiltered images with replicated borders. Candidates
// reaching past the left edge (x < d) get the pixel's lowest valid cost, which
// leaves path aggregation unbiased; they are never selected.
Volume sad_volume(const Image<std::int16_t>& lf, const Image<std::int16_t>& rf, const SgbmParams& p) {
  const int w = lf.width(), h = lf.height(), nd = p.d_max - p.d_min + 1, r = p.sad_window / 2;
  Volume vol(w, h, nd);

  parallel_for(0, h, [&](int y0, int y1) {
    std::vector<int> col(std::size_t(w) * nd, 0);
    auto add_row = [&](int yy, int sign) {
      for (int x = 0; x < w; ++x) {
        const int lv = lf(x, yy);
        int* c = col.data() + std::size_t(x) * nd;
        for (int k = 0; k < nd; ++k) c[k] += sign * std::abs(lv - rf(std::max(x - (p.d_min + k), 0), yy));
      }
    };
    for (int j = -r; j <= r; ++j) add_row(clamp_index(y0 + j, h), +1);
    std::vector<int> acc(nd);
    for (int y = y0; y < y1; ++y) {
      if (y > y0) {
        add_row(clamp_index(y - 1 - r, h), -1);
        add_row(clamp_index(y + r, h), +1);
      }
      std::fill(acc.begin(), acc.end(), 0);
      for (int i = -r; i <= r; ++i) {
        const int* c = col.data() + std::size_t(clamp_index(i, w)) * nd;
        for (int k = 0; k < nd; ++k) acc[k] += c[k];
      }
      for (int x = 0; x < w; ++x) {
        if (x > 0) {
          const int* out = col.data() + std::size_t(clamp_index(x - 1 - r, w)) * nd;
          const int* in = col.data() + std::size_t(clamp_index(x + r, w)) * nd;
          for (int k = 0; k < nd; ++k) acc[k] += in[k] - out[k];
        }
        Cost* dst = vol.at(x, y);
        const int valid = std::clamp(x - p.d_min + 1, 0, nd);
        int fill = 0;
        if (valid > 0) fill = *std::min_element(acc.begin(), acc.begin() + valid);
        for (int k = 0; k < nd; ++k) dst[k] = static_cast<Cost>(k < valid ? acc[k] : fill);
      }
    }
  });
  return vol;
}

// One step of path aggregation: cur = C + min(prev[d], prev[d±1] + P1,
// min(prev) + P2) - min(prev). A null prev starts the path.
inline void aggregate_step(const Cost* cost, const Cost* prev, Cost* cur, int nd, int p1, int p2) {
  if (prev == nullptr) {
    std::copy(cost, cost + nd, cur);
    return;
  }
  int min_prev = std::numeric_limits<int>::max();
  for (int k = 0; k < nd; ++k) min_prev = std::min<int>(min_prev, prev[k]);
  for (int k = 0; k < nd; ++k) {
    int best = prev[k];
    if (k > 0) best = std::min(best, prev[k - 1] + p1);
    if (k + 1 < nd) best = std::min(best, prev[k + 1] + p1);
    best = std::min(best, min_prev + p2);
    cur[k] = static_cast<Cost>(cost[k] + best - min_prev);
  }
}

Volume aggregate(const Volume& cost, const SgbmParams& p) {
  const int w = cost.w, h = cost.h, nd = cost.nd;
  Volume sum(w, h, nd);
  // Horizontal paths are independent per row.
  parallel_for(0, h, [&](int y0, int y1) {
    std::vector<Cost> a(std::size_t(w) * nd), b(std::size_t(w) * nd);
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x)
        aggregate_step(cost.at(x, y), x > 0 ? a.data() + std::size_t(x - 1) * nd : nullptr,
                       a.data() + std::size_t(x) * nd, nd, p.p1, p.p2);
      if (p.directions >= 2)
        for (int x = w - 1; x >= 0; --x)
          aggregate_step(cost.at(x, y), x < w - 1 ? b.data() + std::size_t(x + 1) * nd : nullptr,
                         b.data() + std::size_t(x) * nd, nd, p.p1, p.p2);
      for (int x = 0; x < w; ++x) {
        Cost* s = sum.at(x, y);
        const Cost* la = a.data() + std::size_t(x) * nd;
        const Cost* lb = b.data() + std::size_t(x) * nd;
        for (int k = 0; k < nd; ++k) s[k] = static_cast<Cost>(la[k] + (p.directions >= 2 ? lb[k] : 0));
      }
    }
  });
  if (p.directions <= 2) return sum;

  // Top-down and diagonal paths carry state from the previous row.
  std::vector<Cost> down_prev(std::size_t(w) * nd), down_cur(down_prev.size());
  std::vector<Cost> diag_prev(down_prev.size()), diag_cur(down_prev.size());
  for (int y = 0; y < h; ++y) {
    parallel_for(0, w, [&](int x0, int x1) {
      for (int x = x0; x < x1; ++x) {
        const std::size_t o = std::size_t(x) * nd;
        aggregate_step(cost.at(x, y), y > 0 ? down_prev.data() + o : nullptr, down_cur.data() + o, nd, p.p1, p.p2);
        if (p.directions >= 4)
          aggregate_step(cost.at(x, y), (y > 0 && x > 0) ? diag_prev.data() + o - nd : nullptr, diag_cur.data() + o,
                         nd, p.p1, p.p2);
        Cost* s = sum.at(x, y);
        for (int k = 0; k < nd; ++k)
          s[k] = static_cast<Cost>(s[k] + down_cur[o + k] + (p.directions >= 4 ? diag_cur[o + k] : 0));
      }
    });
    std::swap(down_prev, down_cur);
    std::swap(diag_prev, diag_cur);
  }
  return sum;
}

}  // namespace

DisparityMap block_match(const GrayImage& left, const GrayImage& right, const SgbmParams& p) {
  p.validate();
  require(left.same_size(right), Errc::SizeMismatch, "left and right images differ in size");
  const int w = left.width(), h = left.height(), nd = p.d_max - p.d_min + 1;
  if (w <= p.d_max + p.sad_window || h < p.sad_window)
    throw Error(Errc::ImageTooSmall, "image must be wider than d_max + sad_window");

  const Volume cost = sad_volume(prefilter_xsobel(left, p.pre_filter_cap), prefilter_xsobel(right, p.pre_filter_cap), p);
  const Volume sum = aggregate(cost, p);

  DisparityMap out(w, h, p.d_min, p.d_max);
  Image<int> winner(w, h, -1);
  parallel_for(0, h, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        if (x < p.d_min) continue;
        const Cost* s = sum.at(x, y);
        const int kn = std::min(nd, x - p.d_min + 1);
        int best_k = 0;
        for (int k = 1; k < kn; ++k)
          if (s[k] < s[best_k]) best_k = k;
        if (p.uniqueness_ratio > 0) {
          bool unique = true;
          for (int k = 0; k < kn && unique; ++k)
            if (std::abs(k - best_k) > 1 && long(s[k]) * (100 - p.uniqueness_ratio) <= long(s[best_k]) * 100)
              unique = false;
          if (!unique) continue;
        }
        winner(x, y) = p.d_min + best_k;
        double d = p.d_min + best_k;
        if (p.subpixel && best_k > 0 && best_k + 1 < kn) {
          const double denom = double(s[best_k - 1]) + s[best_k + 1] - 2.0 * s[best_k];
          if (denom > 0.0) d += std::clamp((double(s[best_k - 1]) - s[best_k + 1]) / (2.0 * denom), -0.5, 0.5);
        }
        out.set(x, y, d);
      }
    }
  });

  if (p.disp12_max_diff >= 0) {
    parallel_for(0, h, [&](int y0, int y1) {
      std::vector<int> right_disp(w);
      for (int y = y0; y < y1; ++y) {
        for (int xr = 0; xr < w; ++xr) {
          int best = std::numeric_limits<int>::max(), best_d = -1;
          for (int k = 0; k < nd; ++k) {
            const int x = xr + p.d_min + k;
            if (x >= w) break;
            const int c = sum.at(x, y)[k];
            if (c < best) {
              best = c;
              best_d = p.d_min + k;
            }
          }
          right_disp[xr] = best_d;
        }
        for (int x = 0; x < w; ++x) {
          const int d = winner(x, y);
          if (d < 0) continue;
          const int rd = right_disp[x - d];
          if (rd < 0 || std::abs(rd - d) > p.disp12_max_diff) out.invalidate(x, y);
        }
      }
    });
  }

  if (p.speckle_window > 0) filter_speckles(out, p.speckle_window, p.speckle_range);
  return out;
}

void filter_speckles(DisparityMap& map, int max_size, int max_diff) {
  const int w = map.width(), h = map.height();
  const int range = max_diff * DisparityMap::kScale;
  Image<int> label(w, h, -1);
  std::vector<int> stack, members;
  int next = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!map.valid(x, y) || label(x, y) >= 0) continue;
      members.clear();
      stack.assign(1, y * w + x);
      label(x, y) = next;
      while (!stack.empty()) {
        const int idx = stack.back();
        stack.pop_back();
        members.push_back(idx);
        const int cx = idx % w, cy = idx / w;
        const int cv = map.raw(cx, cy);
        const int nx[4] = {cx - 1, cx + 1, cx, cx};
        const int ny[4] = {cy, cy, cy - 1, cy + 1};
        for (int k = 0; k < 4; ++k) {
          if (nx[k] < 0 || ny[k] < 0 || nx[k] >= w || ny[k] >= h) continue;
          if (!map.valid(nx[k], ny[k]) || label(nx[k], ny[k]) >= 0) continue;
          if (std::abs(map.raw(nx[k], ny[k]) - cv) > range) continue;
          label(nx[k], ny[k]) = next;
          stack.push_back(ny[k] * w + nx[k]);
        }
      }
      if (static_cast<int>(members.size()) < max_size)
        for (int idx : members) map.invalidate(idx % w, idx / w);
      ++next;
    }
  }
}

}  // namespace stereo
