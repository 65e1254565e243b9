#include "stereo/elas.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <tuple>

#if defined(__SSE2__)
#include <emmintrin.h>
#endif

#include "stereo/error.hpp"
#include "stereo/parallel.hpp"

namespace stereo {

void ElasParams::validate() const {
  require(grid_step >= 1, Errc::InvalidParameter, "elas.grid_step must be >= 1");
  require(support_ratio > 0.0 && support_ratio < 1.0, Errc::InvalidParameter, "elas.support_ratio must be in (0,1)");
  require(consistency_tolerance >= 0, Errc::InvalidParameter, "elas.consistency_tolerance must be >= 0");
  require(min_support_texture >= 0, Errc::InvalidParameter, "elas.min_support_texture must be >= 0");
  require(support_window >= 0 && support_agreement >= 0 && min_support_neighbours >= 0, Errc::InvalidParameter,
          "elas support neighbourhood settings must be >= 0");
  require(gamma > 0.0 && gamma < 1.0, Errc::InvalidParameter, "elas.gamma must be in (0,1)");
  require(sigma > 0.0, Errc::InvalidParameter, "elas.sigma must be positive");
  require(beta > 0.0, Errc::InvalidParameter, "elas.beta must be positive");
  require(d_min >= 0 && d_max >= d_min && d_max <= 1000, Errc::InvalidParameter,
          "elas disparity range must satisfy 0 <= d_min <= d_max <= 1000");
  require(speckle_tolerance >= 0.0, Errc::InvalidParameter, "elas.speckle_tolerance must be >= 0");
  require(gap_width >= 0, Errc::InvalidParameter, "elas.gap_width must be >= 0");
}

ElasParams ElasParams::for_resolution(int width, int /*height*/) {
  ElasParams p;
  if (width >= 640) {
    p.d_max = 127;
    p.subsample = true;
  } else {
    p.d_max = 95;
  }
  return p;
}

Image<std::int16_t> sobel_horizontal(const GrayImage& img) {
  const int w = img.width(), h = img.height();
  Image<std::int16_t> out(w, h);
  for (int y = 0; y < h; ++y) {
    const int ys[3] = {clamp_index(y - 1, h), y, clamp_index(y + 1, h)};
    for (int x = 0; x < w; ++x) {
      const int xl = clamp_index(x - 1, w), xr = clamp_index(x + 1, w);
      int s = 0;
      for (int j = 0; j < 3; ++j) s += (j == 1 ? 2 : 1) * (int(img(xl, ys[j])) - int(img(xr, ys[j])));
      out(x, y) = static_cast<std::int16_t>(s);
    }
  }
  return out;
}

Image<std::int16_t> sobel_vertical(const GrayImage& img) {
  const int w = img.width(), h = img.height();
  Image<std::int16_t> out(w, h);
  for (int y = 0; y < h; ++y) {
    const int yt = clamp_index(y - 1, h), yb = clamp_index(y + 1, h);
    for (int x = 0; x < w; ++x) {
      const int xs[3] = {clamp_index(x - 1, w), x, clamp_index(x + 1, w)};
      int s = 0;
      for (int i = 0; i < 3; ++i) s += (i == 1 ? 2 : 1) * (int(img(xs[i], yt)) - int(img(xs[i], yb)));
      out(x, y) = static_cast<std::int16_t>(s);
    }
  }
  return out;
}

namespace {

std::uint8_t saturate_response(int s) noexcept { return static_cast<std::uint8_t>(std::clamp(s / 4, -127, 127) + 128); }

}  // namespace

DescriptorField compute_descriptors(const GrayImage& img) {
  const int w = img.width(), h = img.height();
  if (w < 5 || h < 5) throw Error(Errc::ImageTooSmall, "descriptors need at least a 5x5 image");
  const auto gx = sobel_horizontal(img);
  const auto gy = sobel_vertical(img);
  DescriptorField field(w, h);
  parallel_for(0, h, [&](int y0, int y1) {
    for (int y = y0; y < y1; ++y) {
      for (int x = 0; x < w; ++x) {
        std::uint8_t* d = field.at(x, y);
        for (int k = 0; k < 8; ++k) {
          const int sx = clamp_index(x + DescriptorField::kOffsets[k][0], w);
          const int sy = clamp_index(y + DescriptorField::kOffsets[k][1], h);
          d[k] = saturate_response(gx(sx, sy));
          d[8 + k] = saturate_response(gy(sx, sy));
        }
      }
    }
  });
  return field;
}

int descriptor_distance(const std::uint8_t* a, const std::uint8_t* b) noexcept {
#if defined(__SSE2__)
  const __m128i va = _mm_loadu_si128(reinterpret_cast<const __m128i*>(a));
  const __m128i vb = _mm_loadu_si128(reinterpret_cast<const __m128i*>(b));
  const __m128i s = _mm_sad_epu8(va, vb);
  return _mm_cvtsi128_si32(s) + _mm_extract_epi16(s, 4);
#else
  int s = 0;
  for (int k = 0; k < DescriptorField::kLength; ++k) s += std::abs(int(a[k]) - int(b[k]));
  return s;
#endif
}

namespace {

int texture(const std::uint8_t* d) noexcept {
  int s = 0;
  for (int k = 0; k < DescriptorField::kLength; ++k) s += std::abs(int(d[k]) - 128);
  return s;
}

struct BestTwo {
  int best_d = -1;
  int best = std::numeric_limits<int>::max();
  int second = std::numeric_limits<int>::max();
};

// Best disparity plus the best distance among candidates more than one
// pixel away from it.
template <typename Dist>
BestTwo best_two(int lo, int hi, Dist dist, std::vector<int>& buf) {
  BestTwo r;
  buf.resize(std::size_t(std::max(0, hi - lo + 1)));
  for (int d = lo; d <= hi; ++d) {
    const int c = dist(d);
    buf[d - lo] = c;
    if (c < r.best) {
      r.best = c;
      r.best_d = d;
    }
  }
  for (int d = lo; d <= hi; ++d)
    if (std::abs(d - r.best_d) > 1) r.second = std::min(r.second, buf[d - lo]);
  return r;
}

}  // namespace

std::vector<SupportPoint> extract_support_points(const DescriptorField& left, const DescriptorField& right,
                                                 const ElasParams& p) {
  p.validate();
  require(left.width() == right.width() && left.height() == right.height(), Errc::SizeMismatch,
          "descriptor fields differ in size");
  const int w = left.width(), h = left.height();
  std::vector<int> rows;
  for (int v = p.grid_step; v < h - 1; v += p.grid_step) rows.push_back(v);
  std::vector<std::vector<SupportPoint>> per_row(rows.size());

  parallel_for(0, static_cast<int>(rows.size()), [&](int r0, int r1) {
    std::vector<int> buf;
    for (int r = r0; r < r1; ++r) {
      const int v = rows[r];
      for (int u = p.grid_step; u < w - 1; u += p.grid_step) {
        const std::uint8_t* dl = left.at(u, v);
        if (texture(dl) < p.min_support_texture) continue;
        const int hi = std::min(p.d_max, u);
        if (hi < p.d_min) continue;
        const BestTwo m = best_two(p.d_min, hi, [&](int d) { return descriptor_distance(dl, right.at(u - d, v)); }, buf);
        if (m.best_d < 0 || m.second == std::numeric_limits<int>::max() || m.second == 0) continue;
        if (!(double(m.best) <= p.support_ratio * double(m.second))) continue;

        const int ur = u - m.best_d;
        const std::uint8_t* dr = right.at(ur, v);
        const int hi_r = std::min(p.d_max, w - 1 - ur);
        int back_d = -1, back_best = std::numeric_limits<int>::max();
        for (int d = p.d_min; d <= hi_r; ++d) {
          const int c = descriptor_distance(left.at(ur + d, v), dr);
          if (c < back_best) {
            back_best = c;
            back_d = d;
          }
        }
        if (back_d < 0 || std::abs(back_d - m.best_d) > p.consistency_tolerance) continue;
        per_row[r].push_back({u, v, m.best_d});
      }
    }
  });

  std::vector<SupportPoint> out;
  for (auto& row : per_row) out.insert(out.end(), row.begin(), row.end());
  return filter_isolated_supports(out, p);
}

std::vector<SupportPoint> filter_isolated_supports(std::span<const SupportPoint> supports, const ElasParams& p) {
  if (p.support_window == 0 || p.min_support_neighbours == 0) return {supports.begin(), supports.end()};
  const int reach = p.support_window * p.grid_step;
  std::vector<SupportPoint> out;
  for (std::size_t i = 0; i < supports.size(); ++i) {
    const SupportPoint& a = supports[i];
    int agree = 0;
    // Supports are ordered by row, so the scan can stop once rows are out of reach.
    for (std::size_t j = i; j-- > 0 && supports[j].v >= a.v - reach;)
      agree += std::abs(supports[j].u - a.u) <= reach && std::abs(supports[j].d - a.d) <= p.support_agreement;
    for (std::size_t j = i + 1; j < supports.size() && supports[j].v <= a.v + reach; ++j)
      agree += std::abs(supports[j].u - a.u) <= reach && std::abs(supports[j].d - a.d) <= p.support_agreement;
    if (agree >= p.min_support_neighbours) out.push_back(a);
  }
  return out;
}

Triangulation support_triangulation(std::span<const SupportPoint> supports, int width, int height) {
  std::vector<GridPoint> pts;
  pts.reserve(supports.size());
  for (const auto& s : supports) pts.push_back({s.u, s.v});
  return triangulate_rectangle(width - 1, height - 1, pts);
}

FloatImage support_prior_mean(std::span<const SupportPoint> supports, int width, int height, const ElasParams& p) {
  if (supports.empty()) throw Error(Errc::NoSupports, "no support points");
  const Triangulation tri = support_triangulation(supports, width, height);
  std::vector<double> vd(tri.vertices.size(), double(p.d_min));
  for (std::size_t i = 0; i < supports.size(); ++i) vd[i + 4] = supports[i].d;

  FloatImage mu(width, height, std::nanf(""));
  Mask filled(width, height, 0);
  for (const auto& t : tri.triangles) {
    const GridPoint a = tri.vertices[t[0]], b = tri.vertices[t[1]], c = tri.vertices[t[2]];
    const double den = double(orientation(a, b, c));
    if (den <= 0.0) continue;
    const double da = vd[t[0]], db = vd[t[1]], dc = vd[t[2]];
    const double gx = ((db - da) * (c.y - a.y) - (dc - da) * (b.y - a.y)) / den;
    const double gy = ((dc - da) * (b.x - a.x) - (db - da) * (c.x - a.x)) / den;
    const int x0 = std::min({a.x, b.x, c.x}), x1 = std::max({a.x, b.x, c.x});
    const int y0 = std::min({a.y, b.y, c.y}), y1 = std::max({a.y, b.y, c.y});
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        if (filled(x, y)) continue;
        const GridPoint q{x, y};
        if (orientation(a, b, q) < 0 || orientation(b, c, q) < 0 || orientation(c, a, q) < 0) continue;
        const double m = da + gx * (x - a.x) + gy * (y - a.y);
        // Quantized to the 1/16 px disparity grid.
        mu(x, y) = static_cast<float>(std::floor(m * 16.0 + 0.5) / 16.0);
        filled(x, y) = 1;
      }
    }
  }
  // Pixels missed by the rasterizer fall back to the nearest support.
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (filled(x, y)) continue;
      long best = std::numeric_limits<long>::max();
      for (const auto& s : supports) {
        const long dd = long(s.u - x) * (s.u - x) + long(s.v - y) * (s.v - y);
        if (dd < best) {
          best = dd;
          mu(x, y) = static_cast<float>(s.d);
        }
      }
    }
  }
  return mu;
}

double prior_penalty(int d, double mu, const ElasParams& p) noexcept {
  const double diff = double(d) - mu;
  if (std::abs(diff) <= 3.0 * p.sigma)
    return -std::log(p.gamma + (1.0 - p.gamma) * std::exp(-(diff * diff) / (2.0 * p.sigma * p.sigma)));
  return -std::log(p.gamma);
}

DisparityMap dense_disparity(const DescriptorField& left, const DescriptorField& right,
                             std::span<const SupportPoint> supports, const ElasParams& p) {
  if (supports.empty()) throw Error(Errc::NoSupports, "dense inference needs at least one support point");
  return dense_disparity(left, right, support_prior_mean(supports, left.width(), left.height(), p), p);
}

namespace {

// MAP inference for one view. For the left view the match of (u, v) is
// right(u - d, v); for the right view it is left(u + d, v).
DisparityMap dense_view(const DescriptorField& left, const DescriptorField& right, const FloatImage& prior_mean,
                        const ElasParams& p, bool right_view) {
  p.validate();
  require(left.width() == right.width() && left.height() == right.height(), Errc::SizeMismatch,
          "descriptor fields differ in size");
  require(prior_mean.width() == left.width() && prior_mean.height() == left.height(), Errc::SizeMismatch,
          "prior mean differs in size");
  const int w = left.width(), h = left.height();
  DisparityMap out(w, h, p.d_min, p.d_max);

  // Prior penalties depend on d - mu only through 16*d - 16*mu when mu is on
  // the 1/16 grid; tabulate them once. Off-grid means use the direct formula.
  const int reach = static_cast<int>(std::ceil(48.0 * p.sigma)) + 1;
  std::vector<double> table(2 * std::size_t(reach) + 1);
  for (int k = -reach; k <= reach; ++k) {
    const double diff = k / 16.0;
    table[k + reach] = std::abs(diff) <= 3.0 * p.sigma
                           ? -std::log(p.gamma + (1.0 - p.gamma) * std::exp(-(diff * diff) / (2.0 * p.sigma * p.sigma)))
                           : -std::log(p.gamma);
  }
  const double floor_penalty = -std::log(p.gamma);

  parallel_for(0, h, [&](int y0, int y1) {
    std::vector<double> energy(std::size_t(p.d_max - p.d_min + 1));
    for (int v = y0; v < y1; ++v) {
      if (p.subsample && (v & 1)) continue;
      for (int u = 0; u < w; ++u) {
        if (p.subsample && (u & 1)) continue;
        const int hi = std::min(p.d_max, right_view ? w - 1 - u : u);
        if (hi < p.d_min) continue;
        const double mu = prior_mean(u, v);
        const double mu16 = mu * 16.0;
        const bool on_grid = std::isfinite(mu) && mu16 == std::floor(mu16) && std::abs(mu16) < 1e6;
        const int mu_q = on_grid ? static_cast<int>(mu16) : 0;
        const DescriptorField& ref = right_view ? right : left;
        const DescriptorField& other = right_view ? left : right;
        const int step = right_view ? 1 : -1;
        const std::uint8_t* dl = ref.at(u, v);

        double best = std::numeric_limits<double>::infinity();
        int best_d = -1;
        for (int d = p.d_min; d <= hi; ++d) {
          double pen;
          if (on_grid) {
            const int k = 16 * d - mu_q;
            pen = (k >= -reach && k <= reach) ? table[k + reach] : floor_penalty;
          } else {
            pen = prior_penalty(d, mu, p);
          }
          const double e = p.beta * descriptor_distance(dl, other.at(u + step * d, v)) + pen;
          energy[d - p.d_min] = e;
          if (e < best) {
            best = e;
            best_d = d;
          }
        }
        if (best_d < 0) continue;
        double value = best_d;
        if (p.subpixel && best_d > p.d_min && best_d < hi) {
          const double em = energy[best_d - 1 - p.d_min];
          const double ep = energy[best_d + 1 - p.d_min];
          const double denom = em - 2.0 * best + ep;
          if (denom > 0.0) value += std::clamp((em - ep) / (2.0 * denom), -0.5, 0.5);
        }
        out.set(u, v, value);
      }
    }
  });
  return out;
}

}  // namespace

DisparityMap dense_disparity(const DescriptorField& left, const DescriptorField& right, const FloatImage& prior_mean,
                             const ElasParams& p) {
  return dense_view(left, right, prior_mean, p, false);
}

DisparityMap dense_disparity_right(const DescriptorField& left, const DescriptorField& right,
                                   const FloatImage& prior_mean, const ElasParams& p) {
  return dense_view(left, right, prior_mean, p, true);
}

std::vector<SupportPoint> right_view_supports(std::span<const SupportPoint> supports, int width) {
  std::vector<SupportPoint> out;
  for (const auto& s : supports) {
    const int ur = s.u - s.d;
    if (ur > 0 && ur < width - 1) out.push_back({ur, s.v, s.d});
  }
  // Where two supports land on the same right pixel the nearer one is visible.
  std::sort(out.begin(), out.end(), [](const SupportPoint& a, const SupportPoint& b) {
    return std::tie(a.v, a.u, b.d) < std::tie(b.v, b.u, a.d);
  });
  out.erase(std::unique(out.begin(), out.end(),
                        [](const SupportPoint& a, const SupportPoint& b) { return a.u == b.u && a.v == b.v; }),
            out.end());
  return out;
}

namespace {

void invalidate_speckles(DisparityMap& map, double tolerance) {
  const int w = map.width(), h = map.height();
  const DisparityMap src = map;
  const int tol = static_cast<int>(std::floor(tolerance * DisparityMap::kScale + 1e-9));
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!src.valid(x, y)) continue;
      int vals[9];
      int n = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const int xx = x + dx, yy = y + dy;
          if (xx < 0 || yy < 0 || xx >= w || yy >= h || !src.valid(xx, yy)) continue;
          vals[n++] = src.raw(xx, yy);
        }
      std::nth_element(vals, vals + n / 2, vals + n);
      if (std::abs(int(src.raw(x, y)) - vals[n / 2]) > tol) map.invalidate(x, y);
    }
  }
}

void fill_gaps(DisparityMap& map, int max_gap) {
  for (int y = 0; y < map.height(); ++y) {
    int last_valid = -1;
    for (int x = 0; x < map.width(); ++x) {
      if (!map.valid(x, y)) continue;
      const int gap = x - last_valid - 1;
      if (last_valid >= 0 && gap > 0 && gap <= max_gap) {
        const double a = map.raw(last_valid, y), b = map.raw(x, y);
        for (int k = 1; k <= gap; ++k)
          map.set(last_valid + k, y, (a + (b - a) * k / (gap + 1)) / DisparityMap::kScale);
      }
      last_valid = x;
    }
  }
}

DisparityMap upsample_even_grid(const DisparityMap& half, int width, int height) {
  DisparityMap out(width, height, half.d_min(), half.d_max());
  const int hw = half.width(), hh = half.height();
  for (int y = 0; y < height; ++y) {
    const int y0 = std::min(y / 2, hh - 1), y1 = std::min(y0 + (y & 1), hh - 1);
    const double ay = (y & 1) ? 0.5 : 0.0;
    for (int x = 0; x < width; ++x) {
      const int x0 = std::min(x / 2, hw - 1), x1 = std::min(x0 + (x & 1), hw - 1);
      const double ax = (x & 1) ? 0.5 : 0.0;
      const int xs[4] = {x0, x1, x0, x1}, ys[4] = {y0, y0, y1, y1};
      const double ws[4] = {(1 - ax) * (1 - ay), ax * (1 - ay), (1 - ax) * ay, ax * ay};
      double acc = 0.0, wsum = 0.0;
      for (int k = 0; k < 4; ++k) {
        if (ws[k] == 0.0 || !half.valid(xs[k], ys[k])) continue;
        acc += ws[k] * half.raw(xs[k], ys[k]);
        wsum += ws[k];
      }
      if (wsum > 0.0) out.set(x, y, acc / wsum / DisparityMap::kScale);
    }
  }
  return out;
}

}  // namespace

DisparityMap postprocess(const DisparityMap& map, const ElasParams& p) {
  p.validate();
  if (!p.subsample) {
    DisparityMap out = map;
    invalidate_speckles(out, p.speckle_tolerance);
    fill_gaps(out, p.gap_width);
    return out;
  }
  const int hw = (map.width() + 1) / 2, hh = (map.height() + 1) / 2;
  DisparityMap half(hw, hh, map.d_min(), map.d_max());
  for (int y = 0; y < hh; ++y)
    for (int x = 0; x < hw; ++x) half.set_raw(x, y, map.raw(2 * x, 2 * y));
  invalidate_speckles(half, p.speckle_tolerance);
  fill_gaps(half, p.gap_width);
  return upsample_even_grid(half, map.width(), map.height());
}

void left_right_check(DisparityMap& left, const DisparityMap& right, int tolerance) {
  require(left.width() == right.width() && left.height() == right.height(), Errc::SizeMismatch,
          "left/right maps differ in size");
  const int w = left.width();
  for (int y = 0; y < left.height(); ++y) {
    for (int x = 0; x < w; ++x) {
      if (!left.valid(x, y)) continue;
      const double d = left.at(x, y);
      const int xr = static_cast<int>(std::floor(x - d + 0.5));
      bool ok = false;
      for (int off : {0, -1, 1}) {
        const int xx = xr + off;
        if (xx < 0 || xx >= w || !right.valid(xx, y)) continue;
        ok = std::abs(right.at(xx, y) - d) <= tolerance;
        break;
      }
      if (!ok) left.invalidate(x, y);
    }
  }
}

GrayImage mirror_horizontal(const GrayImage& img) {
  GrayImage out(img.width(), img.height());
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) out(x, y) = img(img.width() - 1 - x, y);
  return out;
}

ElasPair compute_elas_pair(const GrayImage& left, const GrayImage& right, const ElasParams& p) {
  p.validate();
  require(left.same_size(right), Errc::SizeMismatch, "left and right images differ in size");
  const int w = left.width(), h = left.height();
  ElasPair out{DisparityMap(w, h, p.d_min, p.d_max), DisparityMap(w, h, p.d_min, p.d_max)};
  const auto dl = compute_descriptors(left);
  const auto dr = compute_descriptors(right);
  const auto supports = extract_support_points(dl, dr, p);
  if (supports.empty()) return out;
  out.left = dense_disparity(dl, dr, supports, p);
  if (p.lr_tolerance >= 0) {
    const auto rs = right_view_supports(supports, w);
    if (rs.empty()) return {DisparityMap(w, h, p.d_min, p.d_max), DisparityMap(w, h, p.d_min, p.d_max)};
    out.right = dense_disparity_right(dl, dr, support_prior_mean(rs, w, h, p), p);
    left_right_check(out.left, out.right, p.lr_tolerance);
  }
  out.left = postprocess(out.left, p);
  if (!p.left_only) out.right = postprocess(out.right, p);
  return out;
}

DisparityMap compute_elas(const GrayImage& left, const GrayImage& right, const ElasParams& p) {
  return compute_elas_pair(left, right, p).left;
}

}  // namespace stereo
