#include "stereo/eval.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "stereo/error.hpp"
#include "stereo/keyvalue.hpp"

namespace stereo {
namespace {

bool wrong_detection(const TrackRecord& r, const Mask& m) {
  bool any = false;
  for (auto v : m.pixels()) any = any || v;
  if (!any) return r.detected;
  if (!r.detected || !r.raw_centroid) return false;
  const int u = static_cast<int>(std::lround(r.raw_centroid->x()));
  const int v = static_cast<int>(std::lround(r.raw_centroid->y()));
  return !m.contains(u, v) || !m(u, v);
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0;
  double s = 0;
  for (double x : v) s += x;
  return s / double(v.size());
}

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

double missed_blob_ratio(std::span<const TrackRecord> records, std::span<const Mask> gt_masks) {
  require(!records.empty(), Errc::EmptyInput, "no records");
  require(gt_masks.empty() || gt_masks.size() == records.size(), Errc::LengthMismatch,
          "gt masks must match the records one to one");
  std::size_t bad = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!gt_masks.empty()) {
      bool any = false;
      for (auto v : gt_masks[i].pixels()) any = any || v;
      if (!any) {
        bad += records[i].detected;
        continue;
      }
      if (wrong_detection(records[i], gt_masks[i])) {
        ++bad;
        continue;
      }
    }
    bad += !records[i].detected;
  }
  return 100.0 * double(bad) / double(records.size());
}

BadPixelStats bad_pixel_rate(const DisparityMap& map, const FloatImage& gt, double threshold, const Mask* eval_mask) {
  require(map.width() == gt.width() && map.height() == gt.height(), Errc::SizeMismatch,
          "disparity and ground truth differ in size");
  require(!eval_mask || (eval_mask->width() == gt.width() && eval_mask->height() == gt.height()), Errc::SizeMismatch,
          "evaluation mask differs in size");
  BadPixelStats s;
  std::size_t valid = 0, bad = 0;
  for (int y = 0; y < gt.height(); ++y)
    for (int x = 0; x < gt.width(); ++x) {
      const float g = gt(x, y);
      if (!std::isfinite(g) || g < 0 || (eval_mask && !(*eval_mask)(x, y))) continue;
      ++s.evaluated;
      if (!map.valid(x, y)) continue;
      ++valid;
      bad += std::abs(double(map.at(x, y)) - g) > threshold;
    }
  s.density_percent = s.evaluated ? 100.0 * double(valid) / double(s.evaluated) : 0.0;
  s.bad_percent = valid ? 100.0 * double(bad) / double(valid) : 0.0;
  return s;
}

BadPixelStats bad_pixel_rate(const DisparityMap& map, const DisparityMap& gt, double threshold,
                             const Mask* eval_mask) {
  return bad_pixel_rate(map, to_float(gt), threshold, eval_mask);
}

Mask evaluation_mask(const FloatImage& gt, const Mask& occluded, int band) {
  require(gt.same_size(occluded), Errc::SizeMismatch, "gt and occlusion mask differ in size");
  const int w = gt.width(), h = gt.height();
  auto has_gt = [&](int x, int y) { return std::isfinite(gt(x, y)) && gt(x, y) >= 0; };
  Mask source(w, h, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (occluded(x, y)) {
        source(x, y) = 1;
        continue;
      }
      if (!has_gt(x, y)) continue;
      for (const auto& [dx, dy] : {std::pair{1, 0}, std::pair{0, 1}}) {
        const int xx = x + dx, yy = y + dy;
        if (xx >= w || yy >= h || !has_gt(xx, yy)) continue;
        if (std::abs(gt(xx, yy) - gt(x, y)) > 1.0f) source(x, y) = source(xx, yy) = 1;
      }
    }
  Mask out(w, h, 0);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!has_gt(x, y)) continue;
      bool near = false;
      for (int yy = std::max(0, y - band); yy <= std::min(h - 1, y + band) && !near; ++yy)
        for (int xx = std::max(0, x - band); xx <= std::min(w - 1, x + band) && !near; ++xx) near = source(xx, yy);
      out(x, y) = !near;
    }
  return out;
}

std::vector<std::pair<std::string, std::string>> parameter_dump(const TrackerParams& p) {
  std::vector<std::pair<std::string, std::string>> d;
  auto add = [&](const std::string& k, double v) { d.emplace_back(k, format_double(v)); };
  d.emplace_back("matcher", to_string(p.matcher.id));
  const auto& e = p.matcher.elas;
  add("elas.grid_step", e.grid_step);
  add("elas.support_ratio", e.support_ratio);
  add("elas.consistency_tolerance", e.consistency_tolerance);
  add("elas.min_support_texture", e.min_support_texture);
  add("elas.support_window", e.support_window);
  add("elas.support_agreement", e.support_agreement);
  add("elas.min_support_neighbours", e.min_support_neighbours);
  add("elas.gamma", e.gamma);
  add("elas.sigma", e.sigma);
  add("elas.beta", e.beta);
  add("elas.d_min", e.d_min);
  add("elas.d_max", e.d_max);
  add("elas.lr_tolerance", e.lr_tolerance);
  add("elas.left_only", e.left_only);
  add("elas.subsample", e.subsample);
  add("elas.subpixel", e.subpixel);
  add("elas.speckle_tolerance", e.speckle_tolerance);
  add("elas.gap_width", e.gap_width);
  const auto& s = p.matcher.sgbm;
  add("sgbm.pre_filter_cap", s.pre_filter_cap);
  add("sgbm.sad_window", s.sad_window);
  add("sgbm.p1", s.p1);
  add("sgbm.p2", s.p2);
  add("sgbm.uniqueness_ratio", s.uniqueness_ratio);
  add("sgbm.speckle_window", s.speckle_window);
  add("sgbm.speckle_range", s.speckle_range);
  add("sgbm.disp12_max_diff", s.disp12_max_diff);
  add("sgbm.d_min", s.d_min);
  add("sgbm.d_max", s.d_max);
  add("sgbm.directions", s.directions);
  add("sgbm.subpixel", s.subpixel);
  const auto& g = p.seg;
  add("seg.blur_size", g.blur_size);
  add("seg.blur1_sigma", g.blur1_sigma);
  add("seg.threshold", g.threshold);
  add("seg.dilations", g.dilations);
  add("seg.blur2_sigma", g.blur2_sigma);
  add("seg.erosions", g.erosions);
  add("seg.u_plus", g.u_plus);
  add("seg.u_minus", g.u_minus);
  add("seg.min_blob_area", g.min_blob_area);
  add("seg.roi_margin", g.roi_margin);
  add("seg.buffer_len", g.buffer_len);
  add("gaze.alpha", p.gaze_alpha);
  return d;
}

BenchReport run_benchmark(std::span<const BenchFrame> sequence, const StereoRig& rig, const TrackerParams& params) {
  require(!sequence.empty(), Errc::EmptyInput, "benchmark sequence is empty");
  BenchReport rep;
  rep.matcher = to_string(params.matcher.id);
  rep.width = sequence.front().left.width();
  rep.height = sequence.front().left.height();
  rep.d_min = params.matcher.id == MatcherId::Elas ? params.matcher.elas.d_min : params.matcher.sgbm.d_min;
  rep.d_max = params.matcher.d_max();
  rep.params = parameter_dump(params);

  AttentionTracker tracker(rig, params);
  std::vector<double> disp, seg, total, bad1, bad2, dens;
  std::vector<TrackRecord> records;
  std::vector<Mask> masks;
  bool all_masks = true;
  for (const auto& f : sequence) {
    TrackStep st;
    try {
      st = tracker.step(f.left, f.right);
    } catch (const Error& e) {
      rep.partial = true;
      rep.error = e.what();
      std::replace_if(rep.error.begin(), rep.error.end(), [](char c) { return c == '\n' || c == '#'; }, ' ');
      break;
    }
    BenchFrameRow row;
    row.frame = st.record.frame;
    row.detected = st.record.detected;
    row.disp_ms = st.record.timings.disp_ms;
    row.seg_ms = st.record.timings.seg_ms;
    row.total_ms = st.record.timings.total_ms;
    if (f.target_mask) {
      row.wrong = st.record.detected && wrong_detection(st.record, *f.target_mask);
      masks.push_back(*f.target_mask);
    } else {
      all_masks = false;
    }
    if (f.gt_disparity) {
      const Mask* m = f.eval_mask ? &*f.eval_mask : nullptr;
      const auto b1 = bad_pixel_rate(st.disparity, *f.gt_disparity, 1.0, m);
      const auto b2 = bad_pixel_rate(st.disparity, *f.gt_disparity, 2.0, m);
      row.bad1 = b1.bad_percent;
      row.bad2 = b2.bad_percent;
      row.density = b1.density_percent;
      bad1.push_back(row.bad1);
      bad2.push_back(row.bad2);
      dens.push_back(row.density);
    }
    disp.push_back(row.disp_ms);
    seg.push_back(row.seg_ms);
    total.push_back(row.total_ms);
    records.push_back(st.record);
    rep.rows.push_back(row);
  }
  rep.frames = static_cast<int>(rep.rows.size());
  rep.mean_disp_ms = mean(disp);
  rep.mean_seg_ms = mean(seg);
  rep.mean_total_ms = mean(total);
  rep.median_disp_ms = median(disp);
  rep.median_seg_ms = median(seg);
  rep.median_total_ms = median(total);
  if (!records.empty())
    rep.missed_percent = all_masks ? missed_blob_ratio(records, masks) : missed_blob_ratio(records);
  if (!bad1.empty()) {
    rep.bad1_percent = mean(bad1);
    rep.bad2_percent = mean(bad2);
    rep.density_percent = mean(dens);
  }
  return rep;
}

namespace {
constexpr const char* kAppendix = "# per-frame";
constexpr const char* kCsvHeader = "frame,detected,wrong,disp_ms,seg_ms,total_ms,bad1,bad2,density";
}  // namespace

std::string BenchReport::to_text() const {
  KeyValueFile kv;
  kv.set("matcher", matcher);
  kv.set("width", width);
  kv.set("height", height);
  kv.set("d_min", d_min);
  kv.set("d_max", d_max);
  kv.set("frames", frames);
  kv.set("mean_disp_ms", mean_disp_ms);
  kv.set("mean_seg_ms", mean_seg_ms);
  kv.set("mean_total_ms", mean_total_ms);
  kv.set("median_disp_ms", median_disp_ms);
  kv.set("median_seg_ms", median_seg_ms);
  kv.set("median_total_ms", median_total_ms);
  kv.set("missed_percent", missed_percent);
  kv.set("bad1_percent", bad1_percent);
  kv.set("bad2_percent", bad2_percent);
  kv.set("density_percent", density_percent);
  kv.set("partial", partial);
  kv.set("error", error);
  for (const auto& [k, v] : params) kv.set("param." + k, v);
  std::ostringstream out;
  out << kv.to_string() << kAppendix << "\n" << kCsvHeader << "\n";
  for (const auto& r : rows)
    out << r.frame << ',' << int(r.detected) << ',' << int(r.wrong) << ',' << format_double(r.disp_ms) << ','
        << format_double(r.seg_ms) << ',' << format_double(r.total_ms) << ',' << format_double(r.bad1) << ','
        << format_double(r.bad2) << ',' << format_double(r.density) << "\n";
  return out.str();
}

BenchReport BenchReport::parse(const std::string& text) {
  const std::size_t split = text.find(std::string(kAppendix) + "\n");
  require(split != std::string::npos, Errc::MalformedHeader, "report has no per-frame appendix");
  const auto kv = KeyValueFile::parse(text.substr(0, split));
  BenchReport r;
  r.matcher = kv.get("matcher");
  r.width = kv.get_int("width");
  r.height = kv.get_int("height");
  r.d_min = kv.get_int("d_min");
  r.d_max = kv.get_int("d_max");
  r.frames = kv.get_int("frames");
  r.mean_disp_ms = kv.get_double("mean_disp_ms");
  r.mean_seg_ms = kv.get_double("mean_seg_ms");
  r.mean_total_ms = kv.get_double("mean_total_ms");
  r.median_disp_ms = kv.get_double("median_disp_ms");
  r.median_seg_ms = kv.get_double("median_seg_ms");
  r.median_total_ms = kv.get_double("median_total_ms");
  r.missed_percent = kv.get_double("missed_percent");
  r.bad1_percent = kv.get_double("bad1_percent");
  r.bad2_percent = kv.get_double("bad2_percent");
  r.density_percent = kv.get_double("density_percent");
  r.partial = kv.get_bool("partial", false);
  r.error = kv.get("error");
  for (const auto& k : kv.keys())
    if (k.rfind("param.", 0) == 0) r.params.emplace_back(k.substr(6), kv.get(k));

  std::istringstream in(text.substr(split + std::string(kAppendix).size() + 1));
  std::string line;
  std::getline(in, line);
  require(line == kCsvHeader, Errc::MalformedHeader, "unexpected per-frame header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    require(f.size() == 9, Errc::MalformedHeader, "per-frame row needs 9 fields: " + line);
    BenchFrameRow row;
    row.frame = parse_int(f[0]);
    row.detected = parse_int(f[1]) != 0;
    row.wrong = parse_int(f[2]) != 0;
    row.disp_ms = parse_double(f[3]);
    row.seg_ms = parse_double(f[4]);
    row.total_ms = parse_double(f[5]);
    row.bad1 = parse_double(f[6]);
    row.bad2 = parse_double(f[7]);
    row.density = parse_double(f[8]);
    r.rows.push_back(row);
  }
  return r;
}

}  // namespace stereo
