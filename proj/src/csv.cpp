#include "stereo/csv.hpp"

#include <sstream>

#include "stereo/keyvalue.hpp"

namespace stereo {

std::string track_csv(std::span<const TrackRecord> records) {
  std::ostringstream out;
  out << "frame,hit,u,v,x,y,z,t_rect_ms,t_disp_ms,t_seg_ms\n";
  for (const auto& r : records) {
    out << r.frame << ',' << int(r.hit()) << ',';
    if (r.hit())
      out << format_double(r.centroid->x()) << ',' << format_double(r.centroid->y()) << ','
          << format_double(r.point->x()) << ',' << format_double(r.point->y()) << ',' << format_double(r.point->z());
    else
      out << ",,,,";
    out << ',' << format_double(r.timings.rect_ms) << ',' << format_double(r.timings.disp_ms) << ','
        << format_double(r.timings.seg_ms) << '\n';
  }
  return out.str();
}

std::string centroid_csv(std::span<const std::optional<Vec2>> centroids) {
  std::ostringstream out;
  out << "frame,hit,u,v\n";
  for (std::size_t i = 0; i < centroids.size(); ++i) {
    out << i << ',' << int(centroids[i].has_value()) << ',';
    if (centroids[i]) out << format_double(centroids[i]->x()) << ',' << format_double(centroids[i]->y());
    else out << ',';
    out << '\n';
  }
  return out.str();
}

std::string difference_csv(const TrackComparison& cmp) {
  std::ostringstream out;
  out << "frame,a_hit,b_hit,du,dv\n";
  for (const auto& f : cmp.frames) {
    out << f.frame << ',' << int(f.a_hit) << ',' << int(f.b_hit) << ',';
    if (f.a_hit && f.b_hit) out << format_double(f.du) << ',' << format_double(f.dv);
    else out << ',';
    out << '\n';
  }
  return out.str();
}

std::string segmentation_csv_header() { return "frame,missed,seed_v,area,cu,cv,x,y,w,h\n"; }

std::string segmentation_csv_row(int frame, const SegResult& seg) {
  std::ostringstream out;
  out << frame << ',' << int(seg.missed) << ',';
  if (seg.missed || !seg.blob) {
    out << ",,,,,,,\n";
    return out.str();
  }
  const Blob& b = *seg.blob;
  out << int(b.seed_value) << ',' << b.area << ',' << format_double(seg.centroid.x()) << ','
      << format_double(seg.centroid.y()) << ',' << b.bbox.x << ',' << b.bbox.y << ',' << b.bbox.w << ',' << b.bbox.h
      << '\n';
  return out.str();
}

}  // namespace stereo
