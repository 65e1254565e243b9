#include "stereo/sequence.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "stereo/error.hpp"
#include "stereo/io.hpp"

namespace stereo {
namespace fs = std::filesystem;

std::string frame_path(const std::string& dir, int frame, const std::string& suffix) {
  char name[32];
  std::snprintf(name, sizeof name, "%03d_", frame);
  return (fs::path(dir) / (name + suffix)).string();
}

int count_frames(const std::string& dir) {
  int n = 0;
  while (fs::exists(frame_path(dir, n, "L.pgm")) && fs::exists(frame_path(dir, n, "R.pgm"))) ++n;
  return n;
}

void write_scene(const SceneSpec& spec, const std::string& dir) {
  spec.validate();
  std::error_code ec;
  fs::create_directories(dir, ec);
  require(!ec, Errc::IoFailure, "cannot create " + dir);
  write_file((fs::path(dir) / "calib.txt").string(), spec.rig().to_text());
  write_file((fs::path(dir) / "scene.txt").string(), spec.to_text());
  for (int f = 0; f < spec.frames; ++f) {
    const RenderedFrame fr = render(spec, f);
    save_pgm(fr.left, frame_path(dir, f, "L.pgm"));
    save_pgm(fr.right, frame_path(dir, f, "R.pgm"));
    save_ppm(fr.color_left, frame_path(dir, f, "C.ppm"));
    FloatImage gt = fr.gt_disparity;
    for (auto& v : gt.pixels())
      if (std::isnan(v)) v = -1.0f;
    save_pfm(gt, frame_path(dir, f, "gt.pfm"));
    save_pgm(fr.labels, frame_path(dir, f, "labels.pgm"));
    GrayImage occ(fr.occluded.width(), fr.occluded.height());
    for (std::size_t i = 0; i < occ.size(); ++i) occ.data()[i] = fr.occluded.data()[i] ? 255 : 0;
    save_pgm(occ, frame_path(dir, f, "occ.pgm"));
    GrayImage mask(occ.width(), occ.height(), 0);
    if (const auto k = closest_visible_object(spec, fr, f)) {
      const Mask m = object_mask(fr, *k);
      for (std::size_t i = 0; i < mask.size(); ++i) mask.data()[i] = m.data()[i] ? 255 : 0;
    }
    save_pgm(mask, frame_path(dir, f, "mask.pgm"));
  }
}

std::vector<BenchFrame> load_sequence(const std::string& dir, int band) {
  const int n = count_frames(dir);
  require(n > 0, Errc::EmptyInput, "no frames (NNN_L.pgm / NNN_R.pgm) in " + dir);
  std::vector<BenchFrame> seq;
  seq.reserve(n);
  for (int f = 0; f < n; ++f) {
    BenchFrame b;
    b.left = load_pgm(frame_path(dir, f, "L.pgm"));
    b.right = load_pgm(frame_path(dir, f, "R.pgm"));
    require(b.left.same_size(b.right), Errc::SizeMismatch, "frame " + std::to_string(f) + ": image sizes differ");
    if (fs::exists(frame_path(dir, f, "gt.pfm"))) {
      FloatImage gt = load_pfm(frame_path(dir, f, "gt.pfm"));
      require(gt.same_size(b.left), Errc::SizeMismatch, "frame " + std::to_string(f) + ": gt size differs");
      for (auto& v : gt.pixels())
        if (!(v >= 0)) v = std::nanf("");
      if (fs::exists(frame_path(dir, f, "occ.pgm"))) {
        const GrayImage occ = load_pgm(frame_path(dir, f, "occ.pgm"));
        Mask m(occ.width(), occ.height());
        for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = occ.data()[i] != 0;
        b.eval_mask = evaluation_mask(gt, m, band);
      }
      b.gt_disparity = std::move(gt);
    }
    if (fs::exists(frame_path(dir, f, "mask.pgm"))) {
      const GrayImage g = load_pgm(frame_path(dir, f, "mask.pgm"));
      Mask m(g.width(), g.height());
      for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = g.data()[i] != 0;
      b.target_mask = std::move(m);
    }
    seq.push_back(std::move(b));
  }
  return seq;
}

}  // namespace stereo
