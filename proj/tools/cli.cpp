#include "cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <optional>

#include "stereo/attention.hpp"
#include "stereo/config.hpp"
#include "stereo/csv.hpp"
#include "stereo/error.hpp"
#include "stereo/eval.hpp"
#include "stereo/io.hpp"
#include "stereo/overlay.hpp"
#include "stereo/parallel.hpp"
#include "stereo/sequence.hpp"

namespace stereo::cli {
namespace {

namespace fs = std::filesystem;

struct Common {
  std::string config;
  std::vector<std::string> overrides;
  std::string matcher;
};

void add_common(CLI::App* sub, Common& c, bool with_matcher) {
  sub->add_option("--config", c.config, "key=value configuration file")->check(CLI::ExistingFile);
  sub->add_option("--set", c.overrides, "override one parameter, key=value (repeatable)");
  if (with_matcher)
    sub->add_option("--matcher", c.matcher, "disparity matcher")->check(CLI::IsMember({"elas", "sgbm"}));
}

RunConfig make_config(const Common& c, int width, int height) {
  std::optional<MatcherId> m;
  if (!c.matcher.empty()) m = parse_matcher(c.matcher);
  std::optional<std::string> file;
  if (!c.config.empty()) file = c.config;
  RunConfig cfg = RunConfig::resolve(width, height, file, c.overrides, m);
  if (cfg.threads > 0) set_thread_cap(cfg.threads);
  return cfg;
}

StereoRig sequence_rig(const std::string& calib, const std::string& seq) {
  if (!calib.empty()) return StereoRig::load(calib);
  const std::string path = (fs::path(seq) / "calib.txt").string();
  require(fs::exists(path), Errc::IoFailure, "no --calib given and no calib.txt in " + seq);
  return StereoRig::load(path);
}

void ensure_parent(const std::string& path) {
  const fs::path p = fs::path(path).parent_path();
  if (!p.empty()) fs::create_directories(p);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Depth-based foremost-object attention: stereo matching, segmentation and tracking", "stereo_foremost"};
  app.require_subcommand(1);
  int threads = -1;
  app.add_option("--threads", threads, "worker thread cap (0 = auto)")->check(CLI::NonNegativeNumber);

  // rectify
  Common rc;
  std::string r_calib, r_left, r_right, r_out_left, r_out_right;
  auto* rect = app.add_subcommand("rectify", "rectify a raw stereo pair");
  rect->add_option("--calib", r_calib)->required()->check(CLI::ExistingFile);
  rect->add_option("--left", r_left)->required()->check(CLI::ExistingFile);
  rect->add_option("--right", r_right)->required()->check(CLI::ExistingFile);
  rect->add_option("--out-left", r_out_left)->required();
  rect->add_option("--out-right", r_out_right)->required();

  // disparity
  Common dc;
  std::string d_left, d_right, d_out, d_out_pgm;
  auto* disp = app.add_subcommand("disparity", "compute a disparity map from a rectified pair");
  add_common(disp, dc, true);
  disp->add_option("--left", d_left)->required()->check(CLI::ExistingFile);
  disp->add_option("--right", d_right)->required()->check(CLI::ExistingFile);
  disp->add_option("--out", d_out, "PFM output (invalid = -1)")->required();
  disp->add_option("--out-pgm", d_out_pgm, "optional 8-bit visualization");

  // segment
  Common sc;
  std::vector<std::string> s_inputs;
  std::string s_out, s_mask_dir;
  auto* seg = app.add_subcommand("segment", "segment the foremost blob in disparity maps (frames in order)");
  add_common(seg, sc, true);
  seg->add_option("--disparity", s_inputs, "disparity PFM files, one per frame")->required()->check(CLI::ExistingFile);
  seg->add_option("--out", s_out, "CSV output")->required();
  seg->add_option("--mask-dir", s_mask_dir, "write NNN_blob.pgm masks here");

  // track
  Common tc;
  std::string t_seq, t_calib, t_out, t_overlay, t_cmp, t_diff;
  auto* track = app.add_subcommand("track", "run the attention loop over a sequence directory");
  add_common(track, tc, true);
  track->add_option("--seq", t_seq)->required()->check(CLI::ExistingDirectory);
  track->add_option("--calib", t_calib)->check(CLI::ExistingFile);
  track->add_option("--out", t_out, "track CSV")->required();
  track->add_option("--overlay-dir", t_overlay, "write NNN_overlay.ppm annotated frames");
  track->add_option("--comparator-out", t_cmp, "colour-blob comparator CSV (needs NNN_C.ppm)");
  track->add_option("--diff-out", t_diff, "per-frame difference CSV against the comparator");

  // bench
  Common bc;
  std::string b_seq, b_calib, b_out;
  auto* bench = app.add_subcommand("bench", "benchmark a matcher on a sequence directory");
  add_common(bench, bc, true);
  bench->add_option("--seq", b_seq)->required()->check(CLI::ExistingDirectory);
  bench->add_option("--calib", b_calib)->check(CLI::ExistingFile);
  bench->add_option("--out", b_out, "report file")->required();

  // gen-scene
  std::string g_spec, g_out;
  int g_frames = 0;
  auto* gen = app.add_subcommand("gen-scene", "render a synthetic stereo sequence");
  gen->add_option("--spec", g_spec, "scene spec file (defaults to the desk scene)")->check(CLI::ExistingFile);
  gen->add_option("--out", g_out, "output directory")->required();
  gen->add_option("--frames", g_frames, "override the frame count")->check(CLI::PositiveNumber);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << "run with --help for usage\n";
    return kUsageError;
  }

  try {
    if (threads >= 0) set_thread_cap(threads);

    if (*rect) {
      const StereoRig rig = StereoRig::load(r_calib);
      const auto maps = compute_rectification(rig);
      const GrayImage l = load_pgm(r_left), r = load_pgm(r_right);
      require(l.width() == rig.width && l.height() == rig.height && r.same_size(l), Errc::SizeMismatch,
              "images do not match the calibrated size");
      save_pgm(warp(l, maps.map_left).image, r_out_left);
      save_pgm(warp(r, maps.map_right).image, r_out_right);
      out << "rectified f=" << maps.camera.focal << " b=" << maps.camera.baseline << "\n";
    } else if (*disp) {
      const GrayImage l = load_pgm(d_left), r = load_pgm(d_right);
      require(l.same_size(r), Errc::SizeMismatch, "left and right images differ in size");
      const RunConfig cfg = make_config(dc, l.width(), l.height());
      const DisparityMap d = compute_disparity(l, r, cfg.tracker.matcher);
      ensure_parent(d_out);
      save_disparity_pfm(d, d_out);
      if (!d_out_pgm.empty()) save_disparity_pgm(d, d_out_pgm);
      out << "valid " << d.valid_count() << " of " << std::size_t(d.width()) * d.height() << " pixels\n";
    } else if (*seg) {
      std::optional<ForemostSegmenter> segmenter;
      std::optional<RunConfig> cfg;
      std::string csv = segmentation_csv_header();
      int frame = 0;
      if (!s_mask_dir.empty()) fs::create_directories(s_mask_dir);
      for (const auto& path : s_inputs) {
        const FloatImage f = load_pfm(path);
        if (!cfg) {
          cfg = make_config(sc, f.width(), f.height());
          segmenter.emplace(cfg->tracker.seg);
        }
        const DisparityMap d = from_float(f, 0, cfg->tracker.matcher.d_max());
        const SegResult res = segmenter->process(to_8bit(d));
        csv += segmentation_csv_row(frame, res);
        if (!s_mask_dir.empty()) {
          GrayImage m(f.width(), f.height(), 0);
          if (res.blob)
            for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = res.blob->mask.data()[i] ? 255 : 0;
          save_pgm(m, frame_path(s_mask_dir, frame, "blob.pgm"));
        }
        ++frame;
      }
      ensure_parent(s_out);
      write_file(s_out, csv);
    } else if (*track) {
      const int n = count_frames(t_seq);
      require(n > 0, Errc::EmptyInput, "no frames in " + t_seq);
      const GrayImage first = load_pgm(frame_path(t_seq, 0, "L.pgm"));
      const RunConfig cfg = make_config(tc, first.width(), first.height());
      AttentionTracker tracker(sequence_rig(t_calib, t_seq), cfg.tracker);
      std::vector<TrackRecord> records;
      std::vector<std::optional<Vec2>> blobs;
      const bool need_color = !t_overlay.empty() || !t_cmp.empty() || !t_diff.empty();
      if (!t_overlay.empty()) fs::create_directories(t_overlay);
      for (int f = 0; f < n; ++f) {
        const GrayImage l = load_pgm(frame_path(t_seq, f, "L.pgm"));
        const GrayImage r = load_pgm(frame_path(t_seq, f, "R.pgm"));
        const TrackStep st = tracker.step(l, r);
        records.push_back(st.record);
        if (!need_color) continue;
        const RgbImage c = load_ppm(frame_path(t_seq, f, "C.ppm"));
        if (!t_overlay.empty())
          save_ppm(render_overlay(c, st.segmentation, st.record), frame_path(t_overlay, f, "overlay.ppm"));
        blobs.push_back(colorblob_detect(c, HueWindow{}, cfg.tracker.seg.min_blob_area / 4));
      }
      ensure_parent(t_out);
      write_file(t_out, track_csv(records));
      if (!t_cmp.empty()) write_file(t_cmp, centroid_csv(blobs));
      if (!t_diff.empty()) {
        const auto cmp = compare_tracks(records, blobs);
        write_file(t_diff, difference_csv(cmp));
        out << "mutual hits " << cmp.mutual_hits << ", mean |du| " << cmp.mean_abs_du << ", mean |dv| "
            << cmp.mean_abs_dv << "\n";
      }
      int hits = 0;
      for (const auto& r : records) hits += r.hit();
      out << "frames " << n << ", hits " << hits << "\n";
    } else if (*bench) {
      const auto seq = load_sequence(b_seq);
      const int w = seq.front().left.width(), h = seq.front().left.height();
      const RunConfig cfg = make_config(bc, w, h);
      const BenchReport rep = run_benchmark(seq, sequence_rig(b_calib, b_seq), cfg.tracker);
      ensure_parent(b_out);
      write_file(b_out, rep.to_text());
      out << rep.matcher << ": total " << rep.mean_total_ms << " ms, missed " << rep.missed_percent << "%\n";
      if (rep.partial) {
        err << "error: benchmark stopped early: " << rep.error << "\n";
        return kDataError;
      }
    } else if (*gen) {
      SceneSpec spec = g_spec.empty() ? SceneSpec::desk() : SceneSpec::load(g_spec);
      if (spec.objects.empty() && g_spec.empty()) spec = two_plane_scene(1, spec.width, spec.height);
      if (g_frames > 0) spec.frames = g_frames;
      write_scene(spec, g_out);
      out << "wrote " << spec.frames << " frames to " << g_out << "\n";
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == Errc::InvalidParameter ? kUsageError : kDataError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kOk;
}

}  // namespace stereo::cli
