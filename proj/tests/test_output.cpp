#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "stereo/csv.hpp"
#include "stereo/overlay.hpp"
#include "stereo/sequence.hpp"
#include "test_util.hpp"

using namespace stereo;

namespace {

SegResult square_result(RgbImage& img) {
  img = RgbImage(100, 80, Rgb{10, 10, 10});
  GrayImage v(100, 80, 0);
  v = stereo::testing::fill_rect(v, 30, 20, 20, 20, 200);
  std::vector<int> px;
  for (int i = 0; i < 8000; ++i)
    if (v.data()[i]) px.push_back(i);
  SegResult r;
  r.blob = make_blob(v, px);
  r.missed = false;
  r.centroid = r.blob->centroid;
  r.roi = Rect{10, 5, 60, 50};
  return r;
}

}  // namespace

TEST(Overlay, MissedFrameUnchanged) {
  RgbImage img(20, 10, Rgb{1, 2, 3});
  EXPECT_EQ(render_overlay(img, SegResult{}, TrackRecord{}), img);
}

TEST(Overlay, DrawsTintOutlineAndCentroids) {
  RgbImage img;
  const SegResult seg = square_result(img);
  TrackRecord rec;
  rec.detected = true;
  rec.raw_centroid = seg.centroid;
  rec.centroid = Vec2(60, 60);
  const RgbImage out = render_overlay(img, seg, rec);
  // 50% blend, truncated.
  EXPECT_EQ(out(31, 21), (Rgb{5, 85, 132}));
  EXPECT_EQ(out(10, 5), kOverlayRoi);
  EXPECT_EQ(out(69, 54), kOverlayRoi);
  EXPECT_EQ(out(40, 30), kOverlayRawCentroid);
  EXPECT_EQ(out(61, 61), kOverlaySmoothedCentroid);
  EXPECT_EQ(out(90, 70), img(90, 70));
}

TEST(Csv, TrackRowsLeaveMissesEmpty) {
  std::vector<TrackRecord> r(2);
  r[0].frame = 0;
  r[0].centroid = Vec2(1.5, 2.5);
  r[0].point = Vec3(0.1, 0.2, 0.3);
  r[1].frame = 1;
  const std::string csv = track_csv(r);
  std::istringstream in(csv);
  std::string header, a, b;
  std::getline(in, header);
  std::getline(in, a);
  std::getline(in, b);
  EXPECT_EQ(header, "frame,hit,u,v,x,y,z,t_rect_ms,t_disp_ms,t_seg_ms");
  EXPECT_EQ(a.substr(0, 25), "0,1,1.5,2.5,0.1,0.2,0.3,0");
  EXPECT_EQ(b.substr(0, 12), "1,0,,,,,,0,0");
}

TEST(Csv, CentroidAndSegmentationRows) {
  const std::vector<std::optional<Vec2>> c{Vec2(3, 4), std::nullopt};
  EXPECT_EQ(centroid_csv(c), "frame,hit,u,v\n0,1,3,4\n1,0,,\n");
  RgbImage img;
  const SegResult seg = square_result(img);
  EXPECT_EQ(segmentation_csv_header(), "frame,missed,seed_v,area,cu,cv,x,y,w,h\n");
  EXPECT_EQ(segmentation_csv_row(7, seg), "7,0,200,400,39.5,29.5,30,20,20,20\n");
}

TEST(Sequence, WriteAndLoad) {
  const auto dir = (std::filesystem::temp_directory_path() / "stereo_seq_test").string();
  std::filesystem::remove_all(dir);
  SceneSpec s = two_plane_scene(4, 96, 72);
  s.frames = 2;
  write_scene(s, dir);
  EXPECT_EQ(count_frames(dir), 2);
  EXPECT_EQ(frame_path(dir, 7, "L.pgm"), dir + "/007_L.pgm");
  const auto frames = load_sequence(dir);
  ASSERT_EQ(frames.size(), 2u);
  EXPECT_TRUE(frames[1].gt_disparity.has_value());
  EXPECT_TRUE(frames[1].eval_mask.has_value());
  EXPECT_TRUE(frames[1].target_mask.has_value());
  const auto f = render(s, 1);
  EXPECT_EQ(frames[1].left, f.left);
  std::filesystem::remove_all(dir);
}
