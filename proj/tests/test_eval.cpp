#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "stereo/error.hpp"
#include "stereo/eval.hpp"
#include "stereo/scenegen.hpp"

using namespace stereo;

namespace {

std::vector<TrackRecord> records(int n, std::vector<int> misses) {
  std::vector<TrackRecord> r(n);
  for (int k = 0; k < n; ++k) {
    r[k].frame = k;
    const bool miss = std::find(misses.begin(), misses.end(), k) != misses.end();
    r[k].detected = !miss;
    if (!miss) {
      r[k].raw_centroid = Vec2(5, 5);
      r[k].centroid = Vec2(5, 5);
      r[k].point = Vec3(0, 0, 1);
    }
  }
  return r;
}

}  // namespace

TEST(MissedBlobRatio, Examples) {
  EXPECT_DOUBLE_EQ(missed_blob_ratio(records(200, {})), 0.0);
  EXPECT_DOUBLE_EQ(missed_blob_ratio(records(200, {3, 50, 51, 199})), 2.0);
}

TEST(MissedBlobRatio, EmptyInputThrows) {
  try {
    missed_blob_ratio({});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::EmptyInput);
  }
}

TEST(MissedBlobRatio, InvariantUnderReordering) {
  auto r = records(50, {1, 7, 30});
  const double a = missed_blob_ratio(r);
  std::mt19937 rng(1);
  std::shuffle(r.begin(), r.end(), rng);
  EXPECT_DOUBLE_EQ(missed_blob_ratio(r), a);
}

TEST(MissedBlobRatio, CentroidOutsideGroundTruthIsWrong) {
  const auto r = records(4, {3});
  std::vector<Mask> masks(4, Mask(10, 10, 0));
  for (int k = 0; k < 3; ++k) masks[k](5, 5) = 255;
  masks[1](5, 5) = 0;  // detection at (5,5) misses the object in frame 1
  masks[1](0, 0) = 255;
  masks[3](5, 5) = 255;  // object present but not detected
  EXPECT_DOUBLE_EQ(missed_blob_ratio(r, masks), 50.0);
  masks[3](5, 5) = 0;    // nothing to detect: not a miss
  EXPECT_DOUBLE_EQ(missed_blob_ratio(r, masks), 25.0);
  std::vector<Mask> short_masks(2, Mask(10, 10, 0));
  EXPECT_THROW(missed_blob_ratio(r, short_masks), Error);
}

TEST(BadPixel, IdenticalMapsAreClean) {
  DisparityMap m(10, 10, 0, 50);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) m.set(x, y, 3.0 + x);
  const auto s = bad_pixel_rate(m, to_float(m), 1.0);
  EXPECT_DOUBLE_EQ(s.bad_percent, 0.0);
  EXPECT_DOUBLE_EQ(s.density_percent, 100.0);
  EXPECT_EQ(s.evaluated, 100u);
}

TEST(BadPixel, OffsetByTwo) {
  DisparityMap m(8, 8, 0, 50), gt(8, 8, 0, 50);
  for (int y = 0; y < 8; ++y)
    for (int x = 0; x < 8; ++x) {
      m.set(x, y, 12.0);
      gt.set(x, y, 10.0);
    }
  EXPECT_DOUBLE_EQ(bad_pixel_rate(m, gt, 1.0).bad_percent, 100.0);
  EXPECT_DOUBLE_EQ(bad_pixel_rate(m, gt, 3.0).bad_percent, 0.0);
}

TEST(BadPixel, MonotoneInThreshold) {
  std::mt19937 rng(2);
  std::uniform_real_distribution<float> u(0, 40);
  DisparityMap m(30, 20, 0, 50);
  FloatImage gt(30, 20);
  for (int y = 0; y < 20; ++y)
    for (int x = 0; x < 30; ++x) {
      gt(x, y) = u(rng);
      if ((x + y) % 5) m.set(x, y, u(rng));
    }
  double prev = 101;
  for (double t : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    const double b = bad_pixel_rate(m, gt, t).bad_percent;
    EXPECT_LE(b, prev);
    prev = b;
  }
  EXPECT_NEAR(bad_pixel_rate(m, gt, 1.0).density_percent, 80.0, 1e-9);
}

TEST(BadPixel, MaskRestrictsAndSizeMismatchThrows) {
  DisparityMap m(4, 1, 0, 50);
  FloatImage gt(4, 1, 10.0f);
  for (int x = 0; x < 4; ++x) m.set(x, 0, x < 2 ? 10.0 : 20.0);
  Mask mask(4, 1, 0);
  mask(0, 0) = mask(1, 0) = 1;
  EXPECT_DOUBLE_EQ(bad_pixel_rate(m, gt, 1.0, &mask).bad_percent, 0.0);
  EXPECT_DOUBLE_EQ(bad_pixel_rate(m, gt, 1.0).bad_percent, 50.0);
  EXPECT_THROW(bad_pixel_rate(m, FloatImage(5, 1), 1.0), Error);
}

TEST(EvaluationMask, ExcludesBandAroundOcclusionsAndJumps) {
  FloatImage gt(20, 1, 10.0f);
  for (int x = 12; x < 20; ++x) gt(x, 0) = 30.0f;
  gt(0, 0) = std::nanf("");
  Mask occ(20, 1, 0);
  occ(5, 0) = 255;
  const Mask m = evaluation_mask(gt, occ, 2);
  EXPECT_FALSE(m(0, 0));  // no ground truth
  for (int x = 3; x <= 7; ++x) EXPECT_FALSE(m(x, 0)) << x;
  EXPECT_TRUE(m(8, 0));
  EXPECT_FALSE(m(10, 0));  // near the 10 -> 30 jump
  EXPECT_FALSE(m(13, 0));
  EXPECT_TRUE(m(15, 0));
}

TEST(BenchReport, TextRoundTrip) {
  BenchReport r;
  r.matcher = "elas";
  r.width = 320;
  r.height = 240;
  r.d_max = 95;
  r.frames = 2;
  r.mean_disp_ms = 12.25;
  r.missed_percent = 50;
  r.bad1_percent = 0.125;
  r.partial = true;
  r.error = "SizeMismatch: frame 2";
  r.params = {{"elas.sigma", "3"}, {"seg.threshold", "50"}};
  r.rows = {{0, true, false, 1.5, 0.25, 2, 0.5, 0.25, 99}, {1, false, false, 1.25, 0.5, 2.5, -1, -1, -1}};
  EXPECT_EQ(BenchReport::parse(r.to_text()), r);
}

TEST(Benchmark, NonTimingFieldsAreDeterministicAndErrorsMarkPartial) {
  SceneSpec s = two_plane_scene(2);
  s.frames = 2;
  std::vector<BenchFrame> frames;
  for (int k = 0; k < 2; ++k) {
    const auto f = render(s, k);
    frames.push_back({f.left, f.right, f.gt_disparity, std::nullopt, std::nullopt});
  }
  const auto params = TrackerParams::for_resolution(MatcherId::Elas, 320, 240);
  auto a = run_benchmark(frames, s.rig(), params), b = run_benchmark(frames, s.rig(), params);
  EXPECT_FALSE(a.partial);
  EXPECT_EQ(a.rows.size(), 2u);
  EXPECT_EQ(a.bad1_percent, b.bad1_percent);
  EXPECT_EQ(a.missed_percent, b.missed_percent);
  EXPECT_EQ(a.params, parameter_dump(params));

  frames.push_back({GrayImage(320, 240), GrayImage(100, 240), std::nullopt, std::nullopt, std::nullopt});
  const auto c = run_benchmark(frames, s.rig(), params);
  EXPECT_TRUE(c.partial);
  EXPECT_EQ(c.rows.size(), 2u);
  EXPECT_FALSE(c.error.empty());
  EXPECT_EQ(BenchReport::parse(c.to_text()), c);
}
