#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "stereo/eval.hpp"
#include "stereo/io.hpp"
#include "stereo/sequence.hpp"

namespace fs = std::filesystem;
using stereo::cli::run;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("stereo_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int cli(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return run(args, out_, err_);
  }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  static int lines(const std::string& file) {
    std::ifstream in(file);
    int n = 0;
    for (std::string l; std::getline(in, l);) n += !l.empty();
    return n;
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST_F(CliTest, GenSceneThenDisparity) {
  ASSERT_EQ(cli({"gen-scene", "--out", path("seq"), "--frames", "2"}), stereo::cli::kOk) << err_.str();
  EXPECT_EQ(stereo::count_frames(path("seq")), 2);
  ASSERT_EQ(cli({"disparity", "--left", path("seq/000_L.pgm"), "--right", path("seq/000_R.pgm"), "--out", path("d.pfm"),
                 "--out-pgm", path("d.pgm")}),
            stereo::cli::kOk)
      << err_.str();
  const auto d = stereo::load_disparity_pfm(path("d.pfm"), 0, 95);
  const auto gt = stereo::load_pfm(path("seq/000_gt.pfm"));
  EXPECT_LT(stereo::bad_pixel_rate(d, gt, 3.0).bad_percent, 10.0);
}

TEST_F(CliTest, TrackWritesOneRowPerFrame) {
  ASSERT_EQ(cli({"gen-scene", "--out", path("seq"), "--frames", "5"}), 0);
  ASSERT_EQ(cli({"track", "--seq", path("seq"), "--out", path("track.csv"), "--overlay-dir", path("ov"),
                 "--comparator-out", path("cmp.csv"), "--diff-out", path("diff.csv")}),
            0)
      << err_.str();
  EXPECT_EQ(lines(path("track.csv")), 6);
  EXPECT_EQ(lines(path("cmp.csv")), 6);
  EXPECT_EQ(lines(path("diff.csv")), 6);
  EXPECT_TRUE(fs::exists(path("ov/004_overlay.ppm")));
}

TEST_F(CliTest, SegmentAndBench) {
  ASSERT_EQ(cli({"gen-scene", "--out", path("seq"), "--frames", "2"}), 0);
  ASSERT_EQ(cli({"segment", "--disparity", path("seq/000_gt.pfm"), path("seq/001_gt.pfm"), "--out", path("seg.csv")}), 0)
      << err_.str();
  EXPECT_EQ(lines(path("seg.csv")), 3);
  ASSERT_EQ(cli({"--threads", "1", "bench", "--matcher", "sgbm", "--seq", path("seq"), "--out", path("report.txt")}), 0)
      << err_.str();
  const auto report = stereo::BenchReport::parse(stereo::read_file(path("report.txt")));
  EXPECT_EQ(report.matcher, "sgbm");
  EXPECT_EQ(report.frames, 2);
  EXPECT_FALSE(report.partial);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(cli({}), stereo::cli::kUsageError);
  EXPECT_EQ(cli({"disparity", "--bogus"}), stereo::cli::kUsageError);
  EXPECT_EQ(cli({"bench", "--matcher", "census", "--seq", dir_.string(), "--out", path("r")}), stereo::cli::kUsageError);
  stereo::write_file(path("a.pgm"), stereo::encode_pgm(stereo::GrayImage(200, 50, 1)));
  EXPECT_EQ(cli({"disparity", "--left", path("a.pgm"), "--right", path("a.pgm"), "--out", path("o.pfm"), "--set",
                 "elas.nonsense=1"}),
            stereo::cli::kUsageError);
}

TEST_F(CliTest, DataErrors) {
  stereo::write_file(path("bad.pgm"), "P5\n10 10\n255\nshort");
  EXPECT_EQ(cli({"disparity", "--left", path("bad.pgm"), "--right", path("bad.pgm"), "--out", path("o.pfm")}),
            stereo::cli::kDataError);
  EXPECT_FALSE(err_.str().empty());
}
