#include <gtest/gtest.h>

#include <filesystem>

#include "stereo/config.hpp"
#include "stereo/error.hpp"
#include "stereo/io.hpp"
#include "stereo/keyvalue.hpp"

using namespace stereo;

namespace {

std::string temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  write_file(path.string(), text);
  return path.string();
}

}  // namespace

TEST(Config, ResolutionDefaults) {
  const auto hi = RunConfig::defaults(MatcherId::Elas, 640, 480);
  EXPECT_EQ(hi.tracker.matcher.elas.d_max, 127);
  EXPECT_TRUE(hi.tracker.matcher.elas.subsample);
  EXPECT_EQ(hi.tracker.seg.min_blob_area, 1600);
  const auto lo = RunConfig::defaults(MatcherId::Sgbm, 320, 240);
  EXPECT_EQ(lo.tracker.matcher.id, MatcherId::Sgbm);
  EXPECT_EQ(lo.tracker.matcher.sgbm.d_max, 95);
}

TEST(Config, PrecedenceDefaultsFileFlags) {
  const auto file = temp_file("stereo_cfg_a.txt", "elas.sigma = 4.5\nseg.threshold=60\nmatcher=sgbm\n");
  const auto c = RunConfig::resolve(320, 240, file, {"seg.threshold=70"});
  EXPECT_DOUBLE_EQ(c.tracker.matcher.elas.sigma, 4.5);
  EXPECT_EQ(c.tracker.seg.threshold, 70);
  EXPECT_EQ(c.tracker.matcher.id, MatcherId::Sgbm);
  EXPECT_EQ(c.tracker.matcher.elas.d_max, 95);
  const auto d = RunConfig::resolve(320, 240, file, {}, MatcherId::Elas);
  EXPECT_EQ(d.tracker.matcher.id, MatcherId::Elas);
  std::filesystem::remove(file);
}

TEST(Config, UnknownKeyRejected) {
  RunConfig c = RunConfig::defaults(MatcherId::Elas, 320, 240);
  try {
    c.set("elas.sigmaa", "3");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::InvalidParameter);
  }
  EXPECT_THROW(RunConfig::resolve(320, 240, std::nullopt, {"no_equals_sign"}), Error);
}

TEST(Config, ValidationAfterMerge) {
  EXPECT_THROW(RunConfig::resolve(320, 240, std::nullopt, {"elas.gamma=1.5"}), Error);
  EXPECT_THROW(RunConfig::resolve(320, 240, std::nullopt, {"sgbm.sad_window=4"}), Error);
  EXPECT_THROW(RunConfig::resolve(320, 240, std::nullopt, {"seg.threshold=abc"}), Error);
}

TEST(Config, DumpRoundTrips) {
  RunConfig c = RunConfig::resolve(320, 240, std::nullopt, {"elas.beta=0.04", "gaze.alpha=0.5", "threads=2"});
  RunConfig d = RunConfig::defaults(MatcherId::Elas, 320, 240);
  d.apply(KeyValueFile::parse(c.to_text()));
  EXPECT_EQ(d.to_text(), c.to_text());
  EXPECT_EQ(d.threads, 2);
}

TEST(KeyValue, ParsingAndFormatting) {
  const auto kv = KeyValueFile::parse("# comment\n a = 1 \nb=2.5\n\nflag=true\n");
  EXPECT_EQ(kv.get_int("a"), 1);
  EXPECT_DOUBLE_EQ(kv.get_double("b"), 2.5);
  EXPECT_TRUE(kv.get_bool("flag", false));
  EXPECT_EQ(kv.get_int("missing", 9), 9);
  EXPECT_THROW(kv.get("missing"), Error);
  EXPECT_EQ(kv.keys(), (std::vector<std::string>{"a", "b", "flag"}));
  for (double v : {0.1, 1.0 / 3.0, 1e-17, 260.0, -0.068})
    EXPECT_EQ(parse_double(format_double(v)), v);
  EXPECT_THROW(parse_int("12x"), Error);
}
