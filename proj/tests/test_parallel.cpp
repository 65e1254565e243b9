#include <gtest/gtest.h>

#include <atomic>
#include <vector>

#include "stereo/parallel.hpp"

using namespace stereo;

TEST(Parallel, VisitsEveryIndexOnce) {
  for (int cap : {1, 2, 4, 0}) {
    set_thread_cap(cap);
    std::vector<int> hits(1000, 0);
    parallel_for(0, 1000, [&](int lo, int hi) {
      for (int i = lo; i < hi; ++i) ++hits[i];
    });
    for (int h : hits) ASSERT_EQ(h, 1);
  }
  set_thread_cap(0);
}

TEST(Parallel, EmptyRangeRunsNothing) {
  std::atomic<int> calls{0};
  parallel_for(5, 5, [&](int, int) { ++calls; });
  EXPECT_EQ(calls.load(), 0);
}

TEST(Parallel, CapIsReported) {
  set_thread_cap(3);
  EXPECT_EQ(thread_count(), 3);
  set_thread_cap(0);
  EXPECT_GE(thread_count(), 1);
}
