#include "stereo/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace stereo {
namespace {

std::atomic<int> g_cap{-1};  // -1: not set programmatically

int env_cap() {
  const char* s = std::getenv("STEREO_FOREMOST_THREADS");
  if (s == nullptr || *s == '\0') return 0;
  char* end = nullptr;
  const long v = std::strtol(s, &end, 10);
  if (end == s || v < 0) return 0;
  return static_cast<int>(std::min<long>(v, 256));
}

}  // namespace

int thread_count() {
  int cap = g_cap.load(std::memory_order_relaxed);
  if (cap < 0) cap = env_cap();
  if (cap == 0) cap = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return cap;
}

void set_thread_cap(int cap) { g_cap.store(std::max(cap, 0), std::memory_order_relaxed); }

void parallel_for(int begin, int end, const std::function<void(int, int)>& body) {
  const int n = end - begin;
  if (n <= 0) return;
  const int workers = std::min(thread_count(), n);
  if (workers <= 1) {
    body(begin, end);
    return;
  }

  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto run = [&](int lo, int hi) {
    try {
      body(lo, hi);
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  std::vector<std::jthread> pool;
  pool.reserve(workers - 1);
  const int chunk = (n + workers - 1) / workers;
  for (int w = 1; w < workers; ++w) {
    const int lo = begin + w * chunk;
    const int hi = std::min(end, lo + chunk);
    if (lo < hi) pool.emplace_back(run, lo, hi);
  }
  run(begin, std::min(end, begin + chunk));
  pool.clear();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace stereo
