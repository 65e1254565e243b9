#pragma once

#include <functional>

namespace stereo {

/// Number of worker threads used by row-parallel kernels. Resolution order:
/// explicit set_thread_cap(), then the STEREO_FOREMOST_THREADS environment
/// variable, then hardware concurrency. A cap of 0 means "auto".
int thread_count();

/// Overrides the environment setting for this process. 0 restores auto.
void set_thread_cap(int cap);

/// Splits [begin, end) into contiguous chunks and runs body(lo, hi) on each,
/// possibly concurrently. Every index is visited exactly once; callers must
/// write only to state owned by their index range.
void parallel_for(int begin, int end, const std::function<void(int, int)>& body);

}  // namespace stereo
