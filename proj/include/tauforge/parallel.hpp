#pragma once

#include <functional>

namespace tauforge {

// Runs fn(i) for i in [0, count) on `threads` workers, each taking one
// contiguous block. Work items must be independent; the first exception is
// rethrown after all workers join.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

// TAUFORGE_THREADS if set and positive, else 1.
int default_thread_count();

}  // namespace tauforge
