#include "tauforge/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace tauforge {

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  threads = std::max(1, std::min(threads, count));
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr first;
  std::mutex m;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    const int lo = static_cast<int>(static_cast<long long>(count) * w / threads);
    const int hi = static_cast<int>(static_cast<long long>(count) * (w + 1) / threads);
    pool.emplace_back([&, lo, hi] {
      try {
        for (int i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(m);
        if (!first) first = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

int default_thread_count() {
  if (const char* s = std::getenv("TAUFORGE_THREADS")) {
    const int n = std::atoi(s);
    if (n > 0) return n;
  }
  return 1;
}

}  // namespace tauforge
