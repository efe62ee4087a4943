#pragma once

#include <atomic>
#include <exception>
#include <thread>
#include <utility>
#include <vector>

namespace ipdd {

/// Runs fn(i) for i in [0, n) on a small thread pool. Each index must write
/// only to its own output slot, which keeps results independent of
/// scheduling. The first exception thrown by any job is rethrown on the
/// calling thread.
template <typename F>
void parallel_for(int n, F&& fn, unsigned max_threads = 0) {
  if (n <= 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  unsigned workers = max_threads == 0 ? hw : std::min(hw, max_threads);
  workers = std::min<unsigned>(workers, static_cast<unsigned>(n));

  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace ipdd
