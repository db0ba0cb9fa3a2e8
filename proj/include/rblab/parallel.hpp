#pragma once

#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace rblab {

/// Run fn(i) for i in [0, count) on up to `workers` threads, contiguous
/// index blocks per thread. Callers must make fn(i) independent of execution
/// order (e.g. write to slot i of a preallocated buffer); reductions happen
/// after the join, so results cannot depend on the worker count.
inline void parallel_for(int count, int workers,
                         const std::function<void(int)>& fn) {
  if (count <= 0) return;
  if (workers < 1) workers = 1;
  if (workers == 1 || count == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  const int n_threads = std::min(workers, count);
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < n_threads; ++t) {
    const int lo = static_cast<int>(static_cast<long long>(count) * t / n_threads);
    const int hi =
        static_cast<int>(static_cast<long long>(count) * (t + 1) / n_threads);
    pool.emplace_back([&, lo, hi] {
      try {
        for (int i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace rblab
