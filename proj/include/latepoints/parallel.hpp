#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace lp {

/// Worker count: explicit request, else LATEPOINTS_THREADS, else the hardware count.
inline int resolveJobs(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LATEPOINTS_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

/// Runs f(i) for i in [0, n) on up to `jobs` threads. Results must be written by index,
/// so the outcome does not depend on the schedule.
template <class F>
void parallelFor(std::size_t n, int jobs, F&& f) {
  jobs = std::max(1, std::min<int>(jobs, static_cast<int>(std::min<std::size_t>(n, 1u << 16))));
  if (jobs == 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr err;
  std::mutex mu;
  std::vector<std::thread> pool;
  for (int j = 0; j < jobs; ++j)
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          f(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!err) err = std::current_exception();
          next = n;
        }
      }
    });
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

} // namespace lp
