#pragma once

#include <algorithm>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace newton {

/// Worker cap: min(hardware, NEWTON_ATLAS_THREADS if set).
inline int worker_count() {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw <= 0) hw = 1;
  if (const char* env = std::getenv("NEWTON_ATLAS_THREADS")) {
    int cap = std::atoi(env);
    if (cap > 0) hw = std::min(hw, cap);
  }
  return hw;
}

/// Static block partition; work(i) must be pure per index. Results the caller
/// stores by index are deterministic regardless of thread count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& work) {
  int workers = worker_count();
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) work(i);
    return;
  }
  std::vector<std::thread> pool;
  std::size_t chunk = (n + workers - 1) / workers;
  for (int t = 0; t < workers; ++t) {
    std::size_t lo = t * chunk;
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &work] {
      for (std::size_t i = lo; i < hi; ++i) work(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace newton
