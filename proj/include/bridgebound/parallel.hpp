#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace bridgebound {

/// Worker count: BRIDGEBOUND_THREADS if set (clamped to >= 1), else hardware
/// concurrency.  A value of 1 runs everything on the calling thread, which is
/// the easiest way to get clean stack traces out of a failing instance.
inline int worker_count() {
  if (const char* env = std::getenv("BRIDGEBOUND_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(i) for i in [0, count).  Work is claimed atomically, one index at a
/// time: instances vary a lot in cost (bridge solves vs. closed forms), so
/// static partitioning would leave workers idle.  The caller must make fn
/// deterministic per index (per-instance RNG streams, writes only to slot i).
inline void parallel_for(int count, const std::function<void(int)>& fn) {
  const int workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::string> errors(count);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
        try {
          fn(i);
        } catch (const std::exception& e) {
          errors[i] = e.what();
        } catch (...) {
          errors[i] = "unknown error";
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (int i = 0; i < count; ++i)
    if (!errors[i].empty())
      throw std::runtime_error("instance " + std::to_string(i) + ": " + errors[i]);
}

}  // namespace bridgebound
