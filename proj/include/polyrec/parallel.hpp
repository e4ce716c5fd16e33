#pragma once

// Deterministic work partitioning: results are keyed by item index, so
// outputs are identical for any worker count. Worker count comes from
// POLYREC_THREADS or falls back to the hardware.

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace polyrec {

inline unsigned worker_count() {
  if (const char* env = std::getenv("POLYREC_THREADS")) {
    long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? hw : 1;
}

template <typename R, typename Fn>
std::vector<R> parallel_map(std::size_t count, Fn&& fn) {
  std::vector<R> results(count);
  unsigned workers = std::min<std::size_t>(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) results[i] = fn(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) results[i] = fn(i);
    });
  for (auto& th : pool) th.join();
  return results;
}

}  // namespace polyrec
