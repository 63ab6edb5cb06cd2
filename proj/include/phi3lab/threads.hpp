#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace phi3lab {

// Worker count: PHI3LAB_THREADS if set and positive, otherwise the hardware
// concurrency.  A value of 1 runs the body inline.
inline int thread_count() {
  if (const char* env = std::getenv("PHI3LAB_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw ? static_cast<int>(hw) : 1;
}

// Runs body(i) for i in [0, n).  Work is handed out through an atomic
// counter, so bodies must not depend on which thread runs them; results that
// feed a reduction go into per-index slots and are combined serially by the
// caller, keeping every reduction bit-identical across thread counts.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  int workers = thread_count();
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      if (failed.load(std::memory_order_relaxed)) break;
      std::size_t i = next.fetch_add(1);
      if (i >= n) break;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true, std::memory_order_relaxed);
        break;
      }
    }
  };
  std::vector<std::thread> pool;
  int spawn = workers < static_cast<int>(n) ? workers : static_cast<int>(n);
  pool.reserve(spawn - 1);
  for (int w = 0; w + 1 < spawn; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace phi3lab
