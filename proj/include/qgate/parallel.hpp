#pragma once

#include <cstdlib>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace qgate {

// Intra-run parallelism cap: QGATE_THREADS if set, else the hardware count.
inline int thread_cap() {
  if (const char* env = std::getenv("QGATE_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(0..n-1) on up to thread_cap() threads. Tasks must be independent;
// the first exception is rethrown on the calling thread.
inline void parallel_for(int n, const std::function<void(int)>& fn) {
  const int nt = std::min(n, thread_cap());
  if (nt <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> workers;
  std::exception_ptr error;
  std::mutex error_mutex;
  for (int t = 0; t < nt; ++t) {
    workers.emplace_back([&, t]() {
      try {
        for (int i = t; i < n; i += nt) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace qgate
