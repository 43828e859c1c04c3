#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace scencert {

// Worker cap: SCENARIO_CERT_THREADS when set, hardware concurrency otherwise.
std::size_t worker_count();

// Runs fn(i) for i in [0, n). Each index is visited exactly once, so any
// per-index output is deterministic regardless of the worker count.
template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < n; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace scencert
