#pragma once

#include <functional>
#include <mutex>
#include <stdexcept>
#include <thread>
#include <vector>

#include "opsize/chain.hpp"

namespace opsize {

// Static block partition of [0, n) across workers. Each index writes only its
// own output slot and every reduction downstream runs in index order, so
// results are identical for any thread count.
inline void parallel_for(i64 n, int n_threads, const std::function<void(i64)>& body) {
  if (n_threads < 1) throw std::invalid_argument("parallel_for: thread count must be >= 1");
  if (n <= 0) return;
  if (n_threads == 1 || n == 1) {
    for (i64 i = 0; i < n; ++i) body(i);
    return;
  }
  const int workers = static_cast<int>(std::min<i64>(n_threads, n));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  std::exception_ptr first_error;
  std::mutex error_mu;
  for (int w = 0; w < workers; ++w) {
    const i64 lo = n * w / workers;
    const i64 hi = n * (w + 1) / workers;
    pool.emplace_back([&, lo, hi] {
      try {
        for (i64 i = lo; i < hi; ++i) body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}
