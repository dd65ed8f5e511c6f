#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace hqrc {

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Jobs are
/// independent; callers aggregate results by index so parallel and serial
/// runs agree bitwise. The first exception is rethrown after all threads
/// join.
inline void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t stride = static_cast<std::size_t>(workers);
  std::vector<std::exception_ptr> errors(stride);
  for (std::size_t w = 0; w < stride; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += stride) fn(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const std::exception_ptr& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace hqrc
