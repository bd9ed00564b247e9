#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace sbm::num {

inline unsigned default_workers() { return std::max(1u, std::thread::hardware_concurrency()); }

/// Evaluates fn(i) for i in [0, count) on `workers` threads and returns the results in
/// index order. The result never depends on the worker count as long as fn(i) only
/// depends on i. The first exception thrown by any task is rethrown.
template <class Fn>
auto parallel_map(std::size_t count, unsigned workers, Fn&& fn) {
  using T = decltype(fn(std::size_t{}));
  std::vector<T> out(count);
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          out[i] = fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace sbm::num
