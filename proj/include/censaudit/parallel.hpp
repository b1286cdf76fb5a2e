#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace censaudit {

// Runs fn(i) for i in [0, n) on at most `limit` worker threads. Work is claimed
// in index order. The first exception escaping fn is rethrown after all workers
// join; callers that need per-slot errors catch inside fn.
template <typename Fn>
void bounded_for_each(size_t n, size_t limit, Fn&& fn) {
  if (n == 0) return;
  const size_t workers = std::max<size_t>(1, std::min(limit, n));
  if (workers == 1) {
    for (size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

}  // namespace censaudit
