#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace llfpca {

// Runs fn(i) for i in [0, count) on up to `workers` threads. Work items must
// write results only into their own slot (indexed by i) so that output is
// identical for any worker count; scheduling order is unspecified.
inline void parallel_for(std::size_t count, unsigned workers,
                         const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  if (workers <= 1 || count == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  unsigned nthreads = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto body = [&]() {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(body);
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// Default worker count: LLFPCA_WORKERS if set and positive, else 1.
inline unsigned worker_count_from_env() {
  const char* env = std::getenv("LLFPCA_WORKERS");
  if (!env) return 1;
  long v = std::strtol(env, nullptr, 10);
  return v > 0 ? static_cast<unsigned>(v) : 1u;
}

}  // namespace llfpca
