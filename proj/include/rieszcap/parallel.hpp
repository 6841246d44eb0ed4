#pragma once

// Fixed-partition data parallelism. Work is split into a number of chunks
// that does not depend on the thread count, every chunk writes only its own
// slot, and callers combine the slots in chunk order. Results are therefore
// bit-identical for any thread limit, including the sequential limit 1.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace rieszcap {

/// Caps the worker threads used by every parallel reduction. 0 restores the
/// hardware default.
void set_thread_limit(unsigned limit);
unsigned thread_limit();

template <class Fn>
void run_chunks(std::size_t chunks, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(thread_limit(), chunks);
  if (workers <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        fn(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t t = 1; t < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace rieszcap
