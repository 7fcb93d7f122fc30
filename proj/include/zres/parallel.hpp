#pragma once

// Chunked parallel loop with a fixed reduction order.

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace zres {

/// Worker count: ZRES_THREADS when set to a positive integer, otherwise the
/// hardware concurrency (at least 1).
inline int worker_count() {
  if (const char* env = std::getenv("ZRES_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(chunk) for chunk in [0, chunks). Chunks are handed out in
/// interleaved order; callers write results into per-chunk slots and reduce
/// them afterwards in ascending chunk order.
template <class Fn>
void parallel_chunks(long chunks, Fn&& fn) {
  const int workers = static_cast<int>(std::min<long>(worker_count(), chunks));
  if (workers <= 1) {
    for (long c = 0; c < chunks; ++c) fn(c);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr error;
  std::mutex mu;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (long c = w; c < chunks; c += workers) fn(c);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace zres
