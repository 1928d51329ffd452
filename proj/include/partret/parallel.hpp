#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace partret {

inline unsigned default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

// Runs body(lo, hi) over [0, count) in dynamically scheduled chunks.
// Each work item belongs to exactly one chunk, so callers that write into
// per-item slots get identical results for any worker count.
inline void parallel_chunks(size_t count, unsigned workers, size_t chunk,
                            const std::function<void(size_t, size_t)>& body) {
  if (count == 0) return;
  workers = std::max(1u, workers);
  chunk = std::max<size_t>(1, chunk);
  if (workers == 1 || count <= chunk) {
    body(0, count);
    return;
  }
  std::atomic<size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (;;) {
      const size_t lo = next.fetch_add(chunk, std::memory_order_relaxed);
      if (lo >= count) return;
      const size_t hi = std::min(count, lo + chunk);
      try {
        body(lo, hi);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  const size_t max_useful = (count + chunk - 1) / chunk;
  const unsigned spawn = static_cast<unsigned>(std::min<size_t>(workers, max_useful));
  std::vector<std::thread> pool;
  pool.reserve(spawn - 1);
  for (unsigned w = 1; w < spawn; ++w) pool.emplace_back(run);
  run();
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace partret
