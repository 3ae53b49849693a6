#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace fiberdim {

inline bool parallel_disabled() {
  const char* v = std::getenv("NO_PARALLEL");
  return v != nullptr && v[0] == '1';
}

// Splits [0, n) into contiguous chunks and runs fn(chunk_index, begin, end).
// Results must be merged per chunk index afterwards so serial and parallel
// execution are identical.
inline size_t parallel_chunks(size_t n, const std::function<void(size_t, size_t, size_t)>& fn) {
  size_t hw = std::thread::hardware_concurrency();
  size_t threads = parallel_disabled() || hw < 2 ? 1 : std::min<size_t>(hw, 4);
  if (n < 1024) threads = 1;
  size_t chunks = threads;
  if (chunks <= 1) {
    fn(0, 0, n);
    return 1;
  }
  std::vector<std::thread> pool;
  size_t step = (n + chunks - 1) / chunks;
  for (size_t c = 0; c < chunks; ++c) {
    size_t lo = c * step;
    size_t hi = std::min(n, lo + step);
    if (lo >= hi) continue;
    pool.emplace_back(fn, c, lo, hi);
  }
  for (auto& t : pool) t.join();
  return chunks;
}

}  // namespace fiberdim
