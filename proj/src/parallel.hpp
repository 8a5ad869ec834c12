#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace aflx::detail {

// Worker count for Monte Carlo loops, from AFLX_THREADS (default 1). Results
// never depend on this: trials are keyed by index and accumulators are
// integers, so any split yields the same aggregate.
inline unsigned thread_count() {
  if (const char* env = std::getenv("AFLX_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1 && v <= 256) return static_cast<unsigned>(v);
  }
  return 1;
}

// Runs fn(begin, end, chunk_index) over contiguous chunks of [0, total).
template <typename Fn>
inline unsigned run_chunked(std::uint64_t total, unsigned threads, Fn&& fn) {
  if (total == 0) return 0;
  threads = std::max(1u, std::min<unsigned>(threads, 64u));
  std::uint64_t per = (total + threads - 1) / threads;
  unsigned chunks = static_cast<unsigned>((total + per - 1) / per);
  if (chunks <= 1) {
    fn(std::uint64_t{0}, total, 0u);
    return 1;
  }
  std::vector<std::thread> pool;
  pool.reserve(chunks);
  for (unsigned c = 0; c < chunks; ++c) {
    std::uint64_t b = per * c;
    std::uint64_t e = std::min(total, b + per);
    pool.emplace_back([&fn, b, e, c] { fn(b, e, c); });
  }
  for (auto& t : pool) t.join();
  return chunks;
}

}  // namespace aflx::detail
