#pragma once

#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace levyruin {

inline unsigned default_workers() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : hc;
}

// Static block partition of [0, n) over `workers` threads: chunk `c` covers
// a contiguous replicate range and runs on its own thread. Per-replicate
// keyed streams make the result identical for any worker count.
inline void parallel_chunks(
    std::uint64_t n, unsigned workers,
    const std::function<void(unsigned, std::uint64_t, std::uint64_t)>& body) {
  if (workers <= 1 || n < 2) {
    body(0, 0, n);
    return;
  }
  const std::uint64_t w = std::min<std::uint64_t>(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(w);
  const std::uint64_t chunk = (n + w - 1) / w;
  for (std::uint64_t k = 0; k < w; ++k) {
    const std::uint64_t lo = k * chunk;
    const std::uint64_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(body, static_cast<unsigned>(k), lo, hi);
  }
  for (auto& t : pool) t.join();
}

inline void parallel_replicates(std::uint64_t n, unsigned workers,
                                const std::function<void(std::uint64_t, std::uint64_t)>& body) {
  parallel_chunks(n, workers,
                  [&](unsigned, std::uint64_t lo, std::uint64_t hi) { body(lo, hi); });
}

}  // namespace levyruin
