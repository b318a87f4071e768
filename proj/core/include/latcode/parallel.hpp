#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <thread>
#include <vector>

namespace latcode {

// Resolve a thread-count request: explicit value wins, then the
// LATTICE_THREADS environment variable, then hardware concurrency.
inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LATTICE_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) return v;
  }
  unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Runs fn(chunk_index, begin, end) over [0, total) split into fixed-size
// chunks. The chunking is independent of the thread count, so reductions
// keyed by chunk_index are deterministic no matter how many workers run.
template <typename Fn>
void parallel_chunks(std::uint64_t total, std::uint64_t chunk, int threads, Fn&& fn) {
  if (total == 0) return;
  if (chunk == 0) chunk = 1;
  const std::uint64_t nchunks = (total + chunk - 1) / chunk;
  threads = std::max(1, threads);
  const int workers = static_cast<int>(std::min<std::uint64_t>(threads, nchunks));
  if (workers <= 1) {
    for (std::uint64_t ci = 0; ci < nchunks; ++ci)
      fn(ci, ci * chunk, std::min(total, (ci + 1) * chunk));
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::uint64_t ci = next.fetch_add(1);
        if (ci >= nchunks) return;
        fn(ci, ci * chunk, std::min(total, (ci + 1) * chunk));
      }
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace latcode
