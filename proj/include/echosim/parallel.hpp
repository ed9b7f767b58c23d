#pragma once

// Deterministic parallel helpers. The ion loop is embarrassingly parallel;
// reductions are made bit-reproducible by summing fixed-size index blocks
// sequentially and combining the block results in a fixed pairwise tree.
// Neither partitioning nor combination order depends on the worker count,
// so results are identical for any ECHOSIM_THREADS setting.

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cstddef>
#include <string>
#include <thread>
#include <vector>

namespace echosim {

inline int thread_count() {
  if (const char* env = std::getenv("ECHOSIM_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

// Runs fn(begin, end) over disjoint chunks of [0, n). Chunk boundaries are an
// implementation detail; fn must only write to per-index slots.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const int workers = std::min<std::size_t>(thread_count(), std::max<std::size_t>(n, 1));
  if (workers <= 1 || n < 2048) {
    fn(std::size_t{0}, n);
    return;
  }
  // Hand out fixed 2048-index chunks through an atomic cursor.
  constexpr std::size_t kChunk = 2048;
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t begin = cursor.fetch_add(kChunk);
      if (begin >= n) return;
      fn(begin, std::min(begin + kChunk, n));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (int t = 0; t + 1 < workers; ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

// Deterministic sum of map(i) over i in [0, n). T needs operator+=, default
// construction to zero, and value semantics. Block size is a constant of the
// algorithm, not of the machine.
template <typename T, typename Map>
T deterministic_sum(std::size_t n, Map&& map) {
  constexpr std::size_t kBlock = 4096;
  const std::size_t nblocks = (n + kBlock - 1) / kBlock;
  if (nblocks == 0) return T{};
  std::vector<T> partial(nblocks, T{});
  parallel_for(nblocks, [&](std::size_t b0, std::size_t b1) {
    for (std::size_t b = b0; b < b1; ++b) {
      T acc{};
      const std::size_t lo = b * kBlock;
      const std::size_t hi = std::min(lo + kBlock, n);
      for (std::size_t i = lo; i < hi; ++i) acc += map(i);
      partial[b] = acc;
    }
  });
  // Fixed-topology pairwise tree over the block results.
  std::size_t width = nblocks;
  while (width > 1) {
    const std::size_t half = (width + 1) / 2;
    for (std::size_t i = 0; i + half < width; ++i) partial[i] += partial[i + half];
    width = half;
  }
  return partial[0];
}

}  // namespace echosim
