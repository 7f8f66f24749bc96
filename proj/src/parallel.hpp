#pragma once

#include <atomic>
#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace ldplab {

// Parallel loop over [0, count).  Each index is processed independently
// (callers key their RNG stream off the index), so the result is the same
// for any worker count.
inline void parallel_for(std::size_t count, int workers,
                         const std::function<void(std::size_t)>& body) {
  if (workers <= 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  auto run = [&] {
    const std::size_t chunk = 64;
    for (;;) {
      std::size_t start = next.fetch_add(chunk);
      if (start >= count) break;
      std::size_t stop = std::min(start + chunk, count);
      for (std::size_t i = start; i < stop; ++i) body(i);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& t : pool) t.join();
}

}  // namespace ldplab
