#ifndef SEPSPEC_PARALLEL_HPP
#define SEPSPEC_PARALLEL_HPP

#include <cstdlib>
#include <thread>
#include <vector>

namespace sepspec {

/// Worker count: SEPSPEC_THREADS caps it, default machine parallelism.
inline int thread_count() {
  unsigned hw = std::thread::hardware_concurrency();
  int n = hw > 0 ? static_cast<int>(hw) : 1;
  if (const char* env = std::getenv("SEPSPEC_THREADS")) {
    int v = std::atoi(env);
    if (v > 0) n = v;
  }
  return n;
}

/// Static chunking over [0, n); each index is processed exactly once and the
/// work function writes only to its own slot, so results are bitwise
/// independent of the worker count.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn) {
  const int workers = thread_count();
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / static_cast<std::size_t>(workers);
  for (int w = 0; w < workers; ++w) {
    std::size_t lo = static_cast<std::size_t>(w) * chunk;
    if (lo >= n) break;
    std::size_t hi = std::min(n, lo + chunk);
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace sepspec

#endif
