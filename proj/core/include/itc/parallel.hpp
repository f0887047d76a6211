#pragma once

#include <thread>
#include <vector>

namespace itc {

/// Runs f(i) for i in [0, n) on up to `workers` threads over contiguous
/// chunks. Each index writes only its own output slot, so results do not
/// depend on the worker count.
template <class F>
void parallel_for(int n, int workers, F&& f) {
  if (workers <= 1 || n < 64) {
    for (int i = 0; i < n; ++i) f(i);
    return;
  }
  int used = std::min(workers, n);
  std::vector<std::thread> pool;
  pool.reserve(used);
  int chunk = (n + used - 1) / used;
  for (int w = 0; w < used; ++w) {
    int lo = w * chunk;
    int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &f] {
      for (int i = lo; i < hi; ++i) f(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace itc
