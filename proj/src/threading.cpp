#include "maxlab/types.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace maxlab {

namespace {

int initial_budget() {
  if (const char* env = std::getenv("BENCH_THREADS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::atomic<int> g_budget{initial_budget()};

}  // namespace

int thread_budget() { return g_budget.load(); }

void set_thread_budget(int n) { g_budget.store(std::max(1, n)); }

void parallel_for(index_t count, const std::function<void(index_t)>& fn) {
  if (count <= 0) return;
  const int nthreads = std::min<int>(thread_budget(), count);
  if (nthreads <= 1) {
    for (index_t i = 0; i < count; ++i) fn(i);
    return;
  }
  // Static contiguous split: iteration-to-thread mapping is a pure function of
  // (count, nthreads), and each iteration writes disjoint slots, so the result
  // is the same for every thread budget.
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(nthreads));
  const index_t chunk = (count + nthreads - 1) / nthreads;
  for (int t = 0; t < nthreads; ++t) {
    const index_t lo = static_cast<index_t>(t) * chunk;
    const index_t hi = std::min<index_t>(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (index_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace maxlab
