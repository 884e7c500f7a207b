#ifndef LEVYCB_THREADS_HPP
#define LEVYCB_THREADS_HPP

#include <algorithm>
#include <cstdlib>
#include <cstddef>
#include <thread>
#include <vector>

namespace levycb {

// Worker count: hardware concurrency capped by LEVY_CODEBOOK_THREADS.
inline unsigned worker_count() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("LEVY_CODEBOOK_THREADS")) {
    long cap = std::strtol(env, nullptr, 10);
    if (cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
  }
  return n;
}

// Runs fn(begin, end) on contiguous chunks of [0, n). Chunking depends only
// on n and the worker count, never on scheduling, so writes into disjoint
// slices stay reproducible.
template <typename Fn>
void parallel_for(std::size_t n, Fn fn) {
  unsigned workers = worker_count();
  if (workers <= 1 || n < 2 * workers) {
    fn(std::size_t{0}, n);
    return;
  }
  std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    std::size_t lo = std::min(n, w * chunk);
    std::size_t hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([=] { fn(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace levycb

#endif
