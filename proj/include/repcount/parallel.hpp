#ifndef REPCOUNT_PARALLEL_HPP_
#define REPCOUNT_PARALLEL_HPP_

#include <cstdlib>
#include <thread>
#include <vector>

namespace repcount {

/// Worker cap: REPCOUNT_THREADS env var, 0 or unset means hardware auto.
inline int max_workers() {
  if (const char* env = std::getenv("REPCOUNT_THREADS")) {
    int n = std::atoi(env);
    if (n > 0) return n;
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace detail {
inline thread_local int parallel_depth = 0;
}

/// Runs fn(i) for i in [0, n). Each index writes only its own output slot,
/// so results are identical regardless of the worker count. Nested calls
/// run serially inside an outer worker.
template <typename Fn>
void parallel_for(int n, Fn&& fn, int workers = 0) {
  if (n <= 0) return;
  if (workers <= 0) workers = max_workers();
  if (workers > n) workers = n;
  if (workers <= 1 || detail::parallel_depth > 0) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([=]() {
      ++detail::parallel_depth;
      for (int i = w; i < n; i += workers) fn(i);
      --detail::parallel_depth;
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace repcount

#endif  // REPCOUNT_PARALLEL_HPP_
