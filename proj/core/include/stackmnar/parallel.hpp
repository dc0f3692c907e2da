// Index-based parallel loop. Tasks write to disjoint, pre-sized slots, so
// results are identical for any worker count.
#ifndef STACKMNAR_PARALLEL_HPP
#define STACKMNAR_PARALLEL_HPP

#include <atomic>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace stackmnar {

inline void parallel_for(int n_tasks, int workers,
                         const std::function<void(int)>& task) {
  if (n_tasks <= 0) return;
  if (workers < 1) workers = 1;
  if (workers == 1 || n_tasks == 1) {
    for (int i = 0; i < n_tasks; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  const int n_threads = std::min(workers, n_tasks);
  pool.reserve(static_cast<std::size_t>(n_threads));
  for (int t = 0; t < n_threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (int i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) {
          task(i);
        }
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
        next.store(n_tasks);  // drain remaining work
      }
    });
  }
  for (auto& th : pool) th.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace stackmnar

#endif
