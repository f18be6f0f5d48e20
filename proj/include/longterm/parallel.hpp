#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace longterm {

// Runs fn(task) for task = 0..n_tasks-1 on up to `threads` workers. Tasks
// must write only to their own slots; the work split is by task index, so
// results do not depend on the number of workers. The first exception thrown
// by any task is rethrown on the caller thread.
template <typename Fn>
void parallel_for(std::size_t n_tasks, int threads, Fn&& fn) {
  if (threads <= 1 || n_tasks <= 1) {
    for (std::size_t t = 0; t < n_tasks; ++t) fn(t);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};
  auto worker = [&]() {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= n_tasks || failed.load()) return;
      try {
        fn(t);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };
  const int n_workers = static_cast<int>(
      std::min<std::size_t>(n_tasks, static_cast<std::size_t>(threads)));
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (int w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace longterm
