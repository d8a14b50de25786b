#pragma once

#include <functional>
#include <thread>
#include <vector>

namespace paxsat {

/// Runs fn(0..n_tasks-1) across up to `threads` workers. Callers store
/// results by task index, so scheduling never affects output.
inline void parallel_for(int n_tasks, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1 || n_tasks <= 1) {
    for (int i = 0; i < n_tasks; ++i) fn(i);
    return;
  }
  int workers = std::min(threads, n_tasks);
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (int i = w; i < n_tasks; i += workers) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace paxsat
