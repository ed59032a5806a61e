#pragma once

#include <atomic>
#include <thread>
#include <utility>
#include <vector>

namespace pintoc {

/// Run body(i) for i in [0, n) on up to `workers` threads. Work stealing is
/// dynamic but results are expected to be written to index-addressed slots,
/// so output is deterministic regardless of scheduling.
template <typename F>
void parallel_for_indexed(int n, int workers, F&& body) {
  if (workers <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  int nt = std::min(workers, n);
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= n) break;
        body(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace pintoc
