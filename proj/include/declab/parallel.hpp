#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace declab {

// Worker pool size: 1 unless DECOUPLING_LAB_THREADS raises it.
inline int worker_count() {
  if (const char* s = std::getenv("DECOUPLING_LAB_THREADS")) {
    int v = std::atoi(s);
    if (v >= 1) return v;
  }
  return 1;
}

// results[i] = fn(i). Each slot is written exactly once and reduction order
// is the caller's, so output is identical for any worker count.
template <class T, class Fn>
std::vector<T> parallel_map(int count, Fn&& fn) {
  std::vector<T> out(count > 0 ? count : 0);
  int workers = std::min(worker_count(), std::max(count, 1));
  if (workers <= 1) {
    for (int i = 0; i < count; ++i) out[i] = fn(i);
    return out;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) out[i] = fn(i);
    });
  }
  for (auto& t : pool) t.join();
  return out;
}

}  // namespace declab
