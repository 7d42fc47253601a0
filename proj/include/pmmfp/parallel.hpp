// SPDX-License-Identifier: Apache-2.0
// Copyright (c) 2026 The pmmfp authors

#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace pmmfp {

// Runs body(i) for i in [0, count) on up to `threads` workers. Each index
// owns its output slot and draws randomness from its own counter-based
// stream, so results are identical for any thread count; only wall-clock
// time varies. The first exception (if any) is rethrown on the caller.
inline void parallel_for(int count, int threads,
                         const std::function<void(int)>& body) {
  if (count <= 0) return;
  if (threads <= 1 || count == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<int> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};

  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= count || failed.load()) return;
      try {
        body(i);
      } catch (...) {
        if (!failed.exchange(true)) error = std::current_exception();
        return;
      }
    }
  };

  const int n_workers = std::min(threads, count);
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failed.load() && error) std::rethrow_exception(error);
}

// Default worker count: PMMFP_THREADS environment variable when set,
// otherwise 1 (fully deterministic runs should not depend on probing the
// machine; parallelism is strictly opt-in).
inline int default_thread_count() {
  if (const char* env = std::getenv("PMMFP_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return 1;
}

}  // namespace pmmfp
