// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#include "matbake/parallel.h"

#include <cstdlib>
#include <exception>

namespace matbake {

int resolve_workers(int requested) {
  if (const char* env = std::getenv("MATBAKE_WORKERS")) {
    int n = std::atoi(env);
    if (n >= 1) return n;
  }
  if (requested >= 1) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw >= 1 ? static_cast<int>(hw) : 1;
}

void parallel_for(int64_t count, int workers, const std::function<void(int64_t)>& func) {
  if (count <= 0) return;
  workers = resolve_workers(workers);
  if (workers == 1 || count == 1) {
    for (int64_t i = 0; i < count; ++i) func(i);
    return;
  }

  std::atomic<int64_t> next{0};
  std::exception_ptr error;
  std::atomic<bool> failed{false};

  auto worker = [&]() {
    try {
      while (true) {
        int64_t i = next.fetch_add(1, std::memory_order_relaxed);
        if (i >= count || failed.load(std::memory_order_relaxed)) break;
        func(i);
      }
    } catch (...) {
      if (!failed.exchange(true)) error = std::current_exception();
    }
  };

  std::vector<std::thread> threads;
  threads.reserve(workers - 1);
  for (int t = 1; t < workers; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace matbake
