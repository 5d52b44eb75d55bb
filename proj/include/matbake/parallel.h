// Copyright (c) 2026 matbake contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace matbake {

// Effective worker count: MATBAKE_WORKERS env var wins, then the requested
// value, then hardware concurrency. Always >= 1.
int resolve_workers(int requested);

// Runs func(index) for index in [0, count) over `workers` threads. Work items
// are handed out through an atomic counter; results must not depend on the
// assignment of items to threads.
void parallel_for(int64_t count, int workers, const std::function<void(int64_t)>& func);

}  // namespace matbake
