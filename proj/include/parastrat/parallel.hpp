// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace parastrat {

/// Hardware concurrency, capped by PARASTRAT_THREADS when set. `requested`
/// > 0 overrides the hardware count but not the cap.
int worker_count(int requested = 0);

/// Runs fn(begin, end) over contiguous chunks of [0, n) on up to `workers`
/// threads and joins them. Exceptions from workers are rethrown.
void parallel_for(size_t n, int workers,
                  const std::function<void(size_t, size_t)> &fn);

}  // namespace parastrat
