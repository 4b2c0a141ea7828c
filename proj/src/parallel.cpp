// Copyright 2026 The Parastrat Authors
// SPDX-License-Identifier: Apache-2.0

#include "parastrat/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace parastrat {

int worker_count(int requested) {
  int n = requested > 0 ? requested
                        : static_cast<int>(std::thread::hardware_concurrency());
  if (n < 1) n = 1;
  if (const char *env = std::getenv("PARASTRAT_THREADS")) {
    try {
      const int cap = std::stoi(env);
      if (cap >= 1) n = std::min(n, cap);
    } catch (const std::exception &) {
      // Unparseable values leave the count alone.
    }
  }
  return n;
}

void parallel_for(size_t n, int workers,
                  const std::function<void(size_t, size_t)> &fn) {
  if (n == 0) return;
  const size_t w = std::min<size_t>(std::max(workers, 1), n);
  if (w == 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> threads;
  std::exception_ptr error;
  std::mutex error_mu;
  const size_t chunk = (n + w - 1) / w;
  for (size_t t = 0; t < w; ++t) {
    const size_t begin = t * chunk;
    const size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    threads.emplace_back([&, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto &th : threads) th.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace parastrat
