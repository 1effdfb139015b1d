// warpfreq/parallel.hpp
//
// Copyright 2026 the warpfreq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#ifndef WARPFREQ_PARALLEL_HPP
#define WARPFREQ_PARALLEL_HPP

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace warpfreq {

/// Worker cap shared by all parallel loops. 0 means "hardware concurrency".
/// WARPFRAME_THREADS serves as the environment fallback.
inline int& thread_cap() {
  static int cap = [] {
    if (const char* env = std::getenv("WARPFRAME_THREADS")) {
      const int v = std::atoi(env);
      if (v > 0) return v;
    }
    return 0;
  }();
  return cap;
}

inline int effective_threads(std::size_t work_items) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  int n = thread_cap() > 0 ? thread_cap() : static_cast<int>(hw);
  if (static_cast<std::size_t>(n) > work_items) n = static_cast<int>(work_items);
  return n < 1 ? 1 : n;
}

/// parallel_for over [0, n). The body must be safe to run concurrently for
/// distinct indices; results that need a deterministic combination order
/// should be written to per-index slots and reduced by the caller.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const int nt = effective_threads(n);
  if (nt <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(nt));
  std::atomic<bool> failed{false};
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= n || failed.load()) return;
        try {
          body(i);
        } catch (...) {
          failed.store(true);
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failed.load()) throw std::runtime_error("parallel_for: worker failed");
}

}  // namespace warpfreq

#endif  // WARPFREQ_PARALLEL_HPP
