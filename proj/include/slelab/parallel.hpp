#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

#include "slelab/rng.hpp"
#include "slelab/stats.hpp"

namespace slelab {

// worker count: explicit flag > SLELAB_WORKERS env > hardware threads
int default_workers();

// Replica fan-out: fn(index, rng) runs once per replica with a private
// counter-based stream keyed by (seed, index).  Results land in a per-replica
// slot and are reduced by the caller in index order, so the outcome is a pure
// function of (seed, n) regardless of the worker count.
template <class T, class Fn>
std::vector<T> run_replicas(std::uint64_t n, std::uint64_t seed, int workers,
                            Fn&& fn) {
  std::vector<T> out(n);
  if (workers <= 0) workers = default_workers();
  if (static_cast<std::uint64_t>(workers) > n)
    workers = static_cast<int>(n ? n : 1);
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < n; ++i) {
      RngStream rng(seed, i);
      out[i] = fn(i, rng);
    }
    return out;
  }
  std::atomic<std::uint64_t> next{0};
  auto body = [&]() {
    for (;;) {
      std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
      if (i >= n) return;
      RngStream rng(seed, i);
      out[i] = fn(i, rng);
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(body);
  for (auto& th : pool) th.join();
  return out;
}

McResult summarize(const std::vector<double>& per_replica);

}  // namespace slelab
