#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "cramersim/rng.hpp"
#include "cramersim/stats.hpp"

namespace cramersim {

// Worker pool size: CRAMERSIM_WORKERS wins, hardware concurrency otherwise.
inline int worker_count() {
  if (const char* env = std::getenv("CRAMERSIM_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Static-chunk parallel loop. fn(i) must only touch per-index state; then the
// result is identical for every worker count.
template <class Fn>
inline void parallel_for(std::int64_t count, Fn&& fn) {
  const int workers = worker_count();
  if (count <= 0) return;
  if (workers == 1 || count < 2 * workers) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::int64_t chunk = (count + workers - 1) / workers;
  std::exception_ptr first_error = nullptr;
  std::mutex error_mutex;
  for (int w = 0; w < workers; ++w) {
    const std::int64_t lo = w * chunk;
    const std::int64_t hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::int64_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> g(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// One seeded Monte Carlo estimate. Per-replica generators are derived from
// (master_seed, replica index), so estimates are bit-identical across worker
// counts and merge order.
struct McReport {
  std::string experiment;
  std::vector<std::pair<std::string, double>> params;
  std::uint64_t master_seed = 0;
  std::int64_t replicas = 0;
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::int64_t elapsed_ms = 0;
};

inline McReport mc_estimate(const std::string& experiment,
                            std::vector<std::pair<std::string, double>> params,
                            std::int64_t replicas, std::uint64_t master_seed,
                            const std::function<bool(CounterRng&)>& event) {
  if (replicas < 100) throw std::domain_error("mc_estimate: need at least 100 replicas");
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<std::uint8_t> hits(static_cast<std::size_t>(replicas));
  parallel_for(replicas, [&](std::int64_t i) {
    CounterRng rng = CounterRng::for_replica(master_seed, static_cast<std::uint64_t>(i));
    hits[static_cast<std::size_t>(i)] = event(rng) ? 1 : 0;
  });
  std::int64_t count = 0;
  for (std::uint8_t h : hits) count += h;
  McReport r;
  r.experiment = experiment;
  r.params = std::move(params);
  r.master_seed = master_seed;
  r.replicas = replicas;
  r.estimate = static_cast<double>(count) / static_cast<double>(replicas);
  const Interval ci = wilson_interval(count, replicas);
  r.ci_low = ci.low;
  r.ci_high = ci.high;
  r.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                     std::chrono::steady_clock::now() - t0)
                     .count();
  return r;
}

}  // namespace cramersim
