#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "tnt/error.hpp"

namespace tnt {

/// Worker count: explicit flag, then TNT_THREADS, then hardware concurrency.
inline std::size_t resolve_threads(std::optional<std::size_t> flag = std::nullopt) {
  if (flag && *flag > 0) return *flag;
  if (const char* env = std::getenv("TNT_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs body(task, worker) for task in [0, n_tasks) on up to n_workers
/// threads. Tasks are claimed dynamically; callers must write results to
/// per-task slots so the outcome does not depend on scheduling. The first
/// exception thrown by any task is rethrown after all workers stop.
template <class Body>
void parallel_for(std::size_t n_tasks, std::size_t n_workers, Body&& body) {
  n_workers = std::max<std::size_t>(1, std::min(n_workers, n_tasks));
  if (n_workers == 1) {
    for (std::size_t t = 0; t < n_tasks; ++t) body(t, std::size_t{0});
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(n_workers);
    for (std::size_t w = 0; w < n_workers; ++w) {
      pool.emplace_back([&, w] {
        for (;;) {
          if (failed.load()) return;
          const std::size_t t = next.fetch_add(1);
          if (t >= n_tasks) return;
          try {
            body(t, w);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            failed.store(true);
            return;
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
}

/// Independent generator for one trajectory, keyed by (seed, index) so the
/// stream does not depend on which worker runs the trajectory.
inline std::mt19937_64 trajectory_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    0x74776e74u};
  return std::mt19937_64(seq);
}

}  // namespace tnt
