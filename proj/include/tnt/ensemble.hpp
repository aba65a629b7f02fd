#pragma once

// Deterministic trajectory-ensemble driver shared by the two-mode and the
// multimode solvers.

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "tnt/accumulator.hpp"
#include "tnt/error.hpp"
#include "tnt/parallel.hpp"

namespace tnt {

struct EnsembleOptions {
  std::size_t n_traj = 0;
  std::size_t n_times = 0;
  std::size_t threads = 1;
  // Fixed block count: partial sums are formed per block and merged in block
  // order, which makes the reduction independent of the worker count.
  std::size_t blocks = 32;
  double max_failure_fraction = 0.01;
};

struct EnsembleSums {
  std::vector<TimeAccumulator> per_time;
  std::vector<std::size_t> failed_trajectories;
  std::size_t n_traj = 0;
  // Modes per component behind the symbols: 1 for the two-mode model, the
  // grid size for fields. Fixes the ordering corrections.
  std::size_t n_modes = 1;
};

/// trajectory(index, worker, out) fills out[0..n_times) with the symbols of
/// one trajectory; it may throw NumericalError to report a failed trajectory.
template <class TrajectoryFn>
EnsembleSums accumulate_ensemble(const EnsembleOptions& opts, TrajectoryFn&& trajectory) {
  if (opts.n_traj == 0 || opts.n_times == 0) {
    throw InvalidArgument("ensemble needs at least one trajectory and one output time");
  }
  EnsembleSums result;
  result.n_traj = opts.n_traj;
  result.per_time.assign(opts.n_times, TimeAccumulator{});

  // The shift comes from the first trajectory that integrates cleanly.
  std::vector<SymbolSample> reference(opts.n_times);
  bool have_reference = false;
  for (std::size_t i = 0; i < opts.n_traj && !have_reference; ++i) {
    try {
      trajectory(i, std::size_t{0}, std::span<SymbolSample>(reference));
      have_reference = true;
    } catch (const NumericalError&) {
    }
  }
  if (!have_reference) throw IntegrationFailure("every trajectory failed", 0);
  for (std::size_t t = 0; t < opts.n_times; ++t) result.per_time[t].set_shift(reference[t]);

  const std::size_t n_blocks = std::min(opts.blocks == 0 ? 1 : opts.blocks, opts.n_traj);
  std::vector<std::vector<TimeAccumulator>> partial(n_blocks);
  std::vector<std::vector<std::size_t>> block_failures(n_blocks);
  const std::size_t workers = std::max<std::size_t>(1, opts.threads);
  std::vector<std::vector<SymbolSample>> scratch(workers, std::vector<SymbolSample>(opts.n_times));

  parallel_for(n_blocks, workers, [&](std::size_t b, std::size_t w) {
    const std::size_t begin = b * opts.n_traj / n_blocks;
    const std::size_t end = (b + 1) * opts.n_traj / n_blocks;
    auto& acc = partial[b];
    acc.assign(opts.n_times, TimeAccumulator{});
    for (std::size_t t = 0; t < opts.n_times; ++t) acc[t].set_shift(reference[t]);
    auto& buffer = scratch[w];
    for (std::size_t i = begin; i < end; ++i) {
      try {
        trajectory(i, w, std::span<SymbolSample>(buffer));
      } catch (const NumericalError&) {
        block_failures[b].push_back(i);
        continue;
      }
      for (std::size_t t = 0; t < opts.n_times; ++t) acc[t].add(buffer[t]);
    }
  });

  for (std::size_t b = 0; b < n_blocks; ++b) {
    for (std::size_t t = 0; t < opts.n_times; ++t) result.per_time[t].merge(partial[b][t]);
    result.failed_trajectories.insert(result.failed_trajectories.end(), block_failures[b].begin(),
                                      block_failures[b].end());
  }
  const double failed = static_cast<double>(result.failed_trajectories.size());
  if (failed > opts.max_failure_fraction * static_cast<double>(opts.n_traj)) {
    throw IntegrationFailure("more than " + std::to_string(opts.max_failure_fraction * 100.0) +
                                 "% of trajectories failed",
                             result.failed_trajectories.front());
  }
  if (result.per_time.front().count() < 2.0) {
    throw InvalidArgument("ensemble needs at least two successful trajectories");
  }
  return result;
}

}  // namespace tnt
