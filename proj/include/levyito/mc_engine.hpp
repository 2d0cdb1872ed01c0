#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "levyito/rng.hpp"
#include "levyito/time_grid.hpp"

namespace levyito {

struct McConfig {
  std::uint64_t master_seed = 0;
  int n_paths = 10000;
  TimeGrid grid;       // simulation grid shared by the path functionals
  int worker_hint = 0; // 0 = use hardware concurrency
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;

  bool within(double target, double k = 3.0) const {
    return std::abs(mean - target) <= k * std_error;
  }
};

// Evaluates `functional` once per path and returns per-output mean/stderr.
// Reduction is blockwise with fixed block boundaries and in-order combination
// (Kahan within and across blocks), so results are bit-identical for any
// worker count. The functional must be thread-safe (pure given PathRng).
using PathFunctional =
    std::function<void(const PathRng&, std::vector<double>& out)>;

std::vector<Estimate> run_paths(const McConfig& config, int n_outputs,
                                const PathFunctional& functional);

Estimate run_paths_scalar(const McConfig& config,
                          const std::function<double(const PathRng&)>& f);

}  // namespace levyito
