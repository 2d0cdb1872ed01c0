#pragma once

#include <vector>

namespace levyito {

// Strictly increasing simulation times starting at 0.
struct TimeGrid {
  std::vector<double> times;

  static TimeGrid uniform(double horizon, int steps);
  // New grid containing every original point plus the given event times
  // (events outside (0, horizon) are ignored). Exactness of jump handling in
  // the integrators relies on events being grid points.
  TimeGrid refined_with(const std::vector<double>& event_times) const;

  double horizon() const { return times.back(); }
  std::size_t cells() const { return times.size() - 1; }
  void validate() const;
};

}  // namespace levyito
