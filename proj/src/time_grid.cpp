#include "levyito/time_grid.hpp"

#include <algorithm>

#include "levyito/errors.hpp"

namespace levyito {

TimeGrid TimeGrid::uniform(double horizon, int steps) {
  if (!(horizon > 0.0) || steps < 1)
    throw GridError("TimeGrid::uniform: need horizon > 0 and steps >= 1");
  TimeGrid g;
  g.times.resize(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i)
    g.times[static_cast<std::size_t>(i)] = horizon * i / steps;
  g.times.back() = horizon;
  return g;
}

TimeGrid TimeGrid::refined_with(const std::vector<double>& event_times) const {
  TimeGrid g;
  g.times = times;
  for (double t : event_times)
    if (t > 0.0 && t < times.back()) g.times.push_back(t);
  std::sort(g.times.begin(), g.times.end());
  g.times.erase(std::unique(g.times.begin(), g.times.end()), g.times.end());
  return g;
}

void TimeGrid::validate() const {
  if (times.size() < 2 || times.front() != 0.0)
    throw GridError("TimeGrid: need times starting at 0 with >= 1 cell");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw GridError("TimeGrid: times must be strictly increasing");
}

}  // namespace levyito
