#pragma once

#include <vector>

#include "levyito/vecmath.hpp"

namespace levyito {

struct JumpEvent {
  double time;
  Vec x;  // jump mark in R^n \ {0}
};

// One realization of the marks of a Poisson random measure on (0, horizon].
// Events are sorted by time. For infinite-activity models sampled by
// subordination (gamma, variance gamma) each event is the aggregated increment
// over one sampling cell; for Custom measures, marks with |x| <= the recorded
// truncation radius were dropped at the source and only survive through the
// compensators.
struct JumpPath {
  double horizon = 0.0;
  std::vector<JumpEvent> events;
  double truncation_radius = 0.0;

  std::vector<double> event_times() const {
    std::vector<double> t;
    t.reserve(events.size());
    for (const auto& e : events) t.push_back(e.time);
    return t;
  }
};

}  // namespace levyito
