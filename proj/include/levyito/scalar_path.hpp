#pragma once

#include <algorithm>
#include <vector>

namespace levyito {

// Scalar cadlag path sampled on a time grid. values[i] is the post-jump state
// at times[i]; left_values[i] is the pre-jump left limit (identical except at
// event times).
struct ScalarPath {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<double> left_values;

  double terminal() const { return values.back(); }

  // Post-jump value at the last grid time <= t.
  double value_at(double t) const {
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin()) return values.front();
    return values[static_cast<std::size_t>(it - times.begin()) - 1];
  }
};

}  // namespace levyito
