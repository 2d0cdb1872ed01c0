#pragma once

#include <functional>
#include <string>
#include <vector>

namespace levyito {

// Deterministic discount curve t -> P(0, t).
using DiscountCurveFn = std::function<double(double)>;

// Market discount curve interpolated log-linearly in the discount factor
// (piecewise-constant instantaneous forward rates between pillars). The curve
// is anchored at P(0) = 1 and extrapolated beyond the last pillar with the
// last forward rate, so discount(t) -> 0 as t -> infinity whenever that
// forward is positive.
class YieldCurve {
 public:
  // Pillars must be strictly increasing and positive; discounts must be
  // positive. Throws DataError on violations.
  YieldCurve(std::vector<double> tenors, std::vector<double> discounts);

  static YieldCurve from_discounts(std::vector<double> tenors,
                                   std::vector<double> discounts);
  static YieldCurve from_zero_rates(std::vector<double> tenors,
                                    std::vector<double> zero_rates);

  // CSV with header "tenor_years,discount_factor" or
  // "tenor_years,zero_rate" (continuous compounding). Throws DataError on
  // malformed input.
  static YieldCurve from_csv(const std::string& path);

  double discount(double t) const;   // P(0, t)
  double zero_rate(double t) const;  // -log P / t (t > 0)
  // Instantaneous forward; at a pillar returns the segment ending there.
  double forward_rate(double t) const;

  double max_tenor() const { return tenors_.back(); }
  const std::vector<double>& tenors() const { return tenors_; }
  const std::vector<double>& discounts() const { return discounts_; }

  DiscountCurveFn discount_function() const;

 private:
  std::vector<double> tenors_;     // strictly increasing, > 0
  std::vector<double> discounts_;  // P(0, tenor)
  std::vector<double> log_p_;      // log discounts_
  std::vector<double> forwards_;   // forward on (tenor_{i-1}, tenor_i]
};

}  // namespace levyito
