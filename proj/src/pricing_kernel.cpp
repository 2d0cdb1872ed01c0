#include "levyito/pricing_kernel.hpp"

#include <cmath>
#include <utility>

#include "levyito/errors.hpp"

namespace levyito {

double excess_rate_of_return(const LevyModel& model,
                             const RiskAversion& aversion,
                             const AssetExposure& exposure, double t) {
  double r = 0.0;
  if (aversion.kappa && exposure.sigma_brownian) {
    const Vec k = aversion.kappa(t);
    const Vec s = exposure.sigma_brownian(t);
    if (k.size() != s.size())
      throw ConfigError(
          "excess_rate_of_return: kappa and sigma_brownian dimensions differ");
    r += dot(k, s);
  }
  if (aversion.lambda && exposure.sigma) {
    const auto& lam = aversion.lambda;
    const auto& sig = exposure.sigma;
    r += model.integrate_measure([&](const Vec& x) {
      return -std::expm1(-lam(x, t)) * std::expm1(sig(x, t));
    });
  }
  return r;
}

PricingKernel::PricingKernel(const LevyModel& model, TimeFn short_rate,
                             RiskAversion aversion, double horizon)
    : model_(model), aversion_(std::move(aversion)) {
  if (!(horizon > 0.0))
    throw ConfigError("PricingKernel: horizon must be positive");
  TimeFn r = std::move(short_rate);
  rate_integral_ = PrimedCumulative(CumulativeFunction(
      [r](double s) { return r ? r(s) : 0.0; }, 0.0, horizon));

  const RiskAversion& av = aversion_;
  const LevyModel& m = model_;
  auto det_rate = [r, av, m](double s) {
    double d = r ? -r(s) : 0.0;
    if (av.kappa) d -= 0.5 * norm2(av.kappa(s));
    if (av.lambda) {
      const auto& lam = av.lambda;
      d -= m.integrate_measure(
          [&](const Vec& x) { return std::expm1(-lam(x, s)); });
    }
    return d;
  };
  VecTimeFn loading;
  if (aversion_.kappa) {
    auto kappa = aversion_.kappa;
    loading = [kappa](double s) { return neg(kappa(s)); };
  }
  SpaceTimeFn jump;
  if (aversion_.lambda) {
    auto lam = aversion_.lambda;
    jump = [lam](const Vec& x, double s) { return -lam(x, s); };
  }
  factor_ = ExponentialFactor(CumulativeFunction(det_rate, 0.0, horizon),
                              std::move(loading), std::move(jump));
}

ScalarPath PricingKernel::simulate(const JumpPath& jumps, const TimeGrid& grid,
                                   const BrownianIncrements* bm) const {
  return factor_.simulate(jumps, grid, bm);
}

double PricingKernel::terminal_log(const JumpPath& jumps, double t,
                                   const BrownianIncrements* bm) const {
  return factor_.terminal_log(jumps, t, bm);
}

void PricingKernel::prime_grid(const TimeGrid& grid) {
  factor_.prime_grid(grid);
  rate_integral_.prime(grid.times);
}

double PricingKernel::integrated_short_rate(double t) const {
  return rate_integral_.between(0.0, t);
}

AssetPrice::AssetPrice(const LevyModel& model, TimeFn short_rate,
                       RiskAversion aversion, AssetExposure exposure,
                       double initial, double horizon)
    : model_(model), exposure_(std::move(exposure)), initial_(initial) {
  if (!(horizon > 0.0))
    throw ConfigError("AssetPrice: horizon must be positive");
  if (!(initial > 0.0))
    throw ConfigError("AssetPrice: initial price must be positive");
  TimeFn r = std::move(short_rate);
  const AssetExposure& ex = exposure_;
  const LevyModel& m = model_;
  auto det_rate = [r, aversion, ex, m](double s) {
    double d = (r ? r(s) : 0.0) + excess_rate_of_return(m, aversion, ex, s);
    if (ex.sigma_brownian) d -= 0.5 * norm2(ex.sigma_brownian(s));
    if (ex.sigma) {
      const auto& sig = ex.sigma;
      d -= m.integrate_measure(
          [&](const Vec& x) { return std::expm1(sig(x, s)); });
    }
    return d;
  };
  factor_ = ExponentialFactor(CumulativeFunction(det_rate, 0.0, horizon),
                              exposure_.sigma_brownian, exposure_.sigma);
}

ScalarPath AssetPrice::simulate(const JumpPath& jumps, const TimeGrid& grid,
                                const BrownianIncrements* bm) const {
  return factor_.simulate(jumps, grid, bm, initial_);
}

double AssetPrice::terminal_log(const JumpPath& jumps, double t,
                                const BrownianIncrements* bm) const {
  return std::log(initial_) + factor_.terminal_log(jumps, t, bm);
}

void AssetPrice::prime_grid(const TimeGrid& grid) { factor_.prime_grid(grid); }

}  // namespace levyito
