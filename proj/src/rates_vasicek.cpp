#include "levyito/rates_vasicek.hpp"

#include <cmath>
#include <utility>

#include "levyito/errors.hpp"

namespace levyito {

namespace {

// expm1(-lambda) and friends keep the integrands stable for small lambda.
double gauge_rate(const LevyModel& m, const SpaceTimeFn& lambda, double s) {
  if (!lambda) return 0.0;
  return m.integrate_measure([&](const Vec& x) {
    const double l = lambda(x, s);
    return std::expm1(-l) + l;
  });
}

}  // namespace

VasicekModel::VasicekModel(VasicekSpec spec, double horizon)
    : spec_(std::move(spec)), horizon_(horizon) {
  if (!(spec_.k > 0.0))
    throw ConfigError("VasicekModel: mean reversion rate must be positive");
  if (!(horizon > 0.0))
    throw ConfigError("VasicekModel: horizon must be positive");

  const LevyModel& m = spec_.model;
  const double k = spec_.k;
  const SpaceTimeFn sigma = spec_.sigma;
  const SpaceTimeFn lambda = spec_.lambda;

  auto sigma_rate = [m, sigma](double s) {
    if (!sigma) return 0.0;
    return m.integrate_measure([&](const Vec& x) { return sigma(x, s); });
  };
  comp_sigma_ =
      PrimedCumulative(CumulativeFunction(sigma_rate, 0.0, horizon));
  comp_eks_sigma_ = PrimedCumulative(CumulativeFunction(
      [k, sigma_rate](double s) { return std::exp(k * s) * sigma_rate(s); },
      0.0, horizon));
  comp_gauge_ = PrimedCumulative(CumulativeFunction(
      [m, lambda](double s) { return gauge_rate(m, lambda, s); }, 0.0,
      horizon));
  comp_damp_ = PrimedCumulative(CumulativeFunction(
      [m, lambda](double s) {
        if (!lambda) return 0.0;
        return m.integrate_measure(
            [&](const Vec& x) { return std::expm1(-lambda(x, s)); });
      },
      0.0, horizon));
  comp_f_ = PrimedCumulative(CumulativeFunction(
      [m, k, sigma, lambda](double s) {
        if (!sigma && !lambda) return 0.0;
        return m.integrate_measure([&](const Vec& x) {
          const double sv = sigma ? sigma(x, s) : 0.0;
          const double lv = lambda ? lambda(x, s) : 0.0;
          return sv / k - lv;
        });
      },
      0.0, horizon));
}

double VasicekModel::mean_short_rate(double t) const {
  return spec_.theta + (spec_.r0 - spec_.theta) * std::exp(-spec_.k * t);
}

double VasicekModel::variance_short_rate(double t) const {
  if (!spec_.sigma || t <= 0.0) return 0.0;
  const LevyModel& m = spec_.model;
  const SpaceTimeFn& sigma = spec_.sigma;
  const double k = spec_.k;
  auto rate = [&](double s) {
    const double v = m.integrate_measure([&](const Vec& x) {
      const double sv = sigma(x, s);
      return sv * sv;
    });
    return std::exp(2.0 * k * (s - t)) * v;
  };
  return integrate(rate, 0.0, t);
}

double VasicekModel::short_rate(const JumpPath& jumps, double t) const {
  const double k = spec_.k;
  double weighted = 0.0;
  if (spec_.sigma)
    for (const auto& e : jumps.events)
      if (e.time <= t)
        weighted += std::exp(k * e.time) * spec_.sigma(e.x, e.time);
  return mean_short_rate(t) -
         std::exp(-k * t) * (weighted - comp_eks_sigma_.between(0.0, t));
}

double VasicekModel::integrated_short_rate(const JumpPath& jumps,
                                           double t) const {
  const double rt = short_rate(jumps, t);
  double plain = 0.0;
  if (spec_.sigma)
    for (const auto& e : jumps.events)
      if (e.time <= t) plain += spec_.sigma(e.x, e.time);
  return spec_.theta * t - (rt - spec_.r0) / spec_.k -
         (plain - comp_sigma_.between(0.0, t)) / spec_.k;
}

ScalarPath VasicekModel::short_rate_path(const JumpPath& jumps,
                                         const TimeGrid& grid) const {
  TimeGrid g = grid.refined_with(jumps.event_times());
  g.validate();
  ScalarPath out;
  out.times = g.times;
  out.values.resize(g.times.size());
  out.left_values.resize(g.times.size());
  const double k = spec_.k;
  double weighted = 0.0;  // sum of e^{k s_i} sigma_i over (0, t]
  std::size_t ev = 0;
  for (std::size_t i = 0; i < g.times.size(); ++i) {
    const double t = g.times[i];
    const double det =
        mean_short_rate(t) + std::exp(-k * t) * comp_eks_sigma_.between(0.0, t);
    out.left_values[i] = det - std::exp(-k * t) * weighted;
    while (ev < jumps.events.size() && jumps.events[ev].time <= t) {
      const auto& e = jumps.events[ev];
      if (spec_.sigma && e.time == t)
        weighted += std::exp(k * e.time) * spec_.sigma(e.x, e.time);
      ++ev;
    }
    out.values[i] = det - std::exp(-k * t) * weighted;
  }
  return out;
}

double VasicekModel::kernel_log(const JumpPath& jumps, double t) const {
  const double rt = short_rate(jumps, t);
  double f_sum = 0.0;
  if (spec_.sigma || spec_.lambda)
    for (const auto& e : jumps.events) {
      if (e.time > t) continue;
      const double sv = spec_.sigma ? spec_.sigma(e.x, e.time) : 0.0;
      const double lv = spec_.lambda ? spec_.lambda(e.x, e.time) : 0.0;
      f_sum += sv / spec_.k - lv;
    }
  return -spec_.theta * t + (rt - spec_.r0) / spec_.k + f_sum -
         comp_f_.between(0.0, t) - comp_gauge_.between(0.0, t);
}

double VasicekModel::bond_price(double r_t, double t, double T) const {
  if (!(T >= t)) throw ConfigError("VasicekModel: bond maturity before t");
  if (T == t) return 1.0;
  const double k = spec_.k;
  double log_p = -(T - t) * spec_.theta +
                 (1.0 - std::exp(k * (t - T))) / k * (spec_.theta - r_t);
  if (spec_.sigma || spec_.lambda) {
    const LevyModel& m = spec_.model;
    const SpaceTimeFn& sigma = spec_.sigma;
    const SpaceTimeFn& lambda = spec_.lambda;
    auto rate = [&](double s) {
      return m.integrate_measure([&](const Vec& x) {
        const double g =
            sigma ? (1.0 - std::exp(k * (s - T))) / k * sigma(x, s) : 0.0;
        const double damp =
            lambda ? std::exp(-lambda(x, s)) : 1.0;
        return std::expm1(g) * damp - g;
      });
    };
    log_p += integrate(rate, t, T);
  }
  return std::exp(log_p);
}

Estimate VasicekModel::bond_price_mc(double r_t, double t, double T,
                                     const McConfig& config) const {
  if (!(T > t)) throw ConfigError("VasicekModel: bond maturity must exceed t");
  const double k = spec_.k, theta = spec_.theta;
  const double span = T - t;
  const double a_sigma = comp_sigma_.between(t, T);
  const double a_eks = comp_eks_sigma_.between(t, T);
  const double a_damp = comp_damp_.between(t, T);
  const TimeGrid* hint = config.grid.times.empty() ? nullptr : &config.grid;
  const LevyModel& m = spec_.model;
  const SpaceTimeFn& sigma = spec_.sigma;
  const SpaceTimeFn& lambda = spec_.lambda;

  return run_paths_scalar(config, [&, hint](const PathRng& rng) {
    JumpPath jumps = m.sample_path(span, rng, hint);
    double weighted = 0.0, plain = 0.0, lam = 0.0;
    for (const auto& e : jumps.events) {
      const double s = t + e.time;  // marks live on the absolute window (t, T]
      if (sigma) {
        const double sv = sigma(e.x, s);
        weighted += std::exp(k * s) * sv;
        plain += sv;
      }
      if (lambda) lam += lambda(e.x, s);
    }
    const double r_T = theta + (r_t - theta) * std::exp(-k * span) -
                       std::exp(-k * T) * (weighted - a_eks);
    const double integral =
        theta * span - (r_T - r_t) / k - (plain - a_sigma) / k;
    return std::exp(-integral - lam - a_damp);
  });
}

void VasicekModel::prime_grid(const TimeGrid& grid) {
  comp_sigma_.prime(grid.times);
  comp_eks_sigma_.prime(grid.times);
  comp_gauge_.prime(grid.times);
  comp_damp_.prime(grid.times);
  comp_f_.prime(grid.times);
}

}  // namespace levyito
