#include "levyito/levy_ito.hpp"

#include <cmath>

#include "levyito/errors.hpp"

namespace levyito {

namespace {

// Stable e^f - 1 - f.
double expm1m(double f) {
  return std::abs(f) < 1e-4 ? f * f * (0.5 + f / 6.0 + f * f / 24.0)
                            : std::expm1(f) - f;
}

Shell event_shell(const Vec& x) {
  return norm2(x) < 1.0 ? Shell::kInner : Shell::kOuter;
}

}  // namespace

BrownianIncrements sample_brownian(const TimeGrid& grid, int dim,
                                   const PathRng& rng) {
  grid.validate();
  BrownianIncrements bm;
  bm.grid = grid;
  bm.dw.resize(grid.cells());
  RandomStream s = rng.stream(Substream::kBrownian);
  for (std::size_t k = 0; k < bm.dw.size(); ++k) {
    const double sd = std::sqrt(grid.times[k + 1] - grid.times[k]);
    Vec v(static_cast<std::size_t>(dim));
    for (auto& c : v) c = sd * s.next_normal();
    bm.dw[k] = std::move(v);
  }
  return bm;
}

CumulativeFunction compile_measure_rate(const LevyModel& model,
                                        const SpaceTimeFn& f, double horizon,
                                        Shell shell) {
  auto rate = [&model, f, shell](double s) {
    return model.integrate_measure([&f, s](const Vec& x) { return f(x, s); },
                                   shell);
  };
  return CumulativeFunction(rate, 0.0, horizon);
}

CompiledLevyIto::CompiledLevyIto(const LevyModel& model,
                                 LevyItoCoefficients coef, double horizon)
    : model_(model), coef_(std::move(coef)) {
  const TimeFn alpha = coef_.alpha;
  const SpaceTimeFn gamma = coef_.gamma;
  const LevyModel m = model_;
  auto rate = [alpha, gamma, m](double s) {
    double a = alpha ? alpha(s) : 0.0;
    if (gamma)
      a -= m.integrate_measure(
          [&gamma, s](const Vec& x) { return gamma(x, s); }, Shell::kInner);
    return a;
  };
  drift_ = PrimedCumulative(CumulativeFunction(rate, 0.0, horizon));
}

double CompiledLevyIto::drift_between(double t0, double t1) const {
  return drift_.between(t0, t1);
}

void CompiledLevyIto::prime_grid(const TimeGrid& grid) {
  drift_.prime(grid.times);
}

ScalarPath CompiledLevyIto::integrate(const JumpPath& jumps,
                                      const TimeGrid& grid,
                                      const BrownianIncrements* bm,
                                      double y0) const {
  TimeGrid g = grid.refined_with(jumps.event_times());
  g.validate();
  if (bm && bm->grid.times != g.times)
    throw GridError("integrate_levy_ito: Brownian grid mismatch");
  ScalarPath path;
  path.times = g.times;
  path.values.resize(g.times.size());
  path.left_values.resize(g.times.size());
  path.values[0] = path.left_values[0] = y0;

  std::size_t ev = 0;
  const auto& events = jumps.events;
  double y = y0;
  for (std::size_t k = 0; k + 1 < g.times.size(); ++k) {
    const double t1 = g.times[k + 1];
    double ynext = y + drift_.between(g.times[k], t1);
    if (bm && coef_.beta) ynext += dot(coef_.beta(g.times[k]), bm->dw[k]);
    path.left_values[k + 1] = ynext;
    while (ev < events.size() && events[ev].time <= t1) {
      if (events[ev].time == t1) {
        const Vec& x = events[ev].x;
        if (event_shell(x) == Shell::kInner) {
          if (coef_.gamma) ynext += coef_.gamma(x, t1);
        } else {
          if (coef_.delta) ynext += coef_.delta(x, t1);
        }
      }
      ++ev;
    }
    path.values[k + 1] = ynext;
    y = ynext;
  }
  return path;
}

ScalarPath integrate_levy_ito(const LevyModel& model,
                              const LevyItoCoefficients& coef,
                              const JumpPath& jumps, const TimeGrid& grid,
                              const BrownianIncrements* bm, double y0) {
  return CompiledLevyIto(model, coef, grid.horizon())
      .integrate(jumps, grid, bm, y0);
}

CompiledExponentialSde::CompiledExponentialSde(const LevyModel& model,
                                               TimeFn mu, SpaceTimeFn Gamma,
                                               SpaceTimeFn Delta,
                                               double horizon)
    : model_(model), gamma_(std::move(Gamma)), delta_(std::move(Delta)) {
  const TimeFn mufn = std::move(mu);
  const SpaceTimeFn gamma = gamma_;
  const LevyModel m = model_;
  auto rate = [mufn, gamma, m](double s) {
    double a = mufn ? mufn(s) : 0.0;
    if (gamma)
      a -= m.integrate_measure(
          [&gamma, s](const Vec& x) { return gamma(x, s); }, Shell::kInner);
    return a;
  };
  drift_ = PrimedCumulative(CumulativeFunction(rate, 0.0, horizon));
}

void CompiledExponentialSde::prime_grid(const TimeGrid& grid) {
  drift_.prime(grid.times);
}

ScalarPath CompiledExponentialSde::solve(const JumpPath& jumps,
                                         const TimeGrid& grid,
                                         double z0) const {
  if (!(z0 > 0.0))
    throw DomainError("solve_exponential_sde: z0 must be positive");
  TimeGrid g = grid.refined_with(jumps.event_times());
  g.validate();
  ScalarPath path;
  path.times = g.times;
  path.values.resize(g.times.size());
  path.left_values.resize(g.times.size());
  path.values[0] = path.left_values[0] = z0;

  std::size_t ev = 0;
  const auto& events = jumps.events;
  double logz = std::log(z0);
  for (std::size_t k = 0; k + 1 < g.times.size(); ++k) {
    const double t1 = g.times[k + 1];
    double lnext = logz + drift_.between(g.times[k], t1);
    path.left_values[k + 1] = std::exp(lnext);
    while (ev < events.size() && events[ev].time <= t1) {
      if (events[ev].time == t1) {
        const Vec& x = events[ev].x;
        const SpaceTimeFn& c =
            event_shell(x) == Shell::kInner ? gamma_ : delta_;
        if (c) {
          const double jump = c(x, t1);
          if (!(1.0 + jump > 0.0))
            throw PositivityError(
                "solve_exponential_sde: jump factor 1 + coefficient <= 0");
          lnext += std::log1p(jump);
        }
      }
      ++ev;
    }
    path.values[k + 1] = std::exp(lnext);
    logz = lnext;
  }
  return path;
}

double CompiledExponentialSde::terminal_log_growth(const JumpPath& jumps,
                                                   double t) const {
  double l = drift_.between(0.0, t);
  for (const auto& e : jumps.events) {
    if (e.time > t) break;
    const SpaceTimeFn& c =
        event_shell(e.x) == Shell::kInner ? gamma_ : delta_;
    if (c) {
      const double jump = c(e.x, e.time);
      if (!(1.0 + jump > 0.0))
        throw PositivityError(
            "solve_exponential_sde: jump factor 1 + coefficient <= 0");
      l += std::log1p(jump);
    }
  }
  return l;
}

ScalarPath solve_exponential_sde(const LevyModel& model, const TimeFn& mu,
                                 const SpaceTimeFn& Gamma,
                                 const SpaceTimeFn& Delta,
                                 const JumpPath& jumps, const TimeGrid& grid,
                                 double z0) {
  return CompiledExponentialSde(model, mu, Gamma, Delta, grid.horizon())
      .solve(jumps, grid, z0);
}

double exponential_formula_rhs(const LevyModel& model, const SpaceTimeFn& f,
                               double t0, double t1) {
  if (!(t1 >= t0))
    throw GridError("exponential_formula_rhs: t1 must be >= t0");
  auto rate = [&](double s) {
    return model.integrate_measure(
        [&f, s](const Vec& x) { return expm1m(f(x, s)); }, Shell::kAll);
  };
  CumulativeFunction c(rate, t0, t1);
  return std::exp(c.total());
}

ExponentialFactor::ExponentialFactor(CumulativeFunction det,
                                     VecTimeFn bm_loading,
                                     SpaceTimeFn jump_exponent)
    : det_(std::move(det)),
      bm_(std::move(bm_loading)),
      jump_(std::move(jump_exponent)) {}

void ExponentialFactor::prime_grid(const TimeGrid& grid) {
  det_.prime(grid.times);
}

ScalarPath ExponentialFactor::simulate(const JumpPath& jumps,
                                       const TimeGrid& grid,
                                       const BrownianIncrements* bm,
                                       double initial) const {
  if (!(initial > 0.0))
    throw ConfigError("ExponentialFactor: initial value must be positive");
  if (bm_ && !bm)
    throw ConfigError("ExponentialFactor: Brownian increments required");
  TimeGrid g = grid.refined_with(jumps.event_times());
  g.validate();
  if (bm && bm->grid.times != g.times)
    throw GridError("ExponentialFactor: Brownian grid mismatch");

  ScalarPath out;
  out.times = g.times;
  out.values.resize(g.times.size());
  out.left_values.resize(g.times.size());
  double logv = std::log(initial);
  out.values[0] = out.left_values[0] = initial;

  std::size_t ev = 0;
  const auto& events = jumps.events;
  for (std::size_t k = 0; k + 1 < g.times.size(); ++k) {
    const double t0 = g.times[k], t1 = g.times[k + 1];
    logv += det_.between(t0, t1);
    if (bm_ && bm) logv += dot(bm_(t0), bm->dw[k]);
    out.left_values[k + 1] = std::exp(logv);
    while (ev < events.size() && events[ev].time <= t1) {
      if (events[ev].time == t1 && jump_)
        logv += jump_(events[ev].x, t1);
      ++ev;
    }
    out.values[k + 1] = std::exp(logv);
  }
  return out;
}

double ExponentialFactor::terminal_log(const JumpPath& jumps, double t,
                                       const BrownianIncrements* bm) const {
  if (bm_ && !bm)
    throw ConfigError("ExponentialFactor: Brownian increments required");
  double logv = det_.between(0.0, t);
  if (jump_)
    for (const auto& e : jumps.events)
      if (e.time <= t) logv += jump_(e.x, e.time);
  if (bm_ && bm) {
    const auto& times = bm->grid.times;
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
      if (times[k + 1] > t * (1.0 + 1e-12) + 1e-15) break;
      logv += dot(bm_(times[k]), bm->dw[k]);
    }
  }
  return logv;
}

ScalarPath apply_ito_transform(const LevyModel& model,
                               const LevyItoCoefficients& coef,
                               const Transform& transform,
                               const JumpPath& jumps, const TimeGrid& grid,
                               const BrownianIncrements* bm, double y0) {
  if (!transform.F || !transform.dF || !transform.d2F)
    throw ConfigError("apply_ito_transform: F, dF, d2F are all required");
  CompiledLevyIto compiled(model, coef, grid.horizon());
  TimeGrid g = grid.refined_with(jumps.event_times());
  g.validate();
  if (bm && bm->grid.times != g.times)
    throw GridError("apply_ito_transform: Brownian grid mismatch");

  // Inter-jump drift rate a(s) = alpha - int_{|x|<1} gamma nu; between events
  // Y follows dY = a(s) ds, so the chain-rule time integral of a(s) F'(Y_s) is
  // evaluated by quadrature with Y_s reconstructed from the compiled drift.
  const LevyModel& m = model;
  auto a_rate = [&](double s) {
    double a = coef.alpha ? coef.alpha(s) : 0.0;
    if (coef.gamma)
      a -= m.integrate_measure(
          [&](const Vec& x) { return coef.gamma(x, s); }, Shell::kInner);
    return a;
  };

  ScalarPath out;
  out.times = g.times;
  out.values.resize(g.times.size());
  out.left_values.resize(g.times.size());
  double y = y0;
  double fy = transform.F(y0);
  out.values[0] = out.left_values[0] = fy;

  std::size_t ev = 0;
  const auto& events = jumps.events;
  for (std::size_t k = 0; k + 1 < g.times.size(); ++k) {
    const double t0 = g.times[k], t1 = g.times[k + 1];
    const double ycell = y;
    auto integrand = [&](double s) {
      const double ys = ycell + compiled.drift_between(t0, s);
      return a_rate(s) * transform.dF(ys);
    };
    double df = integrate(integrand, t0, t1, {1e-13, 1e-11, 4000});
    double yleft = ycell + compiled.drift_between(t0, t1);
    if (bm && coef.beta) {
      const Vec b = coef.beta(t0);
      df += 0.5 * norm2(b) * transform.d2F(ycell) * (t1 - t0) +
            transform.dF(ycell) * dot(b, bm->dw[k]);
      yleft += dot(b, bm->dw[k]);
    }
    fy += df;
    out.left_values[k + 1] = fy;
    double ynext = yleft;
    while (ev < events.size() && events[ev].time <= t1) {
      if (events[ev].time == t1) {
        const Vec& x = events[ev].x;
        const SpaceTimeFn& c =
            event_shell(x) == Shell::kInner ? coef.gamma : coef.delta;
        if (c) {
          const double jump = c(x, t1);
          fy += transform.F(ynext + jump) - transform.F(ynext);
          ynext += jump;
        }
      }
      ++ev;
    }
    out.values[k + 1] = fy;
    y = ynext;
  }
  return out;
}

}  // namespace levyito
