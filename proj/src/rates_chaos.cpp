#include "levyito/rates_chaos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "levyito/errors.hpp"
#include "levyito/vecmath.hpp"

namespace levyito {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Coefficient tails and the direct kernel expansion are compared against each
// other at 1e-8; evaluate them well below that.
constexpr QuadratureOptions kTight{1e-12, 1e-11, 100000};

TimeFn derived_mass(const LevyModel& model, const SpaceTimeFn& f) {
  return [model, f](double s) {
    return model.integrate_measure([&](const Vec& x) { return f(x, s); });
  };
}

TimeFn derived_square(const LevyModel& model, const SpaceTimeFn& f) {
  return [model, f](double s) {
    return model.integrate_measure([&](const Vec& x) {
      const double v = f(x, s);
      return v * v;
    });
  };
}

TimeFn derived_product(const LevyModel& model, const SpaceTimeFn& f,
                       const SpaceTimeFn& g) {
  return [model, f, g](double s) {
    return model.integrate_measure(
        [&](const Vec& x) { return f(x, s) * g(x, s); });
  };
}

}  // namespace

ChaosModel::ChaosModel(ChaosSpec spec, double support_cap)
    : spec_(std::move(spec)), cap_(support_cap) {
  if (!(cap_ > 0.0) || !std::isfinite(cap_))
    throw ConfigError("chaos support cap must be positive and finite");
  if (!spec_.phi || !spec_.beta || !spec_.gamma)
    throw ConfigError("chaos spec needs phi, beta and gamma");
  delta_ = cap_ * 1e-10;

  const ChaosRates& r = spec_.rates;
  a_fn_ = r.a ? r.a : derived_square(spec_.model, spec_.phi);
  b_fn_ = r.b ? r.b : derived_product(spec_.model, spec_.phi, spec_.beta);
  c_fn_ = r.c ? r.c : derived_square(spec_.model, spec_.beta);
  g_fn_ = r.g ? r.g : derived_square(spec_.model, spec_.gamma);
  phi_mass_fn_ = r.phi_mass ? r.phi_mass : derived_mass(spec_.model, spec_.phi);
  beta_mass_fn_ =
      r.beta_mass ? r.beta_mass : derived_mass(spec_.model, spec_.beta);
  gamma_mass_fn_ =
      r.gamma_mass ? r.gamma_mass : derived_mass(spec_.model, spec_.gamma);

  cum_g_ = std::make_shared<const CumulativeFunction>(g_fn_, 0.0, cap_);
  gamma_comp_ =
      std::make_shared<const CumulativeFunction>(gamma_mass_fn_, 0.0, cap_);

  // Path primitives. G and Q are captured by shared pointer so the model
  // stays copyable and movable.
  const auto big_g = [gc = gamma_comp_](double s) { return gc->eval(s); };
  const auto big_q = [cg = cum_g_](double s) { return cg->eval(s); };
  r_ach_ = CumulativeFunction(
      [a = a_fn_, c = c_fn_, big_q](double s) { return a(s) + c(s) * big_q(s); },
      delta_, cap_);
  r_b_ = CumulativeFunction(b_fn_, delta_, cap_);
  r_bG_ = CumulativeFunction(
      [b = b_fn_, big_g](double s) { return b(s) * big_g(s); }, delta_, cap_);
  r_c_ = CumulativeFunction(c_fn_, delta_, cap_);
  r_cG_ = CumulativeFunction(
      [c = c_fn_, big_g](double s) { return c(s) * big_g(s); }, delta_, cap_);
  r_cden_ = CumulativeFunction(
      [c = c_fn_, big_g, big_q](double s) {
        const double g = big_g(s);
        return c(s) * (g * g - big_q(s));
      },
      delta_, cap_);
  r_phim_ = CumulativeFunction(phi_mass_fn_, delta_, cap_);
  r_bm_ = CumulativeFunction(beta_mass_fn_, delta_, cap_);
  r_bmG_ = CumulativeFunction(
      [bm = beta_mass_fn_, big_g](double s) { return bm(s) * big_g(s); },
      delta_, cap_);
}

double ChaosModel::h_any(double s) const {
  if (s <= cap_) return cum_g_->eval(s);
  return cum_g_->total() + integrate(g_fn_, cap_, s, kTight);
}

double ChaosModel::compute_a(double t) const {
  if (t < 0.0) throw ConfigError("coefficient time must be nonnegative");
  return integrate_interval(
      [this](double s) { return a_fn_(s) + c_fn_(s) * h_any(s); }, t, kInf,
      spec_.breakpoints, kTight);
}

double ChaosModel::compute_b(double t) const {
  if (t < 0.0) throw ConfigError("coefficient time must be nonnegative");
  return 2.0 * integrate_interval(b_fn_, t, kInf, spec_.breakpoints, kTight);
}

double ChaosModel::compute_c(double t) const {
  if (t < 0.0) throw ConfigError("coefficient time must be nonnegative");
  return integrate_interval(c_fn_, t, kInf, spec_.breakpoints, kTight);
}

namespace {
// Index of t in a sorted vector, or npos.
std::size_t exact_index(const std::vector<double>& sorted, double t) {
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
  if (it != sorted.end() && *it == t)
    return static_cast<std::size_t>(it - sorted.begin());
  return static_cast<std::size_t>(-1);
}
}  // namespace

double ChaosModel::coefficient_a(double t) const {
  const std::size_t i = exact_index(primed_t_, t);
  return i != static_cast<std::size_t>(-1) ? primed_a_[i] : compute_a(t);
}

double ChaosModel::coefficient_b(double t) const {
  const std::size_t i = exact_index(primed_t_, t);
  return i != static_cast<std::size_t>(-1) ? primed_b_[i] : compute_b(t);
}

double ChaosModel::coefficient_c(double t) const {
  const std::size_t i = exact_index(primed_t_, t);
  if (i != static_cast<std::size_t>(-1) && !std::isnan(primed_c_[i]))
    return primed_c_[i];
  return compute_c(t);
}

double ChaosModel::quadratic_compensator(double t) const {
  const std::size_t i = exact_index(primed_t_, t);
  return i != static_cast<std::size_t>(-1) ? primed_q_[i] : h_any(t);
}

void ChaosModel::prime(const std::vector<double>& times) {
  std::vector<double> t = times;
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  primed_t_.clear();
  primed_a_.clear();
  primed_b_.clear();
  primed_c_.clear();
  primed_q_.clear();
  primed_gcomp_.clear();
  for (double ti : t) {
    primed_t_.push_back(ti);
    primed_a_.push_back(compute_a(ti));
    primed_b_.push_back(compute_b(ti));
    // C may diverge at 0; its multiplier M^2 - Q vanishes there, so prime
    // lazily and let an explicit call surface the divergence.
    primed_c_.push_back(ti > 0.0 ? compute_c(ti)
                                 : std::numeric_limits<double>::quiet_NaN());
    primed_q_.push_back(h_any(ti));
    primed_gcomp_.push_back(gamma_comp_->eval(std::min(ti, cap_)));
  }
}

ChaosModel::State ChaosModel::state(const JumpPath& jumps, double t) const {
  if (!(t >= 0.0)) throw ConfigError("state time must be nonnegative");
  if (t > cap_ * (1.0 + 1e-12))
    throw ConfigError("state time beyond the support cap");
  double sum = 0.0;
  for (const auto& e : jumps.events) {
    if (e.time > t) break;
    sum += spec_.gamma(e.x, e.time);
  }
  const std::size_t i = exact_index(primed_t_, t);
  const double drift = i != static_cast<std::size_t>(-1)
                           ? primed_gcomp_[i]
                           : gamma_comp_->eval(t);
  const double q =
      i != static_cast<std::size_t>(-1) ? primed_q_[i] : cum_g_->eval(t);
  return {sum - drift, q};
}

double ChaosModel::quadratic(double coeff_time, const State& state) const {
  double v = coefficient_a(coeff_time);
  if (state.m != 0.0) v += coefficient_b(coeff_time) * state.m;
  const double mmq = state.m * state.m - state.q;
  if (mmq != 0.0) v += coefficient_c(coeff_time) * mmq;
  return v;
}

double ChaosModel::kernel(double t, const State& state) const {
  return quadratic(t, state);
}

double ChaosModel::kernel_direct(double t, const State& state) const {
  if (t < 0.0) throw ConfigError("kernel time must be nonnegative");
  const double m = state.m;
  const auto outer = [&](double s) {
    return spec_.model.integrate_measure(
        [&](const Vec& x) {
          const double p = spec_.phi(x, s);
          if (m == 0.0) return p * p;
          const double v = p + spec_.beta(x, s) * m;
          return v * v;
        },
        Shell::kAll, kTight);
  };
  const double term1 =
      integrate_interval(outer, t, kInf, spec_.breakpoints, kTight);
  const auto tail = [&](double s) {
    const double cs = spec_.model.integrate_measure(
        [&](const Vec& x) {
          const double v = spec_.beta(x, s);
          return v * v;
        },
        Shell::kAll, kTight);
    return cs * (h_any(s) - state.q);
  };
  const double term2 =
      integrate_interval(tail, t, kInf, spec_.breakpoints, kTight);
  return term1 + term2;
}

double ChaosModel::rate_kernel_product(double t, const State& state) const {
  double v = a_fn_(t);
  if (state.m != 0.0)
    v += 2.0 * b_fn_(t) * state.m + c_fn_(t) * state.m * state.m;
  return v;
}

double ChaosModel::short_rate(double t, const State& state) const {
  const double pi = kernel(t, state);
  if (!(pi > 0.0)) throw PositivityError("chaos pricing kernel not positive");
  return rate_kernel_product(t, state) / pi;
}

double ChaosModel::bond_price(double t, double T, const State& state) const {
  if (T < t) throw ConfigError("bond maturity before valuation time");
  const double denom = quadratic(t, state);
  if (!(denom > 0.0)) throw PositivityError("chaos pricing kernel not positive");
  return quadratic(T, state) / denom;
}

double ChaosModel::segment_rate_kernel(double u, double v, double j) const {
  if (!(v > u)) return 0.0;
  double out = r_ach_.between(u, v) - 2.0 * r_bG_.between(u, v) +
               r_cden_.between(u, v);
  if (j != 0.0)
    out += 2.0 * j * r_b_.between(u, v) + j * j * r_c_.between(u, v) -
           2.0 * j * r_cG_.between(u, v);
  return out;
}

double ChaosModel::floating_leg(const JumpPath& jumps, double t0,
                                double t1) const {
  if (!(t0 >= 0.0) || !(t1 >= t0))
    throw ConfigError("floating leg needs 0 <= t0 <= t1");
  if (t1 > cap_ * (1.0 + 1e-12))
    throw ConfigError("floating leg beyond the support cap");
  const auto& ev = jumps.events;
  double j = 0.0;
  std::size_t i = 0;
  while (i < ev.size() && ev[i].time <= t0) {
    j += spec_.gamma(ev[i].x, ev[i].time);
    ++i;
  }
  double acc = 0.0, seg = t0;
  for (; i < ev.size() && ev[i].time <= t1; ++i) {
    acc += segment_rate_kernel(seg, ev[i].time, j);
    j += spec_.gamma(ev[i].x, ev[i].time);
    seg = ev[i].time;
  }
  acc += segment_rate_kernel(seg, t1, j);
  return acc;
}

double ChaosModel::chaos_variable(const JumpPath& jumps, double u) const {
  if (!(u >= 0.0)) throw ConfigError("chaos variable time must be nonnegative");
  if (u > cap_ * (1.0 + 1e-12))
    throw ConfigError("chaos variable beyond the support cap");
  double j = 0.0, marks = 0.0, comp2 = 0.0, seg = 0.0;
  for (const auto& e : jumps.events) {
    if (e.time > u) break;
    comp2 += j * r_bm_.between(seg, e.time) - r_bmG_.between(seg, e.time);
    const double m_minus = j - gamma_comp_->eval(e.time);
    marks += spec_.phi(e.x, e.time) + spec_.beta(e.x, e.time) * m_minus;
    j += spec_.gamma(e.x, e.time);
    seg = e.time;
  }
  comp2 += j * r_bm_.between(seg, u) - r_bmG_.between(seg, u);
  return marks - r_phim_.eval(u) - comp2;
}

ChaosModel calibrate_chaos_model(const LevyModel& model, const YieldCurve& curve,
                                 SpaceTimeFn gamma, double variance_weight,
                                 double support_cap, TimeFn gamma_sq_rate,
                                 TimeFn gamma_mass_rate) {
  if (!(variance_weight >= 0.0 && variance_weight <= 1.0))
    throw ConfigError("variance weight must lie in [0, 1]");
  if (!gamma) throw ConfigError("calibration needs a state gamma");
  if (!(support_cap > 0.0)) throw ConfigError("support cap must be positive");
  for (double t : curve.tenors())
    if (curve.forward_rate(t) < 0.0)
      throw DataError("calibration needs nonnegative forward rates");
  if (!(curve.forward_rate(curve.max_tenor() + 1.0) > 0.0))
    throw DataError("calibration needs a positive terminal forward rate");

  const double p = variance_weight;
  const double q = 1.0 - variance_weight;
  const double wnorm = model.integrate_measure(
      [](const Vec& x) { return std::min(1.0, norm2(x)); });
  if (!(wnorm > 0.0))
    throw ConfigError("Levy measure carries no quadratic mass");
  const double smass = model.integrate_measure([wnorm](const Vec& x) {
    return std::sqrt(std::min(1.0, norm2(x)) / wnorm);
  });

  TimeFn g_rate =
      gamma_sq_rate ? std::move(gamma_sq_rate) : derived_square(model, gamma);
  const auto hq =
      std::make_shared<const CumulativeFunction>(g_rate, 0.0, support_cap);
  const auto h_at = [hq, g_rate, support_cap](double s) {
    if (s <= support_cap) return hq->eval(s);
    return hq->total() + integrate(g_rate, support_cap, s);
  };
  const auto fp = [curve](double t) {
    return curve.forward_rate(t) * curve.discount(t);
  };

  ChaosSpec spec{model, {}, {}, {}, {}, {}};
  spec.gamma = std::move(gamma);
  spec.phi = [fp, p, wnorm](const Vec& x, double t) {
    return std::sqrt(fp(t) * p * std::min(1.0, norm2(x)) / wnorm);
  };
  spec.beta = [fp, q, wnorm, h_at](const Vec& x, double t) {
    if (q == 0.0) return 0.0;
    return std::sqrt(fp(t) * q * std::min(1.0, norm2(x)) / (wnorm * h_at(t)));
  };
  spec.rates.a = [fp, p](double t) { return p * fp(t); };
  spec.rates.b = [fp, p, q, h_at](double t) {
    if (q == 0.0) return 0.0;
    return std::sqrt(p * q) * fp(t) / std::sqrt(h_at(t));
  };
  spec.rates.c = [fp, q, h_at](double t) {
    if (q == 0.0) return 0.0;
    return q * fp(t) / h_at(t);
  };
  spec.rates.g = g_rate;
  spec.rates.phi_mass = [fp, p, smass](double t) {
    return std::sqrt(p * fp(t)) * smass;
  };
  spec.rates.beta_mass = [fp, q, smass, h_at](double t) {
    if (q == 0.0) return 0.0;
    return std::sqrt(q * fp(t) / h_at(t)) * smass;
  };
  if (gamma_mass_rate) spec.rates.gamma_mass = std::move(gamma_mass_rate);
  spec.breakpoints = curve.tenors();
  return ChaosModel(std::move(spec), support_cap);
}

}  // namespace levyito
