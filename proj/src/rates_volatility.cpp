#include "levyito/rates_volatility.hpp"

#include <cmath>

#include "levyito/errors.hpp"

namespace levyito {

BondSystem::BondSystem(const LevyModel& model, RiskAversion aversion,
                       VolStructure vol, DiscountCurveFn initial_curve)
    : model_(model),
      aversion_(std::move(aversion)),
      vol_(std::move(vol)),
      curve_(std::move(initial_curve)) {
  if (!curve_) throw ConfigError("BondSystem: initial curve is required");
}

double BondSystem::deterministic_exponent(double t, double T) const {
  if (t <= 0.0) return 0.0;
  auto it = primed_.find({t, T});
  if (it != primed_.end()) return it->second;

  const auto& omega = vol_.omega;
  const auto& Omega = vol_.Omega;
  const auto& kappa = aversion_.kappa;
  const auto& lambda = aversion_.lambda;
  const LevyModel& m = model_;
  auto rate = [&](double s) {
    double d = 0.0;
    if (omega) {
      const Vec w = omega(s, T);
      if (kappa) d += dot(kappa(s), w);
      d -= 0.5 * norm2(w);
    }
    if (Omega)
      d -= m.integrate_measure([&](const Vec& x) {
        const double damp = lambda ? std::exp(-lambda(x, s)) : 1.0;
        return damp * Omega(x, s, T);
      });
    return d;
  };
  return integrate(rate, 0.0, t);
}

void BondSystem::prime(double t, double T) {
  primed_[{t, T}] = deterministic_exponent(t, T);
  primed_[{t, t}] = deterministic_exponent(t, t);
}

double BondSystem::jump_exponent(double s, const Vec& x, double T) const {
  const double o = vol_.Omega(x, s, T);
  if (!(1.0 + o > 0.0))
    throw PositivityError("BondSystem: jump volatility 1 + Omega <= 0");
  return std::log1p(o);
}

double BondSystem::money_market_log(double t, const JumpPath& jumps,
                                    const BrownianIncrements* bm) const {
  if (vol_.omega && !bm)
    throw ConfigError("BondSystem: Brownian increments required");
  const double p0t = curve_(t);
  if (!(p0t > 0.0)) throw DataError("BondSystem: initial curve must be positive");
  double l = -std::log(p0t) - deterministic_exponent(t, t);
  if (vol_.omega && bm) {
    const auto& times = bm->grid.times;
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
      if (times[k + 1] > t * (1.0 + 1e-12) + 1e-15) break;
      l -= dot(vol_.omega(times[k], t), bm->dw[k]);
    }
  }
  if (vol_.Omega)
    for (const auto& e : jumps.events)
      if (e.time <= t) l -= jump_exponent(e.time, e.x, t);
  return l;
}

double BondSystem::bond_log(double t, double T, const JumpPath& jumps,
                            const BrownianIncrements* bm) const {
  if (!(T >= t)) throw ConfigError("BondSystem: bond maturity before t");
  if (vol_.omega && !bm)
    throw ConfigError("BondSystem: Brownian increments required");
  const double p0t = curve_(t), p0T = curve_(T);
  if (!(p0t > 0.0) || !(p0T > 0.0))
    throw DataError("BondSystem: initial curve must be positive");
  double l = std::log(p0T) - std::log(p0t) + deterministic_exponent(t, T) -
             deterministic_exponent(t, t);
  if (vol_.omega && bm) {
    const auto& times = bm->grid.times;
    for (std::size_t k = 0; k + 1 < times.size(); ++k) {
      if (times[k + 1] > t * (1.0 + 1e-12) + 1e-15) break;
      l += dot(sub(vol_.omega(times[k], T), vol_.omega(times[k], t)),
               bm->dw[k]);
    }
  }
  if (vol_.Omega)
    for (const auto& e : jumps.events)
      if (e.time <= t)
        l += jump_exponent(e.time, e.x, T) - jump_exponent(e.time, e.x, t);
  return l;
}

}  // namespace levyito
