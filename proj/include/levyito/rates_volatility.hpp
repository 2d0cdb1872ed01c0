#pragma once

#include <map>
#include <utility>

#include "levyito/pricing_kernel.hpp"

namespace levyito {

// Discount bond volatility structure: omega(s, T) loads the Brownian motion
// and Omega(x, s, T) > -1 the marks of the T-maturity bond at time s. Both
// must vanish as s -> T so that the bond pulls to par.
struct VolStructure {
  std::function<Vec(double, double)> omega;
  std::function<double(const Vec&, double, double)> Omega;
};

// Initial discount curve t -> P_{0t}, positive and decreasing with P_{00} = 1.
using DiscountCurveFn = std::function<double(double)>;

// Interest-rate market built from volatility primitives: given the market
// prices of risk, the bond volatility structures and the initial curve, the
// money market account and every discount bond are determined:
//   B_t    = P_{0t}^{-1} exp[-D(t,t) - sum omega_{. t} . dW
//                            - sum log(1 + Omega_{. t})]
//   P_{tT} = (P_{0T}/P_{0t}) exp[D(t,T) - D(t,t)
//                                + sum (omega_{. T} - omega_{. t}) . dW
//                                + sum log((1 + Omega_{. T})/(1 + Omega_{. t}))]
// with the deterministic exponent
//   D(t,T) = int_0^t [kappa_s . omega_{sT} - (1/2)|omega_{sT}|^2] ds
//            - int_0^t int e^{-lambda(x,s)} Omega_{sT}(x) nu(dx) ds.
// The maturity condition makes P_{TT} = 1 hold exactly along every path.
class BondSystem {
 public:
  BondSystem(const LevyModel& model, RiskAversion aversion, VolStructure vol,
             DiscountCurveFn initial_curve);

  // D(t,T) above; cached values are used when present, otherwise computed by
  // quadrature on the spot.
  double deterministic_exponent(double t, double T) const;
  // Cache D(t,T) and D(t,t); call before using (t,T) inside a path loop.
  void prime(double t, double T);

  // log B_t; Brownian cells with right endpoint beyond t are ignored.
  double money_market_log(double t, const JumpPath& jumps,
                          const BrownianIncrements* bm) const;
  // log P_{tT} for t < T (t = T gives zero exactly).
  double bond_log(double t, double T, const JumpPath& jumps,
                  const BrownianIncrements* bm) const;

  const LevyModel& model() const { return model_; }
  const RiskAversion& aversion() const { return aversion_; }

 private:
  double jump_exponent(double s, const Vec& x, double T) const;

  LevyModel model_;
  RiskAversion aversion_;
  VolStructure vol_;
  DiscountCurveFn curve_;
  std::map<std::pair<double, double>, double> primed_;
};

}  // namespace levyito
