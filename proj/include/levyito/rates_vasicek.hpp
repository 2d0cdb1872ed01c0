#pragma once

#include "levyito/levy_ito.hpp"
#include "levyito/mc_engine.hpp"

namespace levyito {

// Mean-reverting short-rate model driven by a compensated Poisson random
// measure:
//   dr = k (theta - r) dt - int sigma(x, t) N~(dx, dt),
// with deterministic jump volatility sigma and jump risk aversion lambda, so
// that the pricing kernel is pi_t = exp(-int_0^t r ds) M_t with
//   M_t = exp[-int int lambda dN~ - int int (e^{-lambda} - 1 + lambda) nu ds].
struct VasicekSpec {
  LevyModel model;
  double k = 0.0;      // mean reversion rate, > 0
  double theta = 0.0;  // mean reversion level
  double r0 = 0.0;     // initial short rate
  SpaceTimeFn sigma;   // jump volatility; null gives the classical limit
  SpaceTimeFn lambda;  // jump risk aversion; null means risk neutrality
};

class VasicekModel {
 public:
  // horizon bounds every time argument accepted below.
  VasicekModel(VasicekSpec spec, double horizon);

  double mean_short_rate(double t) const;
  // Var r_t = int_0^t int e^{2k(s-t)} sigma^2 nu dx ds
  double variance_short_rate(double t) const;

  // Pathwise state given the marks on (0, t]:
  //   r_t = theta + (r0 - theta) e^{-kt} - e^{-kt} [sum e^{k s_i} sigma_i - U_t]
  //   I_t = theta t - (r_t - r0)/k - (sum sigma_i - V_t)/k
  // with U, V the matching compensator integrals; both are exact given the
  // jump path.
  double short_rate(const JumpPath& jumps, double t) const;
  double integrated_short_rate(const JumpPath& jumps, double t) const;
  ScalarPath short_rate_path(const JumpPath& jumps, const TimeGrid& grid) const;
  // log pi_t, combining the integrated short rate with the aversion gauge.
  double kernel_log(const JumpPath& jumps, double t) const;

  // Closed-form bond price from state r_t at time t:
  //   log P = -(T-t) theta + (1/k)(1 - e^{k(t-T)})(theta - r_t)
  //           + int_t^T int [(e^{g} - 1) e^{-lambda} - g] nu dx ds,
  //   g(x,s) = (1/k)(1 - e^{k(s-T)}) sigma(x,s).
  double bond_price(double r_t, double t, double T) const;

  // Independent oracle: P = E[exp(-int_t^T r ds) M_T / M_t] by simulation of
  // the marks on (t, T] starting from r_t. config.grid, when nonempty, is the
  // subordination hint on [0, T - t].
  Estimate bond_price_mc(double r_t, double t, double T,
                         const McConfig& config) const;

  void prime_grid(const TimeGrid& grid);
  const LevyModel& model() const { return spec_.model; }
  double horizon() const { return horizon_; }

 private:
  VasicekSpec spec_;
  double horizon_ = 0.0;
  PrimedCumulative comp_sigma_;      // int int sigma nu ds
  PrimedCumulative comp_eks_sigma_;  // int int e^{ks} sigma nu ds
  PrimedCumulative comp_gauge_;      // int int (e^{-lambda} - 1 + lambda) nu ds
  PrimedCumulative comp_damp_;       // int int (e^{-lambda} - 1) nu ds
  PrimedCumulative comp_f_;          // int int ((1/k) sigma - lambda) nu ds
};

}  // namespace levyito
