#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "levyito/jump_path.hpp"
#include "levyito/levy_ito.hpp"
#include "levyito/levy_model.hpp"
#include "levyito/quadrature.hpp"
#include "levyito/yield_curve.hpp"

namespace levyito {

// x-integrated building blocks of a second-order chaos model. Members left
// empty are derived from the x-level functions by quadrature against nu;
// supplying closed forms avoids nested quadrature in hot loops.
struct ChaosRates {
  TimeFn a;           // int phi_s(x)^2        nu(dx)
  TimeFn b;           // int phi_s(x)beta_s(x) nu(dx)
  TimeFn c;           // int beta_s(x)^2       nu(dx)
  TimeFn g;           // int gamma_s(x)^2      nu(dx)
  TimeFn phi_mass;    // int phi_s(x)          nu(dx)
  TimeFn beta_mass;   // int beta_s(x)         nu(dx)
  TimeFn gamma_mass;  // int gamma_s(x)        nu(dx)
};

// Structure functions of the square-integrable variable
//   X = int_0^inf int phi dN~ + int_0^inf int beta_s(x) M_{s-} dN~(ds, dx),
// whose conditional variance is the pricing kernel. M is the first-order
// state martingale M_t = int_0^t int gamma dN~.
struct ChaosSpec {
  LevyModel model;
  SpaceTimeFn phi;
  SpaceTimeFn beta;
  SpaceTimeFn gamma;
  ChaosRates rates;                 // optional closed forms
  std::vector<double> breakpoints;  // deterministic kink times for quadrature
};

// Second-order chaos short-rate model with pricing kernel
//   pi_t = A_t + B_t M_t + C_t (M_t^2 - Q_t),
//   A_t = int_t^inf (a_s + c_s Q_s) ds,  B_t = 2 int_t^inf b_s ds,
//   C_t = int_t^inf c_s ds,              Q_t = int_0^t g_s ds,
// so that discount bonds are ratios of quadratics in the state:
//   P(t, T) = (A_T + B_T M_t + C_T (M_t^2 - Q_t)) / pi_t.
class ChaosModel {
 public:
  // `support_cap` bounds the window where path functionals (state, floating
  // leg, chaos variable) operate; the coefficient tails always integrate to
  // infinity. Path primitives are anchored just above zero so specs whose
  // c-rate blows up like 1/s at the origin (calibrated curves with constant
  // variance weight) stay integrable term by term.
  ChaosModel(ChaosSpec spec, double support_cap);

  // Instantaneous x-integrated rates.
  double a_rate(double s) const { return a_fn_(s); }
  double b_rate(double s) const { return b_fn_(s); }
  double c_rate(double s) const { return c_fn_(s); }
  double g_rate(double s) const { return g_fn_(s); }

  // Deterministic coefficients. coefficient_c(0) may legitimately diverge
  // (QuadratureError) for calibrated specs; it is never needed there because
  // its multiplier M_0^2 - Q_0 vanishes identically.
  double coefficient_a(double t) const;
  double coefficient_b(double t) const;
  double coefficient_c(double t) const;
  double quadratic_compensator(double t) const;  // Q_t

  struct State {
    double m = 0.0;  // M_t
    double q = 0.0;  // Q_t
  };
  State state(const JumpPath& jumps, double t) const;

  // pi evaluated with coefficients at `t` and the given state.
  double kernel(double t, const State& state) const;
  // Same value through the un-collapsed expansion
  //   pi_t = int_t^inf int (phi_s(x) + beta_s(x) M_t)^2 nu ds
  //        + int_t^inf c_s (Q_s - Q_t) ds,
  // evaluated by nested quadrature without the A/B/C decomposition.
  double kernel_direct(double t, const State& state) const;

  double rate_kernel_product(double t, const State& state) const;  // r_t pi_t
  double short_rate(double t, const State& state) const;
  double bond_price(double t, double T, const State& state) const;

  // Exact pathwise int_{t0}^{t1} r_s pi_s ds (piecewise-quadratic in the
  // state between events, integrated against prebuilt primitives).
  double floating_leg(const JumpPath& jumps, double t0, double t1) const;

  // X_u: both chaos integrals truncated to outer times <= u. X_u is the
  // conditional expectation at u of the full variable, so
  // E[(X_cap - X_t)^2 + pi_cap | F_t] = pi_t for any t <= cap.
  double chaos_variable(const JumpPath& jumps, double u) const;

  // Cache A, B, C, Q and the state compensators at the given times so path
  // loops resolve them by binary search (thread-safe once primed).
  void prime(const std::vector<double>& times);

  const LevyModel& model() const { return spec_.model; }
  const ChaosSpec& spec() const { return spec_; }
  double support_cap() const { return cap_; }

 private:
  double h_any(double s) const;  // Q_s for any s, including beyond the cap
  double compute_a(double t) const;
  double compute_b(double t) const;
  double compute_c(double t) const;
  double quadratic(double coeff_time, const State& state) const;
  double segment_rate_kernel(double u, double v, double j) const;

  ChaosSpec spec_;
  double cap_ = 0.0;
  double delta_ = 0.0;
  TimeFn a_fn_, b_fn_, c_fn_, g_fn_, phi_mass_fn_, beta_mass_fn_, gamma_mass_fn_;
  std::shared_ptr<const CumulativeFunction> cum_g_;       // Q on [0, cap]
  std::shared_ptr<const CumulativeFunction> gamma_comp_;  // int gamma_mass, drift of M
  // Path primitives on [delta, cap].
  CumulativeFunction r_ach_;   // int (a + c Q)
  CumulativeFunction r_b_;     // int b
  CumulativeFunction r_bG_;    // int b G          (G = int_0^s gamma_mass)
  CumulativeFunction r_c_;     // int c
  CumulativeFunction r_cG_;    // int c G
  CumulativeFunction r_cden_;  // int c (G^2 - Q)
  CumulativeFunction r_phim_;  // int phi_mass
  CumulativeFunction r_bm_;    // int beta_mass
  CumulativeFunction r_bmG_;   // int beta_mass G
  // Primed coefficient caches (sorted by time; c may hold NaN at t = 0).
  std::vector<double> primed_t_, primed_a_, primed_b_, primed_c_, primed_q_,
      primed_gcomp_;
};

// Builds the chaos spec that reproduces `curve` exactly:
//   phi_t(x)^2 = f(t) P(0,t) p w(x),   beta_t(x)^2 = f(t) P(0,t) q w(x) / Q_t,
// with w(x) = (1 ^ |x|^2) / int (1 ^ |x|^2) nu, p = variance_weight in [0, 1],
// q = 1 - p, and Q from the supplied gamma. The curve then satisfies
// A_t = P(0, t) with A_0 = 1. Optional closed forms for int gamma^2 nu and
// int gamma nu skip per-evaluation quadrature. Throws DataError when the
// curve has a negative forward or a non-positive terminal forward.
ChaosModel calibrate_chaos_model(const LevyModel& model, const YieldCurve& curve,
                                 SpaceTimeFn gamma, double variance_weight,
                                 double support_cap, TimeFn gamma_sq_rate = {},
                                 TimeFn gamma_mass_rate = {});

}  // namespace levyito
