#pragma once

#include <functional>

#include "levyito/levy_model.hpp"
#include "levyito/quadrature.hpp"
#include "levyito/scalar_path.hpp"
#include "levyito/time_grid.hpp"

namespace levyito {

using TimeFn = std::function<double(double)>;
using VecTimeFn = std::function<Vec(double)>;
using SpaceTimeFn = std::function<double(const Vec&, double)>;

// Drift, Brownian loading and jump integrands of a scalar Levy-Ito process
//   dY = alpha dt + beta . dW + int_{|x|<1} gamma dN~ + int_{|x|>=1} delta dN.
// All coefficients are deterministic callables; null members mean zero.
struct LevyItoCoefficients {
  TimeFn alpha;
  VecTimeFn beta;
  SpaceTimeFn gamma;
  SpaceTimeFn delta;
};

// Brownian increments on a grid, one vector of dimension dim per cell. Shared
// between processes that must ride the same W.
struct BrownianIncrements {
  TimeGrid grid;
  std::vector<Vec> dw;
};

BrownianIncrements sample_brownian(const TimeGrid& grid, int dim,
                                   const PathRng& rng);

// Compensator rate of a space-time integrand against the model's measure,
// integrated in time: t -> int_0^t int f(x,s) nu(dx) ds, precompiled so that
// per-path work involves no quadrature.
CumulativeFunction compile_measure_rate(const LevyModel& model,
                                        const SpaceTimeFn& f, double horizon,
                                        Shell shell = Shell::kAll);

// Deterministic parts of the integrator, built once and reused across paths.
class CompiledLevyIto {
 public:
  CompiledLevyIto(const LevyModel& model, LevyItoCoefficients coef,
                  double horizon);

  // Path of Y on `grid` refined with the jump times. The Brownian increments,
  // when provided, must live on exactly that refined grid.
  ScalarPath integrate(const JumpPath& jumps, const TimeGrid& grid,
                       const BrownianIncrements* bm = nullptr,
                       double y0 = 0.0) const;

  const LevyItoCoefficients& coefficients() const { return coef_; }
  const LevyModel& model() const { return model_; }
  double drift_between(double t0, double t1) const;
  // Cache cumulative drift at the grid times; call once before a path loop.
  void prime_grid(const TimeGrid& grid);

 private:
  LevyModel model_;
  LevyItoCoefficients coef_;
  PrimedCumulative drift_;  // int alpha - int int_{|x|<1} gamma nu
};

ScalarPath integrate_levy_ito(const LevyModel& model,
                              const LevyItoCoefficients& coef,
                              const JumpPath& jumps, const TimeGrid& grid,
                              const BrownianIncrements* bm = nullptr,
                              double y0 = 0.0);

// Exact pathwise solution of dZ = Z^- [mu dt + int Gamma dN~ + int Delta dN]
// (inner-shell Gamma compensated, outer-shell Delta raw). Jumps multiply Z by
// (1 + coefficient), which must stay positive.
class CompiledExponentialSde {
 public:
  CompiledExponentialSde(const LevyModel& model, TimeFn mu, SpaceTimeFn Gamma,
                         SpaceTimeFn Delta, double horizon);
  ScalarPath solve(const JumpPath& jumps, const TimeGrid& grid,
                   double z0 = 1.0) const;
  // log Z_t - log z0 for the terminal time only.
  double terminal_log_growth(const JumpPath& jumps, double t) const;
  void prime_grid(const TimeGrid& grid);

 private:
  LevyModel model_;
  SpaceTimeFn gamma_, delta_;
  PrimedCumulative drift_;  // int mu - int int_{|x|<1} Gamma nu
};

ScalarPath solve_exponential_sde(const LevyModel& model, const TimeFn& mu,
                                 const SpaceTimeFn& Gamma,
                                 const SpaceTimeFn& Delta,
                                 const JumpPath& jumps, const TimeGrid& grid,
                                 double z0 = 1.0);

// exp[ int_{t0}^{t1} int (e^{f(x,s)} - 1 - f(x,s)) nu(dx) ds ], the
// deterministic value of E exp(int int f dN~) over the window.
double exponential_formula_rhs(const LevyModel& model, const SpaceTimeFn& f,
                               double t0, double t1);

// Multiplicative functional
//   V_t = v0 exp[ D(t) + sum_k b(t_k) . dW_k + sum_i j(x_i, s_i) ]
// with a deterministic cumulative exponent D, a left-point Brownian loading b
// and a per-mark exponent j summed over every shell. Compensator terms, Ito
// corrections and the like belong inside D; this class only assembles the
// exponent along a path.
class ExponentialFactor {
 public:
  ExponentialFactor() = default;
  ExponentialFactor(CumulativeFunction det, VecTimeFn bm_loading,
                    SpaceTimeFn jump_exponent);

  void prime_grid(const TimeGrid& grid);
  ScalarPath simulate(const JumpPath& jumps, const TimeGrid& grid,
                      const BrownianIncrements* bm = nullptr,
                      double initial = 1.0) const;
  // log V_t - log v0 over (0, t]. When Brownian increments are supplied, t
  // must be one of their grid times; cells beyond it are ignored.
  double terminal_log(const JumpPath& jumps, double t,
                      const BrownianIncrements* bm = nullptr) const;

 private:
  PrimedCumulative det_;
  VecTimeFn bm_;
  SpaceTimeFn jump_;
};

struct Transform {
  std::function<double(double)> F;
  std::function<double(double)> dF;
  std::function<double(double)> d2F;
};

// Path of F(Y) assembled term by term from the jump-diffusion chain rule:
// drift and second-order Brownian terms plus the inner-shell compensator
// correction integrated in time, compensated inner jumps, raw outer jumps.
// With beta = 0 every term is evaluated to quadrature accuracy, so the output
// matches F applied to the state path at that accuracy; with beta != 0 the
// Brownian terms use a left-point rule of weak order one.
ScalarPath apply_ito_transform(const LevyModel& model,
                               const LevyItoCoefficients& coef,
                               const Transform& transform,
                               const JumpPath& jumps, const TimeGrid& grid,
                               const BrownianIncrements* bm = nullptr,
                               double y0 = 0.0);

}  // namespace levyito
