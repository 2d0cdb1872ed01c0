#pragma once

#include <cstdint>
#include <vector>

#include "levyito/levy_ito.hpp"
#include "levyito/pricing_kernel.hpp"

namespace levyito {

// One currency in a multi-currency market: its deterministic short rate and
// the risk aversion carried by its pricing kernel. Null members mean zero.
// A currency with an empty lambda but a nonempty lambda_vector l uses the
// linear jump aversion lambda(x, t) = l . x; the linear form is what enables
// the Levy-exponent route to excess returns.
struct FxCurrency {
  TimeFn short_rate;
  VecTimeFn kappa;
  SpaceTimeFn lambda;
  Vec lambda_vector;
  double kernel_initial = 1.0;
};

struct FxSystemSpec {
  LevyModel model;
  std::vector<FxCurrency> currencies;
};

// System of pricing kernels pi^i, one per currency, all driven by one shared
// Poisson random measure (and optionally one shared Brownian motion). The
// exchange rate F^{ij} = pi^i / pi^j is the price of one unit of currency i
// expressed in units of currency j.
class FxSystem {
 public:
  FxSystem(FxSystemSpec spec, double horizon);

  int size() const { return static_cast<int>(spec_.currencies.size()); }
  double horizon() const { return horizon_; }
  const LevyModel& model() const { return spec_.model; }
  const FxSystemSpec& spec() const { return spec_; }
  const PricingKernel& kernel(int i) const;

  // log pi^i_t along a path, including log pi^i_0.
  double kernel_log(int i, const JumpPath& jumps, double t,
                    const BrownianIncrements* bm = nullptr) const;
  // F^{ij}_0 = pi^i_0 / pi^j_0.
  double initial_exchange(int i, int j) const;
  // log F^{ij}_t computed as the kernel ratio log pi^i_t - log pi^j_t.
  double exchange_log_ratio(int i, int j, const JumpPath& jumps, double t,
                            const BrownianIncrements* bm = nullptr) const;

  // Jump volatility sigma^{ij}(x, t) = lambda^j - lambda^i of F^{ij}.
  double fx_jump_volatility(int i, int j, const Vec& x, double t) const;
  // Brownian volatility kappa^j(t) - kappa^i(t) of F^{ij}.
  Vec fx_brownian_volatility(int i, int j, double t) const;

  // Excess rate of return R^{ij}_t demanded on holdings of currency i by
  // investors accounting in currency j:
  //   R^{ij} = (kappa^j - kappa^i) . kappa^j
  //            + int (e^{sigma^{ij}} - 1)(1 - e^{-lambda^j}) nu(dx),
  // with the jump part evaluated by quadrature against the Levy measure.
  double excess_return(int i, int j, double t) const;
  // Same quantity through the Levy exponent psi, available when both
  // currencies use linear jump aversion:
  //   R^{ij} = (kappa^j - kappa^i) . kappa^j
  //            + psi(l^j - l^i) + psi(-l^j) - psi(-l^i).
  // The combination is invariant under the exponent's centering convention
  // because the linear weights (l^j - l^i), -l^j, +l^i sum to zero.
  double excess_return_exponent(int i, int j, double t) const;

  void prime_grid(const TimeGrid& grid);

 private:
  void check_index(int i) const;
  FxSystemSpec spec_;
  double horizon_ = 0.0;
  std::vector<SpaceTimeFn> lambdas_;  // resolved linear forms
  std::vector<PricingKernel> kernels_;
};

// One exchange rate F^{ij}, compiled for exact pathwise evaluation of
//   F^{ij}_t = F^{ij}_0 exp[int_0^t (r^j - r^i + R^{ij}) ds
//                           + sum sigma_B . dW - (1/2) int |sigma_B|^2 ds
//                           + sum_k sigma^{ij}(x_k, s_k)
//                           - int_0^t int (e^{sigma^{ij}} - 1) nu dx ds].
// The deterministic part is integrated from this display as written (excess
// return by quadrature, convexity correction by a second quadrature), so it
// shares no arithmetic with the kernel-ratio route beyond the Levy measure.
class FxPair {
 public:
  FxPair(const FxSystem& system, int i, int j);

  int foreign() const { return i_; }
  int domestic() const { return j_; }
  double log_initial() const { return log_initial_; }
  // log F^{ij}_t, including log F^{ij}_0.
  double log_exchange(const JumpPath& jumps, double t,
                      const BrownianIncrements* bm = nullptr) const;
  ScalarPath simulate(const JumpPath& jumps, const TimeGrid& grid,
                      const BrownianIncrements* bm = nullptr) const;
  void prime_grid(const TimeGrid& grid);

 private:
  int i_ = 0;
  int j_ = 0;
  double log_initial_ = 0.0;
  ExponentialFactor factor_;
};

// Every ordered pair's excess return at time t; excess[i][j] holds R^{ij}
// for i != j, with zeros on the diagonal. When the kernels carry distinct
// risk aversions, both R^{ij} > 0 and R^{ji} > 0: each side of every
// exchange-rate quote demands a positive premium on the other's currency at
// the same time, so apparent free lunches read off one quoting direction
// cancel against the reciprocal quote.
struct SiegelReport {
  std::vector<std::vector<double>> excess;
  double min_off_diagonal = 0.0;
  bool all_positive = false;
};

SiegelReport siegel_check(const FxSystem& system, double t = 0.0);

// Families of currency systems whose excess returns have closed forms.
enum class SiegelFamily {
  kBrownian,       // kernels carrying Brownian risk only
  kIidCopies,      // independent compound-Poisson copies, one per currency
  kMerton,         // compound Poisson with bivariate Gaussian marks
  kVarianceGamma,  // two-dimensional variance gamma
};

// Randomized instance of the family, deterministic in the seed and built so
// that every off-diagonal excess return is strictly positive.
FxSystemSpec sample_siegel_system(SiegelFamily family, std::uint64_t seed);

}  // namespace levyito
