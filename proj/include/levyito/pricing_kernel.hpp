#pragma once

#include "levyito/levy_ito.hpp"

namespace levyito {

// Market price of risk. kappa prices the Brownian directions; lambda prices
// the jump marks, with aversion level Lambda = 1 - e^{-lambda} staying below
// one for any real-valued lambda.
struct RiskAversion {
  VecTimeFn kappa;
  SpaceTimeFn lambda;
};

// Exposure of a limited-liability asset to the same drivers. sigma_brownian
// loads the Brownian motion; sigma loads the marks, with jump size
// Sigma = e^{sigma} - 1 staying above minus one.
struct AssetExposure {
  VecTimeFn sigma_brownian;
  SpaceTimeFn sigma;
};

// Excess rate of return demanded for carrying the exposure at time t:
//   R_t = kappa_t . sigma_B,t + int (1 - e^{-lambda}) (e^{sigma} - 1) nu(dx).
double excess_rate_of_return(const LevyModel& model,
                             const RiskAversion& aversion,
                             const AssetExposure& exposure, double t);

// Pricing kernel
//   pi_t = exp[-int_0^t r ds] prod_i e^{-lambda(x_i, s_i)}
//          exp[-int_0^t int (e^{-lambda} - 1) nu dx ds]
//          exp[-sum kappa . dW - (1/2) int |kappa|^2 ds],
// a supermartingale with E[pi_t B_t] = 1 against the deterministic money
// market account B_t = exp(int r).
class PricingKernel {
 public:
  PricingKernel(const LevyModel& model, TimeFn short_rate,
                RiskAversion aversion, double horizon);

  ScalarPath simulate(const JumpPath& jumps, const TimeGrid& grid,
                      const BrownianIncrements* bm = nullptr) const;
  double terminal_log(const JumpPath& jumps, double t,
                      const BrownianIncrements* bm = nullptr) const;
  void prime_grid(const TimeGrid& grid);

  // int_0^t r_s ds
  double integrated_short_rate(double t) const;
  const LevyModel& model() const { return model_; }
  const RiskAversion& aversion() const { return aversion_; }

 private:
  LevyModel model_;
  RiskAversion aversion_;
  ExponentialFactor factor_;
  PrimedCumulative rate_integral_;
};

// Price process carrying the exposure's risk premium under the kernel above:
//   S_t = s0 exp[int (r + R) ds + sum sigma_B . dW - (1/2) int |sigma_B|^2 ds
//               + sum_i sigma(x_i, s_i) - int int (e^{sigma} - 1) nu dx ds],
// built so that pi_t S_t is a martingale with E[pi_t S_t] = s0.
class AssetPrice {
 public:
  AssetPrice(const LevyModel& model, TimeFn short_rate, RiskAversion aversion,
             AssetExposure exposure, double initial, double horizon);

  ScalarPath simulate(const JumpPath& jumps, const TimeGrid& grid,
                      const BrownianIncrements* bm = nullptr) const;
  double terminal_log(const JumpPath& jumps, double t,
                      const BrownianIncrements* bm = nullptr) const;
  void prime_grid(const TimeGrid& grid);

  double initial() const { return initial_; }
  const AssetExposure& exposure() const { return exposure_; }

 private:
  LevyModel model_;
  AssetExposure exposure_;
  ExponentialFactor factor_;
  double initial_ = 1.0;
};

}  // namespace levyito
