#include <cmath>
#include <vector>

#include "doctest.h"
#include "levyito/errors.hpp"
#include "levyito/mc_engine.hpp"
#include "levyito/pricing_kernel.hpp"

using namespace levyito;

namespace {

LevyModel no_jumps() {
  return LevyModel::compound_poisson(0.0, JumpLaw::atoms({{{1.0}, 1.0}}));
}

}  // namespace

TEST_CASE("kernel without risk aversion discounts at the short rate") {
  auto r = [](double t) { return 0.03 + 0.01 * t; };
  PricingKernel kernel(no_jumps(), r, {}, 2.0);
  TimeGrid grid = TimeGrid::uniform(2.0, 4);
  JumpPath jumps{2.0, {}, 0.0};
  ScalarPath pi = kernel.simulate(jumps, grid);
  for (std::size_t k = 0; k < pi.times.size(); ++k) {
    const double t = pi.times[k];
    const double integral = 0.03 * t + 0.005 * t * t;
    CHECK(pi.values[k] == doctest::Approx(std::exp(-integral)).epsilon(1e-10));
    CHECK(kernel.integrated_short_rate(t) ==
          doctest::Approx(integral).epsilon(1e-10));
  }
}

TEST_CASE("constant jump aversion scales the kernel by e^{-lambda} per mark") {
  // nu = delta_1 with intensity 1 and lambda = ln 2: each mark halves pi and
  // the compensator contributes exp(+t/2).
  LevyModel model =
      LevyModel::compound_poisson(1.0, JumpLaw::atoms({{{1.0}, 1.0}}));
  RiskAversion aversion;
  aversion.lambda = [](const Vec&, double) { return std::log(2.0); };
  PricingKernel kernel(model, nullptr, aversion, 1.0);
  TimeGrid grid = TimeGrid::uniform(1.0, 5);
  JumpPath jumps{1.0, {{0.6, {1.0}}}, 0.0};
  ScalarPath pi = kernel.simulate(jumps, grid);
  CHECK(pi.value_at(0.4) == doctest::Approx(std::exp(0.2)).epsilon(1e-10));
  CHECK(pi.terminal() == doctest::Approx(0.5 * std::exp(0.5)).epsilon(1e-10));
}

TEST_CASE("deflated gauge rho = pi exp(int r) has unit mean") {
  SUBCASE("gaussian jumps with brownian and jump aversion") {
    LevyModel model =
        LevyModel::compound_poisson(1.5, JumpLaw::gaussian1d(-0.08, 0.25));
    RiskAversion aversion;
    aversion.kappa = [](double) { return Vec{0.3, -0.2}; };
    aversion.lambda = [](const Vec& x, double) { return 0.6 * x[0]; };
    const double horizon = 1.0;
    PricingKernel kernel(model, [](double) { return 0.02; }, aversion, horizon);
    TimeGrid grid = TimeGrid::uniform(horizon, 4);
    kernel.prime_grid(grid);

    McConfig mc;
    mc.master_seed = 31;
    mc.n_paths = 30000;
    auto est = run_paths(mc, 2, [&](const PathRng& rng, std::vector<double>& out) {
      JumpPath jumps = model.sample_path(horizon, rng);
      TimeGrid g = grid.refined_with(jumps.event_times());
      BrownianIncrements bm = sample_brownian(g, 2, rng);
      ScalarPath pi = kernel.simulate(jumps, grid, &bm);
      out[0] = pi.value_at(0.5) * std::exp(kernel.integrated_short_rate(0.5));
      out[1] = pi.terminal() * std::exp(kernel.integrated_short_rate(horizon));
    });
    CHECK(est[0].within(1.0));
    CHECK(est[1].within(1.0));
  }

  SUBCASE("variance gamma jumps with linear aversion") {
    LevyModel model = LevyModel::variance_gamma(1.5);
    RiskAversion aversion;
    aversion.lambda = [](const Vec& x, double) { return 0.4 * x[0]; };
    const double horizon = 1.0;
    PricingKernel kernel(model, [](double) { return 0.01; }, aversion, horizon);
    TimeGrid grid = TimeGrid::uniform(horizon, 4);
    kernel.prime_grid(grid);

    McConfig mc;
    mc.master_seed = 32;
    mc.n_paths = 15000;
    Estimate est = run_paths_scalar(mc, [&](const PathRng& rng) {
      JumpPath jumps = model.sample_path(horizon, rng);
      return std::exp(kernel.terminal_log(jumps, horizon) +
                      kernel.integrated_short_rate(horizon));
    });
    CHECK(est.within(1.0));
  }
}

TEST_CASE("excess rate of return on an atomic measure") {
  // nu = 2 delta_{-1/2}; Lambda = 1/2, Sigma = -1/5, kappa . sigma_B = 0.02.
  LevyModel model =
      LevyModel::compound_poisson(2.0, JumpLaw::atoms({{{-0.5}, 1.0}}));
  RiskAversion aversion;
  aversion.kappa = [](double) { return Vec{0.1, 0.3}; };
  aversion.lambda = [](const Vec&, double) { return std::log(2.0); };
  AssetExposure exposure;
  exposure.sigma_brownian = [](double) { return Vec{0.5, -0.1}; };
  exposure.sigma = [](const Vec&, double) { return std::log(0.8); };
  CHECK(excess_rate_of_return(model, aversion, exposure, 0.7) ==
        doctest::Approx(0.02 - 0.2).epsilon(1e-12));

  CHECK(excess_rate_of_return(model, {}, exposure, 0.0) == 0.0);
  CHECK(excess_rate_of_return(model, aversion, {}, 0.0) == 0.0);
}

TEST_CASE("asset with no exposure is the money market account") {
  auto r = [](double t) { return 0.04 - 0.01 * t; };
  RiskAversion aversion;
  aversion.kappa = [](double) { return Vec{0.3}; };
  AssetPrice asset(no_jumps(), r, aversion, {}, 100.0, 2.0);
  TimeGrid grid = TimeGrid::uniform(2.0, 4);
  JumpPath jumps{2.0, {}, 0.0};
  ScalarPath s = asset.simulate(jumps, grid);
  for (std::size_t k = 0; k < s.times.size(); ++k) {
    const double t = s.times[k];
    CHECK(s.values[k] ==
          doctest::Approx(100.0 * std::exp(0.04 * t - 0.005 * t * t))
              .epsilon(1e-10));
  }
}

TEST_CASE("deflated asset is a martingale and earns its risk premium") {
  LevyModel model =
      LevyModel::compound_poisson(2.0, JumpLaw::gaussian1d(0.05, 0.3));
  auto r = [](double) { return 0.03; };
  RiskAversion aversion;
  aversion.kappa = [](double) { return Vec{0.25}; };
  aversion.lambda = [](const Vec& x, double) { return 0.5 * x[0]; };
  AssetExposure exposure;
  exposure.sigma_brownian = [](double) { return Vec{0.4}; };
  exposure.sigma = [](const Vec& x, double) { return 0.8 * x[0]; };

  const double horizon = 1.0, s0 = 50.0;
  PricingKernel kernel(model, r, aversion, horizon);
  AssetPrice asset(model, r, aversion, exposure, s0, horizon);
  TimeGrid grid = TimeGrid::uniform(horizon, 4);
  kernel.prime_grid(grid);
  asset.prime_grid(grid);

  const double big_r = excess_rate_of_return(model, aversion, exposure, 0.0);
  const double mean_log_growth =
      (0.03 + big_r) * horizon - 0.5 * 0.16 * horizon +
      horizon * model.integrate_measure([&](const Vec& x) {
        return 0.8 * x[0] - std::expm1(0.8 * x[0]);
      });

  McConfig mc;
  mc.master_seed = 77;
  mc.n_paths = 30000;
  auto est = run_paths(mc, 2, [&](const PathRng& rng, std::vector<double>& out) {
    JumpPath jumps = model.sample_path(horizon, rng);
    TimeGrid g = grid.refined_with(jumps.event_times());
    BrownianIncrements bm = sample_brownian(g, 1, rng);
    const double log_pi = kernel.terminal_log(jumps, horizon, &bm);
    const double log_s = asset.terminal_log(jumps, horizon, &bm);
    out[0] = std::exp(log_pi + log_s);
    out[1] = log_s;
  });
  CHECK(est[0].within(s0));
  CHECK(est[1].within(std::log(s0) + mean_log_growth));
}

TEST_CASE("brownian aversion without increments is rejected") {
  RiskAversion aversion;
  aversion.kappa = [](double) { return Vec{0.3}; };
  PricingKernel kernel(no_jumps(), nullptr, aversion, 1.0);
  JumpPath jumps{1.0, {}, 0.0};
  CHECK_THROWS_AS(kernel.simulate(jumps, TimeGrid::uniform(1.0, 2)),
                  ConfigError);
}
