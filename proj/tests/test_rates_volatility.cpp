#include <cmath>
#include <vector>

#include "doctest.h"
#include "levyito/errors.hpp"
#include "levyito/mc_engine.hpp"
#include "levyito/rates_volatility.hpp"

using namespace levyito;

namespace {

// Vasicek-shaped structures: both vanish as s -> T.
VolStructure example_vol() {
  VolStructure vol;
  vol.omega = [](double s, double T) {
    return Vec{0.02 * (1.0 - std::exp(-(T - s)))};
  };
  vol.Omega = [](const Vec& x, double s, double T) {
    return std::expm1(0.3 * x[0] * (1.0 - std::exp(-(T - s))));
  };
  return vol;
}

DiscountCurveFn flat_curve(double r) {
  return [r](double t) { return std::exp(-r * t); };
}

}  // namespace

TEST_CASE("zero volatility collapses to the initial curve") {
  LevyModel model =
      LevyModel::compound_poisson(2.0, JumpLaw::atoms({{{0.5}, 1.0}}));
  RiskAversion aversion;
  aversion.lambda = [](const Vec& x, double) { return 0.4 * x[0]; };
  BondSystem system(model, aversion, {}, flat_curve(0.03));

  JumpPath jumps{2.0, {{0.3, {0.5}}, {1.1, {0.5}}}, 0.0};
  CHECK(system.money_market_log(1.5, jumps, nullptr) ==
        doctest::Approx(0.03 * 1.5).epsilon(1e-12));
  CHECK(system.bond_log(0.5, 2.0, jumps, nullptr) ==
        doctest::Approx(-0.03 * 1.5).epsilon(1e-12));
}

TEST_CASE("time zero recovers the initial curve and par is exact") {
  LevyModel model =
      LevyModel::compound_poisson(1.0, JumpLaw::gaussian1d(0.0, 0.4));
  RiskAversion aversion;
  aversion.kappa = [](double) { return Vec{0.2}; };
  aversion.lambda = [](const Vec& x, double) { return 0.5 * x[0]; };
  BondSystem system(model, aversion, example_vol(), flat_curve(0.02));

  JumpPath jumps{2.0, {{0.4, {0.7}}, {1.3, {-0.2}}}, 0.0};
  TimeGrid g = TimeGrid::uniform(2.0, 8).refined_with(jumps.event_times());
  BrownianIncrements bm = sample_brownian(g, 1, PathRng{5, 0});

  CHECK(system.bond_log(0.0, 1.7, jumps, &bm) ==
        doctest::Approx(-0.02 * 1.7).epsilon(1e-12));
  // Pull to par holds pathwise, not just in expectation.
  CHECK(system.bond_log(1.5, 1.5, jumps, &bm) == 0.0);
  CHECK(std::exp(system.bond_log(1.5, 1.5, jumps, &bm)) == 1.0);
}

TEST_CASE("money market account starts at one") {
  LevyModel model =
      LevyModel::compound_poisson(1.0, JumpLaw::gaussian1d(0.0, 0.4));
  BondSystem system(model, {}, example_vol(), flat_curve(0.02));
  JumpPath jumps{1.0, {}, 0.0};
  TimeGrid g = TimeGrid::uniform(1.0, 4);
  BrownianIncrements bm = sample_brownian(g, 1, PathRng{6, 0});
  CHECK(system.money_market_log(0.0, jumps, &bm) == doctest::Approx(0.0));
}

TEST_CASE("kernel times bond is a martingale priced off the curve") {
  // pi_t = rho_t / B_t with rho the unit-mean gauge carrying the same kappa
  // and lambda, so E[pi_t] = P_{0t} and E[pi_t P_{tT}] = P_{0T}.
  LevyModel model =
      LevyModel::compound_poisson(1.5, JumpLaw::gaussian1d(-0.05, 0.35));
  RiskAversion aversion;
  aversion.kappa = [](double) { return Vec{0.25}; };
  aversion.lambda = [](const Vec& x, double) { return 0.5 * x[0]; };
  VolStructure vol = example_vol();
  DiscountCurveFn curve = [](double t) {
    return std::exp(-0.02 * t - 0.001 * t * t);
  };
  BondSystem system(model, aversion, vol, curve);

  const double t = 0.5, T = 1.0, horizon = 1.0;
  system.prime(t, T);
  PricingKernel gauge(model, nullptr, aversion, horizon);
  TimeGrid grid = TimeGrid::uniform(horizon, 8);
  gauge.prime_grid(grid);

  McConfig mc;
  mc.master_seed = 404;
  mc.n_paths = 40000;
  auto est = run_paths(mc, 2, [&](const PathRng& rng, std::vector<double>& out) {
    JumpPath jumps = model.sample_path(horizon, rng);
    TimeGrid g = grid.refined_with(jumps.event_times());
    BrownianIncrements bm = sample_brownian(g, 1, rng);
    const double log_rho = gauge.terminal_log(jumps, t, &bm);
    const double log_b = system.money_market_log(t, jumps, &bm);
    const double log_p = system.bond_log(t, T, jumps, &bm);
    out[0] = std::exp(log_rho - log_b);
    out[1] = std::exp(log_rho - log_b + log_p);
  });
  CHECK(est[0].within(curve(t)));
  CHECK(est[1].within(curve(T)));
}

TEST_CASE("bond volatility below minus one is rejected") {
  LevyModel model =
      LevyModel::compound_poisson(1.0, JumpLaw::atoms({{{1.0}, 1.0}}));
  VolStructure vol;
  vol.Omega = [](const Vec&, double s, double T) {
    return -1.5 * (1.0 - std::exp(-(T - s)));
  };
  BondSystem system(model, {}, vol, flat_curve(0.0));
  JumpPath jumps{2.0, {{0.2, {1.0}}}, 0.0};
  CHECK_THROWS_AS(system.bond_log(1.0, 2.0, jumps, nullptr), PositivityError);
}
