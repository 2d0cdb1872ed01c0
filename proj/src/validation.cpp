#include "levyito/validation.hpp"

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "levyito/fx.hpp"
#include "levyito/levy_ito.hpp"
#include "levyito/levy_model.hpp"
#include "levyito/mc_engine.hpp"
#include "levyito/pricing_kernel.hpp"
#include "levyito/vecmath.hpp"

namespace levyito {

namespace {

CheckResult within_check(std::string name, const Estimate& est, double target,
                         std::string detail) {
  CheckResult r;
  r.name = std::move(name);
  r.observed = std::abs(est.mean - target);
  r.bound = 3.0 * est.std_error;
  r.passed = r.observed <= r.bound;
  r.detail = std::move(detail);
  return r;
}

CheckResult tolerance_check(std::string name, double observed, double bound,
                            std::string detail) {
  CheckResult r;
  r.name = std::move(name);
  r.observed = observed;
  r.bound = bound;
  r.passed = observed <= bound;
  r.detail = std::move(detail);
  return r;
}

TimeFn flat(double r) {
  return [r](double) { return r; };
}

// MC mean of exp(int int f dN~) over (0, horizon] against the deterministic
// exponential-formula value.
CheckResult exp_formula_case(const std::string& name, const LevyModel& model,
                             const SpaceTimeFn& f, double horizon,
                             std::uint64_t seed, int n_paths) {
  const CumulativeFunction comp =
      compile_measure_rate(model, f, horizon, Shell::kAll);
  const double compensator = comp.eval(horizon);
  const double rhs = exponential_formula_rhs(model, f, 0.0, horizon);

  McConfig mc;
  mc.master_seed = seed;
  mc.n_paths = n_paths;
  const Estimate est = run_paths_scalar(mc, [&](const PathRng& rng) {
    const JumpPath jumps = model.sample_path(horizon, rng);
    double sum = 0.0;
    for (const auto& e : jumps.events) sum += f(e.x, e.time);
    return std::exp(sum - compensator);
  });
  return within_check(name, est, rhs,
                      "MC mean of exp(compensated jump integral) vs "
                      "deterministic value " +
                          std::to_string(rhs));
}

}  // namespace

bool CheckSuite::all_passed() const {
  for (const auto& r : results)
    if (!r.passed) return false;
  return true;
}

CheckSuite check_exponential_formula(std::uint64_t seed, int n_paths) {
  CheckSuite suite;
  suite.name = "exponential-formula";

  const SpaceTimeFn linear03 = [](const Vec& x, double) { return 0.3 * x[0]; };
  const SpaceTimeFn ramp = [](const Vec& x, double t) {
    return x[0] * (0.2 + 0.1 * t);
  };
  const SpaceTimeFn plane = [](const Vec& x, double) {
    return 0.3 * x[0] - 0.2 * x[1];
  };

  suite.results.push_back(exp_formula_case(
      "compound Poisson, Gaussian marks, linear integrand",
      LevyModel::compound_poisson(1.2, JumpLaw::gaussian1d(0.1, 0.4)),
      linear03, 1.0, seed, n_paths));
  suite.results.push_back(exp_formula_case(
      "compound Poisson, two atoms, time-ramped integrand",
      LevyModel::compound_poisson(
          0.8, JumpLaw::atoms({{Vec{0.5}, 0.4}, {Vec{-0.3}, 0.6}})),
      ramp, 1.0, seed + 1, n_paths));
  suite.results.push_back(exp_formula_case(
      "gamma subordinator, linear integrand",
      LevyModel::gamma_subordinator(2.0),
      [](const Vec& x, double) { return 0.25 * x[0]; }, 1.0, seed + 2,
      n_paths));
  suite.results.push_back(exp_formula_case(
      "variance gamma, linear integrand", LevyModel::variance_gamma(1.5),
      [](const Vec& x, double) { return 0.2 * x[0]; }, 1.0, seed + 3,
      n_paths));
  suite.results.push_back(exp_formula_case(
      "compound Poisson, bivariate Gaussian marks, planar integrand",
      LevyModel::compound_poisson(
          1.0, JumpLaw::gaussian2d({0.0, 0.1}, {0.6, 0.8}, 0.2)),
      plane, 1.0, seed + 4, n_paths));
  return suite;
}

CheckSuite check_kernel_martingale(std::uint64_t seed, int n_paths) {
  CheckSuite suite;
  suite.name = "kernel-martingale";
  const double horizon = 2.0;
  const std::vector<double> times{0.5, 1.0, 2.0};

  // Compound Poisson marks with a Brownian sector.
  {
    const LevyModel model =
        LevyModel::compound_poisson(2.0, JumpLaw::gaussian1d(-0.05, 0.25));
    RiskAversion aversion;
    aversion.kappa = [](double) { return Vec{0.3, -0.2}; };
    aversion.lambda = [](const Vec& x, double) { return 0.6 * x[0]; };
    const PricingKernel kernel(
        model, [](double t) { return 0.02 + 0.01 * t; }, aversion, horizon);
    const TimeGrid grid = TimeGrid::uniform(horizon, 8);

    McConfig mc;
    mc.master_seed = seed;
    mc.n_paths = n_paths;
    const auto est = run_paths(
        mc, static_cast<int>(times.size()),
        [&](const PathRng& rng, std::vector<double>& out) {
          const JumpPath jumps = model.sample_path(horizon, rng);
          const TimeGrid g = grid.refined_with(jumps.event_times());
          const BrownianIncrements bm = sample_brownian(g, 2, rng);
          for (std::size_t k = 0; k < times.size(); ++k)
            out[k] = std::exp(kernel.terminal_log(jumps, times[k], &bm) +
                              kernel.integrated_short_rate(times[k]));
        });
    for (std::size_t k = 0; k < times.size(); ++k)
      suite.results.push_back(within_check(
          "compound Poisson + Brownian kernel, t = " +
              std::to_string(times[k]),
          est[k], 1.0, "E[pi_t B_t] vs 1"));
  }

  // Variance gamma, jump sector only.
  {
    const LevyModel model = LevyModel::variance_gamma(1.5);
    RiskAversion aversion;
    aversion.lambda = [](const Vec& x, double) { return 0.5 * x[0]; };
    const PricingKernel kernel(model, flat(0.03), aversion, horizon);

    McConfig mc;
    mc.master_seed = seed + 100;
    mc.n_paths = n_paths;
    const auto est = run_paths(
        mc, static_cast<int>(times.size()),
        [&](const PathRng& rng, std::vector<double>& out) {
          const JumpPath jumps = model.sample_path(horizon, rng);
          for (std::size_t k = 0; k < times.size(); ++k)
            out[k] = std::exp(kernel.terminal_log(jumps, times[k]) +
                              kernel.integrated_short_rate(times[k]));
        });
    for (std::size_t k = 0; k < times.size(); ++k)
      suite.results.push_back(within_check(
          "variance gamma kernel, t = " + std::to_string(times[k]), est[k],
          1.0, "E[pi_t B_t] vs 1"));
  }
  return suite;
}

CheckSuite check_deflated_asset(std::uint64_t seed, int n_paths) {
  CheckSuite suite;
  suite.name = "deflated-asset";

  const LevyModel model =
      LevyModel::compound_poisson(1.5, JumpLaw::gaussian1d(0.0, 0.3));
  const double horizon = 1.5, s0 = 1.3;
  const TimeFn r = flat(0.02);
  RiskAversion aversion;
  aversion.kappa = [](double) { return Vec{0.25}; };
  aversion.lambda = [](const Vec& x, double) { return 0.4 * x[0]; };
  AssetExposure exposure;
  exposure.sigma_brownian = [](double) { return Vec{0.15}; };
  exposure.sigma = [](const Vec& x, double) { return 0.35 * x[0]; };

  const PricingKernel kernel(model, r, aversion, horizon);
  const AssetPrice asset(model, r, aversion, exposure, s0, horizon);
  const TimeGrid grid = TimeGrid::uniform(horizon, 6);

  // E[log S_T] = log s0 + int (r + R) - |sigma_B|^2 T / 2
  //            - int int (e^{sigma} - 1 - sigma) nu, so the drift regression
  // estimate of the average excess return is
  //   (E[log S_T] - log s0 - r T + |sigma_B|^2 T / 2 + convexity) / T.
  const double big_r = excess_rate_of_return(model, aversion, exposure, 0.0);
  const double convexity =
      horizon * model.integrate_measure([&](const Vec& x) {
        return std::expm1(0.35 * x[0]) - 0.35 * x[0];
      });

  McConfig mc;
  mc.master_seed = seed;
  mc.n_paths = n_paths;
  const auto est =
      run_paths(mc, 2, [&](const PathRng& rng, std::vector<double>& out) {
        const JumpPath jumps = model.sample_path(horizon, rng);
        const TimeGrid g = grid.refined_with(jumps.event_times());
        const BrownianIncrements bm = sample_brownian(g, 1, rng);
        const double log_pi = kernel.terminal_log(jumps, horizon, &bm);
        const double log_s = asset.terminal_log(jumps, horizon, &bm);
        out[0] = std::exp(log_pi + log_s);
        out[1] = (log_s - std::log(s0) - 0.02 * horizon +
                  0.5 * 0.15 * 0.15 * horizon + convexity) /
                 horizon;
      });
  suite.results.push_back(
      within_check("deflated asset mean", est[0], s0, "E[pi_T S_T] vs S_0"));
  suite.results.push_back(within_check(
      "drift regression recovers the excess return", est[1], big_r,
      "pathwise log-drift estimate vs quadrature excess return"));
  return suite;
}

CheckSuite check_fx_identities(std::uint64_t seed, int n_paths) {
  CheckSuite suite;
  suite.name = "fx-identities";

  // Three-currency jump system on bivariate Gaussian marks.
  {
    FxSystemSpec spec{LevyModel::compound_poisson(
                          1.5, JumpLaw::gaussian2d({0.0, 0.0}, {1.0, 1.0}, 0.0)),
                      {}};
    auto currency = [](double r, Vec lambda) {
      FxCurrency c;
      c.short_rate = flat(r);
      c.lambda_vector = std::move(lambda);
      return c;
    };
    spec.currencies.push_back(currency(0.010, {0.7, 0.0}));
    spec.currencies.push_back(currency(0.030, {-0.2, 0.5}));
    spec.currencies.push_back(currency(0.022, {0.3, -0.4}));
    const double horizon = 2.0;
    FxSystem sys(spec, horizon);
    FxPair f01(sys, 0, 1), f10(sys, 1, 0), f12(sys, 1, 2), f20(sys, 2, 0);
    // The observation times repeat across paths; priming turns the per-call
    // partial-cell quadrature of the deterministic drifts into a lookup.
    const TimeGrid obs = TimeGrid::uniform(horizon, 4);
    sys.prime_grid(obs);
    for (FxPair* f : {&f01, &f10, &f12, &f20}) f->prime_grid(obs);

    const int pathwise_paths = std::min(n_paths, 50);
    double worst_recip = 0.0, worst_tri = 0.0, worst_route = 0.0;
    for (int path = 0; path < pathwise_paths; ++path) {
      const JumpPath jumps = sys.model().sample_path(
          horizon, PathRng{seed, static_cast<std::uint64_t>(path)});
      for (double t : {0.5, 1.0, 2.0}) {
        const double direct = f01.log_exchange(jumps, t);
        const double ratio = sys.exchange_log_ratio(0, 1, jumps, t);
        const double scale =
            std::max(1.0, std::max(std::abs(direct), std::abs(ratio)));
        worst_route =
            std::max(worst_route, std::abs(direct - ratio) / scale);
        worst_recip = std::max(
            worst_recip, std::abs(direct + f10.log_exchange(jumps, t)));
        worst_tri =
            std::max(worst_tri, std::abs(direct + f12.log_exchange(jumps, t) +
                                         f20.log_exchange(jumps, t)));
      }
    }
    suite.results.push_back(tolerance_check(
        "reciprocal identity", worst_recip, 1e-12,
        "max |log F^{01} + log F^{10}| over sampled paths and times"));
    suite.results.push_back(tolerance_check(
        "triangle identity", worst_tri, 1e-12,
        "max |log F^{01} + log F^{12} + log F^{20}|"));
    suite.results.push_back(tolerance_check(
        "direct form vs kernel ratio", worst_route, 1e-10,
        "max relative gap between the two exchange-rate constructions"));

    double worst_premium_gap = 0.0;
    for (int i = 0; i < sys.size(); ++i)
      for (int j = 0; j < sys.size(); ++j) {
        if (i == j) continue;
        const double q = sys.excess_return(i, j, 0.0);
        const double e = sys.excess_return_exponent(i, j, 0.0);
        worst_premium_gap = std::max(
            worst_premium_gap, std::abs(q - e) / std::max(1.0, std::abs(e)));
      }
    suite.results.push_back(tolerance_check(
        "quadrature vs exponent-combination excess returns",
        worst_premium_gap, 1e-8, "max relative gap over ordered pairs"));
  }

  // Analytic Siegel constructions.
  {
    // Equal-length Brownian vectors at 120 degrees: R = 3/2 for every pair.
    const double s3 = std::sqrt(3.0) / 2.0;
    FxSystemSpec spec{
        LevyModel::compound_poisson(0.0, JumpLaw::gaussian1d(0.0, 1.0)), {}};
    const std::vector<Vec> kappas = {{1.0, 0.0}, {-0.5, s3}, {-0.5, -s3}};
    const double rates[3] = {0.01, 0.04, 0.02};
    for (int i = 0; i < 3; ++i) {
      FxCurrency c;
      c.short_rate = flat(rates[i]);
      c.kappa = [k = kappas[i]](double) { return k; };
      spec.currencies.push_back(std::move(c));
    }
    const FxSystem sys(spec, 1.0);
    const SiegelReport report = siegel_check(sys);
    double worst = 0.0;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        if (i != j) worst = std::max(worst, std::abs(report.excess[i][j] - 1.5));
    suite.results.push_back(tolerance_check(
        "Brownian 120-degree construction", worst, 1e-12,
        "max |R^{ij} - 3/2| over ordered pairs"));
  }
  {
    // Two iid copies: R = psi1(load) + psi1(-load) in both directions.
    const double m = 1.5, up = 0.7, down = 0.5, p = 0.5, load = 0.8;
    std::vector<std::pair<Vec, double>> marks;
    for (int k = 0; k < 2; ++k) {
      Vec plus(2, 0.0), minus(2, 0.0);
      plus[k] = up;
      minus[k] = -down;
      marks.emplace_back(plus, p / 2.0);
      marks.emplace_back(minus, (1.0 - p) / 2.0);
    }
    FxSystemSpec spec{
        LevyModel::compound_poisson(2.0 * m, JumpLaw::atoms(marks)), {}};
    auto currency = [](double r, Vec lambda) {
      FxCurrency c;
      c.short_rate = flat(r);
      c.lambda_vector = std::move(lambda);
      return c;
    };
    spec.currencies.push_back(currency(0.02, {load, 0.0}));
    spec.currencies.push_back(currency(0.03, {0.0, load}));
    const FxSystem sys(spec, 1.0);
    auto psi1 = [&](double a) {
      return m * (p * std::expm1(a * up) + (1.0 - p) * std::expm1(-a * down));
    };
    const double expected = psi1(load) + psi1(-load);
    const double worst =
        std::max(std::abs(sys.excess_return_exponent(0, 1, 0.0) - expected),
                 std::abs(sys.excess_return_exponent(1, 0, 0.0) - expected));
    suite.results.push_back(tolerance_check(
        "iid-copies construction", worst, 1e-12,
        "|R - (psi1(load) + psi1(-load))| in both directions"));
  }
  {
    // Bivariate Gaussian marks, equal lengths at 90 degrees:
    // R = m (e^{L^2} - 1).
    const double m = 2.0, L = 0.8;
    FxSystemSpec spec{LevyModel::compound_poisson(
                          m, JumpLaw::gaussian2d({0.0, 0.0}, {1.0, 1.0}, 0.0)),
                      {}};
    auto currency = [](double r, Vec lambda) {
      FxCurrency c;
      c.short_rate = flat(r);
      c.lambda_vector = std::move(lambda);
      return c;
    };
    spec.currencies.push_back(currency(0.01, {L, 0.0}));
    spec.currencies.push_back(currency(0.02, {0.0, L}));
    const FxSystem sys(spec, 1.0);
    const double expected = m * std::expm1(L * L);
    suite.results.push_back(tolerance_check(
        "bivariate Gaussian equal-length construction",
        std::abs(sys.excess_return_exponent(0, 1, 0.0) - expected), 1e-12,
        "|R - m (e^{L^2} - 1)|"));
    suite.results.push_back(tolerance_check(
        "bivariate Gaussian quadrature route",
        std::abs(sys.excess_return(0, 1, 0.0) - expected),
        1e-8 * std::max(1.0, expected), "quadrature R vs closed form"));
  }
  {
    // Two-dimensional variance gamma, orthogonal unit vectors, m = 2:
    // R = -2 log(1 - 2 / 4) = 2 ln 2.
    FxSystemSpec spec{LevyModel::two_dim_variance_gamma(2.0), {}};
    auto currency = [](double r, Vec lambda) {
      FxCurrency c;
      c.short_rate = flat(r);
      c.lambda_vector = std::move(lambda);
      return c;
    };
    spec.currencies.push_back(currency(0.01, {1.0, 0.0}));
    spec.currencies.push_back(currency(0.02, {0.0, 1.0}));
    const FxSystem sys(spec, 1.0);
    const double expected = 2.0 * std::log(2.0);
    suite.results.push_back(tolerance_check(
        "variance gamma construction",
        std::abs(sys.excess_return_exponent(0, 1, 0.0) - expected), 1e-12,
        "|R - 2 ln 2|"));
    suite.results.push_back(tolerance_check(
        "variance gamma quadrature route",
        std::abs(sys.excess_return(0, 1, 0.0) - expected),
        1e-8 * std::max(1.0, expected), "quadrature R vs closed form"));
  }
  return suite;
}

}  // namespace levyito
