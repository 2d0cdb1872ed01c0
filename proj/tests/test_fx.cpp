#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "levyito/errors.hpp"
#include "levyito/fx.hpp"
#include "levyito/mc_engine.hpp"
#include "levyito/vecmath.hpp"

using namespace levyito;

namespace {

TimeFn flat(double r) {
  return [r](double) { return r; };
}

VecTimeFn const_kappa(Vec k) {
  return [k = std::move(k)](double) { return k; };
}

FxCurrency linear_currency(double r, Vec lambda) {
  FxCurrency c;
  c.short_rate = flat(r);
  c.lambda_vector = std::move(lambda);
  return c;
}

// Two-sided compound Poisson marks on two axes: one independent copy of a
// (+up with prob p, -down with prob 1-p) stream per axis.
FxSystemSpec iid_copy_spec(double per_copy_intensity, double up, double down,
                           double p_up, double load) {
  std::vector<std::pair<Vec, double>> marks;
  for (int k = 0; k < 2; ++k) {
    Vec plus(2, 0.0), minus(2, 0.0);
    plus[k] = up;
    minus[k] = -down;
    marks.emplace_back(plus, p_up / 2.0);
    marks.emplace_back(minus, (1.0 - p_up) / 2.0);
  }
  FxSystemSpec spec{
      LevyModel::compound_poisson(2.0 * per_copy_intensity,
                                  JumpLaw::atoms(marks)),
      {}};
  spec.currencies.push_back(linear_currency(0.02, {load, 0.0}));
  spec.currencies.push_back(linear_currency(0.03, {0.0, load}));
  return spec;
}

}  // namespace

TEST_CASE("fx excess return matches hand-computed atom sums") {
  // Two atoms, two currencies with linear jump aversion.
  const double m = 2.0;
  const Vec x1{0.5, 0.0}, x2{0.0, -0.4};
  const double w1 = 0.3, w2 = 0.7;
  const Vec l0{0.6, 0.2}, l1{0.1, 0.9};
  FxSystemSpec spec{
      LevyModel::compound_poisson(m, JumpLaw::atoms({{x1, w1}, {x2, w2}})),
      {}};
  spec.currencies.push_back(linear_currency(0.01, l0));
  spec.currencies.push_back(linear_currency(0.02, l1));
  FxSystem sys(spec, 1.0);

  // R^{01} = sum_k m w_k (e^{(l1-l0).x_k} - 1)(1 - e^{-l1.x_k}).
  auto expected = [&](const Vec& la, const Vec& lb) {
    double r = 0.0;
    for (const auto& [x, w] : {std::pair{x1, w1}, std::pair{x2, w2}})
      r += m * w * std::expm1(dot(lb, x) - dot(la, x)) *
           (-std::expm1(-dot(lb, x)));
    return r;
  };
  CHECK(sys.excess_return(0, 1, 0.0) == doctest::Approx(expected(l0, l1)).epsilon(1e-12));
  CHECK(sys.excess_return(1, 0, 0.0) == doctest::Approx(expected(l1, l0)).epsilon(1e-12));
  CHECK(sys.excess_return_exponent(0, 1, 0.3) ==
        doctest::Approx(expected(l0, l1)).epsilon(1e-12));
  CHECK(sys.excess_return_exponent(1, 0, 0.3) ==
        doctest::Approx(expected(l1, l0)).epsilon(1e-12));
  CHECK(sys.excess_return(0, 0, 0.0) == 0.0);

  // sigma^{01}(x, t) = (l1 - l0) . x.
  CHECK(sys.fx_jump_volatility(0, 1, x1, 0.0) ==
        doctest::Approx(dot(sub(l1, l0), x1)).epsilon(1e-15));
}

TEST_CASE("fx exchange-rate routes agree pathwise for a jump system") {
  // Three currencies on bivariate Gaussian marks with distinct initials.
  FxSystemSpec spec{
      LevyModel::compound_poisson(
          1.5, JumpLaw::gaussian2d({0.0, 0.0}, {1.0, 1.0}, 0.0)),
      {}};
  spec.currencies.push_back(linear_currency(0.010, {0.7, 0.0}));
  spec.currencies.push_back(linear_currency(0.030, {-0.2, 0.5}));
  spec.currencies.push_back(linear_currency(0.022, {0.3, -0.4}));
  spec.currencies[0].kernel_initial = 1.0;
  spec.currencies[1].kernel_initial = 1.3;
  spec.currencies[2].kernel_initial = 0.8;
  // One time-dependent short rate exercises the drift integrals.
  spec.currencies[1].short_rate = [](double t) { return 0.03 + 0.005 * t; };
  const double horizon = 2.0;
  FxSystem sys(spec, horizon);

  FxPair f01(sys, 0, 1), f10(sys, 1, 0), f12(sys, 1, 2), f20(sys, 2, 0);
  CHECK(f01.log_initial() == doctest::Approx(std::log(1.0 / 1.3)).epsilon(1e-15));
  CHECK(sys.initial_exchange(0, 1) * sys.initial_exchange(1, 2) *
            sys.initial_exchange(2, 0) ==
        doctest::Approx(1.0).epsilon(1e-15));

  for (std::uint64_t path = 0; path < 40; ++path) {
    const JumpPath jumps = sys.model().sample_path(horizon, PathRng{414u, path});
    for (double t : {0.4, 1.0, 2.0}) {
      // Direct exchange-rate form vs kernel ratio.
      const double direct = f01.log_exchange(jumps, t);
      const double ratio = sys.exchange_log_ratio(0, 1, jumps, t);
      CHECK(direct == doctest::Approx(ratio).epsilon(1e-10));
      // Reciprocal pair: log F^{01} + log F^{10} = 0.
      CHECK(direct + f10.log_exchange(jumps, t) ==
            doctest::Approx(0.0).epsilon(1e-12));
      // Triangle: log F^{01} + log F^{12} + log F^{20} = 0.
      const double tri = direct + f12.log_exchange(jumps, t) +
                         f20.log_exchange(jumps, t);
      CHECK(tri == doctest::Approx(0.0).epsilon(1e-12));
      // The kernel-ratio route telescopes exactly in floating point.
      const double tri_ratio = sys.exchange_log_ratio(0, 1, jumps, t) +
                               sys.exchange_log_ratio(1, 2, jumps, t) +
                               sys.exchange_log_ratio(2, 0, jumps, t);
      CHECK(tri_ratio == doctest::Approx(0.0).epsilon(1e-13));
    }
  }
}

TEST_CASE("fx routes agree when Brownian and jump risk mix") {
  FxSystemSpec spec{
      LevyModel::compound_poisson(
          1.0, JumpLaw::atoms({{{0.6, -0.1}, 0.5}, {{-0.3, 0.4}, 0.5}})),
      {}};
  spec.currencies.push_back(linear_currency(0.01, {0.5, 0.1}));
  spec.currencies.push_back(linear_currency(0.02, {-0.1, 0.4}));
  spec.currencies.push_back(linear_currency(0.00, {0.2, 0.2}));
  spec.currencies[0].kappa = const_kappa({0.3, -0.2});
  spec.currencies[1].kappa = const_kappa({-0.1, 0.5});
  // Currency 2 carries no Brownian risk: kappa stays null.
  const double horizon = 1.5;
  FxSystem sys(spec, horizon);
  FxPair f01(sys, 0, 1), f12(sys, 1, 2), f20(sys, 2, 0);

  TimeGrid base = TimeGrid::uniform(horizon, 30);
  for (std::uint64_t path = 0; path < 25; ++path) {
    const JumpPath jumps =
        sys.model().sample_path(horizon, PathRng{515u, path});
    const TimeGrid grid = base.refined_with(jumps.event_times());
    const BrownianIncrements bm =
        sample_brownian(grid, 2, PathRng{515u, path});
    for (double t : {0.5, 1.5}) {
      const double direct = f01.log_exchange(jumps, t, &bm);
      const double ratio = sys.exchange_log_ratio(0, 1, jumps, t, &bm);
      CHECK(direct == doctest::Approx(ratio).epsilon(1e-10));
      const double tri = direct + f12.log_exchange(jumps, t, &bm) +
                         f20.log_exchange(jumps, t, &bm);
      CHECK(tri == doctest::Approx(0.0).epsilon(1e-12));
    }
    // simulate() lands on log_exchange at grid times.
    const ScalarPath sp = f01.simulate(jumps, grid, &bm);
    const double t_end = sp.times.back();
    CHECK(std::log(sp.values.back()) ==
          doctest::Approx(f01.log_exchange(jumps, t_end, &bm)).epsilon(1e-12));
  }
  // Brownian volatility of the pair is the kappa difference.
  const Vec sb = sys.fx_brownian_volatility(0, 1, 0.7);
  CHECK(sb[0] == doctest::Approx(-0.4).epsilon(1e-15));
  CHECK(sb[1] == doctest::Approx(0.7).epsilon(1e-15));
  // Missing increments for a pair carrying Brownian risk is an error.
  const JumpPath jumps = sys.model().sample_path(horizon, PathRng{515u, 99u});
  CHECK_THROWS_AS(f01.log_exchange(jumps, 1.0), ConfigError);
}

TEST_CASE("fx iid copies demand the same positive premium in both directions") {
  const double m = 1.5, up = 0.7, down = 0.5, p = 0.5, load = 0.8;
  FxSystem sys(iid_copy_spec(m, up, down, p, load), 1.0);
  // One-dimensional exponent of a single copy: psi1(a) = m (E e^{aX} - 1).
  auto psi1 = [&](double a) {
    return m * (p * std::expm1(a * up) + (1.0 - p) * std::expm1(-a * down));
  };
  const double expected = psi1(load) + psi1(-load);
  CHECK(expected > 0.0);  // Jensen: e^u + e^{-u} > 2 for u != 0
  for (auto [i, j] : {std::pair{0, 1}, std::pair{1, 0}}) {
    CHECK(sys.excess_return(i, j, 0.0) ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(sys.excess_return_exponent(i, j, 0.0) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
  const SiegelReport report = siegel_check(sys);
  CHECK(report.all_positive);
  CHECK(report.min_off_diagonal == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("fx Brownian currencies at one hundred twenty degrees") {
  const double s3 = std::sqrt(3.0) / 2.0;
  FxSystemSpec spec{
      LevyModel::compound_poisson(0.0, JumpLaw::gaussian1d(0.0, 1.0)), {}};
  const double rates[3] = {0.01, 0.04, 0.02};
  const std::vector<Vec> kappas = {{1.0, 0.0}, {-0.5, s3}, {-0.5, -s3}};
  for (int i = 0; i < 3; ++i) {
    FxCurrency c;
    c.short_rate = flat(rates[i]);
    c.kappa = const_kappa(kappas[i]);
    spec.currencies.push_back(std::move(c));
  }
  FxSystem sys(spec, 1.0);

  // R^{ij} = (kappa^j - kappa^i) . kappa^j = 1 - cos(120 deg) = 3/2.
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (i == j) continue;
      CHECK(sys.excess_return(i, j, 0.5) ==
            doctest::Approx(1.5).epsilon(1e-12));
      CHECK(sys.excess_return_exponent(i, j, 0.5) ==
            doctest::Approx(1.5).epsilon(1e-12));
    }
  const SiegelReport report = siegel_check(sys);
  CHECK(report.all_positive);
  CHECK(report.min_off_diagonal == doctest::Approx(1.5).epsilon(1e-12));

  // Monte Carlo drift of log F^{01} over one year, on a half-length copy of
  // the system so the lognormal mean estimator keeps a tame tail. The excess
  // return and the convexity drag still cancel: R = |sigma_B|^2 / 2 = 3/8,
  // so E[log F_1] - log F_0 = r^1 - r^0, while the mean level recovers the
  // excess return, E[F_1] = F_0 e^{r^1 - r^0 + R}.
  FxSystemSpec half = spec;
  for (int i = 0; i < 3; ++i)
    half.currencies[i].kappa = const_kappa(scale(0.5, kappas[i]));
  FxSystem hsys(half, 1.0);
  const double r_half = 1.5 * 0.25;
  CHECK(hsys.excess_return(0, 1, 0.0) ==
        doctest::Approx(r_half).epsilon(1e-12));
  FxPair f01(hsys, 0, 1);
  const TimeGrid grid = TimeGrid::uniform(1.0, 1);
  const McConfig cfg{20240814u, 5000u};
  const auto est =
      run_paths(cfg, 2, [&](const PathRng& rng, std::vector<double>& out) {
        const JumpPath jumps = hsys.model().sample_path(1.0, rng);
        const BrownianIncrements bm = sample_brownian(grid, 2, rng);
        const double lf = f01.log_exchange(jumps, 1.0, &bm);
        out[0] = lf;
        out[1] = std::exp(lf);
      });
  const double drift = rates[1] - rates[0];
  CHECK(est[0].within(f01.log_initial() + drift, 3.0));
  CHECK(est[1].within(std::exp(f01.log_initial() + drift + r_half), 3.0));
}

TEST_CASE("fx Merton system hits the equal-length closed form") {
  // Standard bivariate Gaussian marks, equal-length aversions at 90 degrees:
  // R^{ij} = m (e^{|l^j - l^i|^2 / 2} - 1) with |l^j - l^i|^2 = 2 L^2.
  const double m = 2.0, L = 0.8;
  FxSystemSpec spec{
      LevyModel::compound_poisson(
          m, JumpLaw::gaussian2d({0.0, 0.0}, {1.0, 1.0}, 0.0)),
      {}};
  spec.currencies.push_back(linear_currency(0.01, {L, 0.0}));
  spec.currencies.push_back(linear_currency(0.02, {0.0, L}));
  FxSystem sys(spec, 1.0);
  const double expected = m * std::expm1(L * L);
  CHECK(sys.excess_return_exponent(0, 1, 0.0) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(sys.excess_return_exponent(1, 0, 0.0) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(sys.excess_return(0, 1, 0.0) ==
        doctest::Approx(expected).epsilon(1e-8));
  CHECK(siegel_check(sys).all_positive);
}

TEST_CASE("fx two-dimensional variance gamma and its admissibility edge") {
  // Orthogonal unit aversions with intensity 2: R = -2 log(1 - 2/4) = 2 ln 2.
  FxSystemSpec spec{LevyModel::two_dim_variance_gamma(2.0), {}};
  spec.currencies.push_back(linear_currency(0.01, {1.0, 0.0}));
  spec.currencies.push_back(linear_currency(0.02, {0.0, 1.0}));
  FxSystem sys(spec, 1.0);
  const double expected = 2.0 * std::log(2.0);
  CHECK(sys.excess_return_exponent(0, 1, 0.0) ==
        doctest::Approx(expected).epsilon(1e-12));
  CHECK(sys.excess_return(0, 1, 0.0) ==
        doctest::Approx(expected).epsilon(1e-8));
  CHECK(siegel_check(sys).all_positive);

  // Equal lengths L with angle theta stay admissible exactly while
  // cos(theta) > 1 - m / L^2; beyond that the exponent of the difference
  // leaves its domain and the demanded premium diverges.
  const double m2 = 1.0, L2 = 1.2;
  const double threshold = 1.0 - m2 / (L2 * L2);
  auto vg_pair = [&](double cos_theta) {
    const double theta = std::acos(cos_theta);
    FxSystemSpec s{LevyModel::two_dim_variance_gamma(m2), {}};
    s.currencies.push_back(linear_currency(0.0, {L2, 0.0}));
    s.currencies.push_back(
        linear_currency(0.0, scale(L2, Vec{std::cos(theta), std::sin(theta)})));
    return FxSystem(s, 1.0);
  };
  FxSystem inside = vg_pair(threshold + 0.02);
  const Vec diff_in = sub(inside.spec().currencies[1].lambda_vector,
                          inside.spec().currencies[0].lambda_vector);
  CHECK(inside.model().in_exponent_domain(diff_in));
  CHECK(inside.excess_return_exponent(0, 1, 0.0) > 0.0);

  FxSystem outside = vg_pair(threshold - 0.02);
  const Vec diff_out = sub(outside.spec().currencies[1].lambda_vector,
                           outside.spec().currencies[0].lambda_vector);
  CHECK_FALSE(outside.model().in_exponent_domain(diff_out));
  CHECK_THROWS_AS(outside.excess_return_exponent(0, 1, 0.0), DomainError);
}

TEST_CASE("fx randomized Siegel families keep every premium positive") {
  const SiegelFamily families[4] = {
      SiegelFamily::kBrownian, SiegelFamily::kIidCopies, SiegelFamily::kMerton,
      SiegelFamily::kVarianceGamma};
  for (int f = 0; f < 4; ++f)
    for (std::uint64_t rep = 0; rep < 25; ++rep) {
      const std::uint64_t seed = 1000u * static_cast<std::uint64_t>(f) + rep;
      CAPTURE(f);
      CAPTURE(rep);
      try {
        FxSystem sys(sample_siegel_system(families[f], seed), 1.0);
        const SiegelReport report = siegel_check(sys);
        REQUIRE(report.all_positive);
        // Quadrature and exponent routes agree on the first ordered pair.
        const double rq = report.excess[0][1];
        const double re = sys.excess_return_exponent(0, 1, 0.0);
        CHECK(rq == doctest::Approx(re).epsilon(1e-8));
      } catch (const std::exception& e) {
        FAIL("family " << f << " rep " << rep << " threw: " << e.what());
      }
    }
}

TEST_CASE("fx configuration errors") {
  const LevyModel model =
      LevyModel::compound_poisson(1.0, JumpLaw::gaussian1d(0.0, 0.5));
  FxSystemSpec one{model, {}};
  one.currencies.push_back(linear_currency(0.01, {0.5}));
  CHECK_THROWS_AS(FxSystem(one, 1.0), ConfigError);

  FxSystemSpec two{model, {}};
  two.currencies.push_back(linear_currency(0.01, {0.5}));
  two.currencies.push_back(linear_currency(0.02, {-0.3}));
  CHECK_THROWS_AS(FxSystem(two, 0.0), ConfigError);
  CHECK_THROWS_AS(FxSystem(two, -1.0), ConfigError);

  FxSystemSpec bad_init = two;
  bad_init.currencies[0].kernel_initial = 0.0;
  CHECK_THROWS_AS(FxSystem(bad_init, 1.0), ConfigError);

  FxSystemSpec both = two;
  both.currencies[0].lambda = [](const Vec& x, double) { return x[0]; };
  CHECK_THROWS_AS(FxSystem(both, 1.0), ConfigError);

  FxSystemSpec wrong_dim = two;
  wrong_dim.currencies[0].lambda_vector = {0.5, 0.1};
  CHECK_THROWS_AS(FxSystem(wrong_dim, 1.0), ConfigError);

  FxSystem sys(two, 1.0);
  CHECK_THROWS_AS(sys.excess_return(0, 2, 0.0), ConfigError);
  CHECK_THROWS_AS(sys.kernel(-1), ConfigError);

  // The exponent route needs the linear form.
  FxSystemSpec functional{model, {}};
  FxCurrency c0;
  c0.lambda = [](const Vec& x, double) { return 0.4 * x[0]; };
  functional.currencies.push_back(c0);
  functional.currencies.push_back(linear_currency(0.02, {-0.3}));
  FxSystem fsys(functional, 1.0);
  CHECK(fsys.excess_return(0, 1, 0.0) ==
        doctest::Approx(fsys.excess_return(0, 1, 0.5)).epsilon(1e-12));
  CHECK_THROWS_AS(fsys.excess_return_exponent(0, 1, 0.0), ConfigError);
}
