#include <cmath>
#include <vector>

#include "doctest.h"
#include "levyito/errors.hpp"
#include "levyito/mc_engine.hpp"
#include "levyito/quadrature.hpp"
#include "levyito/rates_chaos.hpp"
#include "levyito/yield_curve.hpp"

using namespace levyito;

namespace {

// nu = 2 (0.6 delta_{+1} + 0.4 delta_{-1}):
//   int x  nu = 0.4,  int x^2 nu = 2.
LevyModel skewed_atoms() {
  return LevyModel::compound_poisson(
      2.0, JumpLaw::atoms({{{1.0}, 0.6}, {{-1.0}, 0.4}}));
}

// Exponential structure functions with closed-form coefficients:
//   phi = 0.3 x e^{-s/2}, beta = 0.2 x e^{-s}, gamma = 0.4 x, so
//   a = 0.18 e^{-s}, b = 0.12 e^{-1.5 s}, c = 0.08 e^{-2 s},
//   g = 0.32, Q_t = 0.32 t, G_t = 0.16 t,
//   A_t = 0.18 e^{-t} + 0.0256 e^{-2t} (t/2 + 1/4),
//   B_t = 0.16 e^{-1.5 t}, C_t = 0.04 e^{-2 t}.
ChaosSpec exponential_spec() {
  return ChaosSpec{skewed_atoms(),
                   [](const Vec& x, double s) { return 0.3 * x[0] * std::exp(-0.5 * s); },
                   [](const Vec& x, double s) { return 0.2 * x[0] * std::exp(-s); },
                   [](const Vec& x, double) { return 0.4 * x[0]; },
                   {},
                   {}};
}

double closed_a(double t) {
  return 0.18 * std::exp(-t) + 0.0256 * std::exp(-2.0 * t) * (0.5 * t + 0.25);
}
double closed_b(double t) { return 0.16 * std::exp(-1.5 * t); }
double closed_c(double t) { return 0.04 * std::exp(-2.0 * t); }

}  // namespace

TEST_CASE("chaos coefficients match closed forms for an exponential spec") {
  ChaosModel model(exponential_spec(), 6.0);

  CHECK(model.a_rate(0.7) == doctest::Approx(0.18 * std::exp(-0.7)).epsilon(1e-12));
  CHECK(model.b_rate(0.7) == doctest::Approx(0.12 * std::exp(-1.05)).epsilon(1e-12));
  CHECK(model.c_rate(0.7) == doctest::Approx(0.08 * std::exp(-1.4)).epsilon(1e-12));
  CHECK(model.g_rate(1.9) == doctest::Approx(0.32).epsilon(1e-12));
  CHECK(model.quadratic_compensator(1.25) == doctest::Approx(0.4).epsilon(1e-10));

  for (double t : {0.0, 0.5, 1.3, 4.0}) {
    CHECK(model.coefficient_a(t) == doctest::Approx(closed_a(t)).epsilon(1e-9));
    CHECK(model.coefficient_b(t) == doctest::Approx(closed_b(t)).epsilon(1e-9));
    CHECK(model.coefficient_c(t) == doctest::Approx(closed_c(t)).epsilon(1e-9));
  }

  // Priming must reproduce the same values through the cached lookup.
  ChaosModel primed(exponential_spec(), 6.0);
  primed.prime({0.5, 1.3});
  CHECK(primed.coefficient_a(0.5) == doctest::Approx(model.coefficient_a(0.5)).epsilon(1e-12));
  CHECK(primed.coefficient_c(1.3) == doctest::Approx(model.coefficient_c(1.3)).epsilon(1e-12));
}

TEST_CASE("state, kernel and bond from a hand-built path") {
  ChaosModel model(exponential_spec(), 6.0);
  // Marks +1 at 0.4 and -1 at 1.1: gamma sums to zero, so M_t is pure drift
  // -G_t = -0.16 t after both events.
  JumpPath jumps{6.0, {{0.4, {1.0}}, {1.1, {-1.0}}}, 0.0};

  auto st = model.state(jumps, 1.2);
  CHECK(st.m == doctest::Approx(-0.192).epsilon(1e-13));
  CHECK(st.q == doctest::Approx(0.384).epsilon(1e-11));

  const double mmq = st.m * st.m - st.q;
  const double pi_expected = closed_a(1.2) + closed_b(1.2) * st.m + closed_c(1.2) * mmq;
  CHECK(model.kernel(1.2, st) == doctest::Approx(pi_expected).epsilon(1e-8));

  const double num = closed_a(2.0) + closed_b(2.0) * st.m + closed_c(2.0) * mmq;
  CHECK(model.bond_price(1.2, 2.0, st) == doctest::Approx(num / pi_expected).epsilon(1e-8));
  CHECK(model.bond_price(1.2, 1.2, st) == 1.0);
  CHECK_THROWS_AS(model.bond_price(1.2, 1.0, st), ConfigError);

  // r pi = a + 2 b M + c M^2 is a perfect square in the state and stays
  // nonnegative.
  const double rpi = 0.18 * std::exp(-1.2) + 2.0 * 0.12 * std::exp(-1.8) * st.m +
                     0.08 * std::exp(-2.4) * st.m * st.m;
  CHECK(model.rate_kernel_product(1.2, st) == doctest::Approx(rpi).epsilon(1e-12));
  CHECK(model.short_rate(1.2, st) ==
        doctest::Approx(rpi / model.kernel(1.2, st)).epsilon(1e-10));

  // Empty state at time zero needs neither B nor C.
  auto st0 = model.state(jumps, 0.0);
  CHECK(st0.m == 0.0);
  CHECK(st0.q == 0.0);
  CHECK(model.kernel(0.0, st0) == doctest::Approx(closed_a(0.0)).epsilon(1e-9));
}

TEST_CASE("direct expansion of the kernel agrees with the quadratic form") {
  ChaosModel model(exponential_spec(), 6.0);
  JumpPath jumps{6.0, {{0.4, {1.0}}, {1.1, {-1.0}}}, 0.0};

  for (double t : {0.0, 0.7, 1.2, 2.5}) {
    auto st = model.state(jumps, t);
    const double quadratic = model.kernel(t, st);
    const double direct = model.kernel_direct(t, st);
    CHECK(direct == doctest::Approx(quadratic).epsilon(1e-9));
  }
}

TEST_CASE("floating leg reproduces direct quadrature of r pi along a path") {
  ChaosModel model(exponential_spec(), 6.0);
  JumpPath jumps{6.0, {{0.4, {1.0}}, {1.1, {-1.0}}, {2.2, {1.0}}}, 0.0};

  const auto integrand = [&](double s) {
    return model.rate_kernel_product(s, model.state(jumps, s));
  };
  const double direct = integrate_interval(integrand, 0.0, 3.0, {0.4, 1.1, 2.2},
                                           {1e-12, 1e-11, 100000});
  CHECK(model.floating_leg(jumps, 0.0, 3.0) == doctest::Approx(direct).epsilon(1e-9));

  // Additivity over adjacent windows.
  const double split = model.floating_leg(jumps, 0.0, 0.9) +
                       model.floating_leg(jumps, 0.9, 3.0);
  CHECK(model.floating_leg(jumps, 0.0, 3.0) == doctest::Approx(split).epsilon(1e-12));

  CHECK_THROWS_AS(model.floating_leg(jumps, 0.0, 7.0), ConfigError);
}

TEST_CASE("chaos variable has mean zero, the isometry variance, and the "
          "kernel as conditional variance") {
  const double cap = 4.0;
  ChaosModel model(exponential_spec(), cap);
  model.prime({0.0, 0.7, cap});
  const auto st_zero = ChaosModel::State{};
  const double pi0 = model.kernel(0.0, st_zero);

  // Var X_u = int_0^u (a + c Q) ds for u <= cap by the isometry (the two
  // chaos orders are orthogonal).
  const double u = 1.5;
  const double var_u = 0.18 * (1.0 - std::exp(-u)) +
                       0.0256 * (0.25 - std::exp(-2.0 * u) * (0.5 * u + 0.25));

  McConfig mc;
  mc.master_seed = 611;
  mc.n_paths = 20000;
  auto est = run_paths(mc, 4, [&](const PathRng& rng, std::vector<double>& out) {
    JumpPath jumps = model.model().sample_path(cap, rng);
    const double x_u = model.chaos_variable(jumps, u);
    const double x_t = model.chaos_variable(jumps, 0.7);
    const double x_cap = model.chaos_variable(jumps, cap);
    const auto st_t = model.state(jumps, 0.7);
    const auto st_cap = model.state(jumps, cap);
    const double pi_t = model.kernel(0.7, st_t);
    const double pi_cap = model.kernel(cap, st_cap);
    out[0] = x_u;
    out[1] = x_u * x_u;
    // Conditional-variance identity at time zero: E[X_cap^2 + pi_cap] = pi_0.
    out[2] = x_cap * x_cap + pi_cap - pi0;
    // And at a later time, tested against the F_t-measurable sign of M:
    // E[((X_cap - X_t)^2 + pi_cap - pi_t) 1{M_t > 0}] = 0.
    const double d = x_cap - x_t;
    out[3] = (d * d + pi_cap - pi_t) * (st_t.m > 0.0 ? 1.0 : 0.0);
  });
  CHECK(est[0].within(0.0));
  CHECK(est[1].within(var_u));
  CHECK(est[2].within(0.0));
  CHECK(est[3].within(0.0));
  // The variance estimate must actually be informative.
  CHECK(est[1].std_error < 0.05 * var_u);
}

TEST_CASE("calibrated chaos model reproduces the input curve") {
  // Upward-sloping zero curve with pillars out to ten years.
  YieldCurve curve = YieldCurve::from_zero_rates(
      {1.0, 2.0, 3.0, 5.0, 7.0, 10.0},
      {0.015, 0.017, 0.019, 0.021, 0.022, 0.0225});
  LevyModel model = skewed_atoms();
  const double cap = 15.0;
  ChaosModel chaos = calibrate_chaos_model(
      model, curve, [](const Vec& x, double) { return x[0]; }, 0.4, cap,
      [](double) { return 2.0; }, [](double) { return 0.4; });

  CHECK(chaos.coefficient_a(0.0) == doctest::Approx(1.0).epsilon(1e-8));
  for (double t : {0.5, 1.0, 2.0, 3.0, 4.5, 7.0, 12.0}) {
    CHECK(chaos.coefficient_a(t) ==
          doctest::Approx(curve.discount(t)).epsilon(1e-8));
    // Initial bond prices are the calibrated coefficients.
    CHECK(chaos.bond_price(0.0, t, ChaosModel::State{}) ==
          doctest::Approx(curve.discount(t) / chaos.coefficient_a(0.0))
              .epsilon(1e-12));
  }

  // E[r_t pi_t] = f(0,t) P(0,t): the mean instantaneous deflated rate matches
  // the curve's forward density (checked by quadrature of the a + c*Q rate).
  const double fw = integrate([&](double s) { return chaos.a_rate(s) +
                                chaos.c_rate(s) * chaos.quadratic_compensator(s); },
                              1.4, 1.6, {1e-13, 1e-12, 100000});
  CHECK(fw == doctest::Approx(curve.discount(1.4) - curve.discount(1.6)).epsilon(1e-8));
}

TEST_CASE("calibrated chaos MC: martingale bonds, positive kernel, par FRN") {
  YieldCurve curve = YieldCurve::from_zero_rates(
      {1.0, 2.0, 3.0, 5.0, 7.0, 10.0},
      {0.015, 0.017, 0.019, 0.021, 0.022, 0.0225});
  LevyModel model = skewed_atoms();
  const double cap = 15.0;
  ChaosModel chaos = calibrate_chaos_model(
      model, curve, [](const Vec& x, double) { return x[0]; }, 0.4, cap,
      [](double) { return 2.0; }, [](double) { return 0.4; });
  const double t = 1.5, T = 5.0;
  chaos.prime({t, T, cap});

  McConfig mc;
  mc.master_seed = 713;
  mc.n_paths = 20000;
  auto est = run_paths(mc, 4, [&](const PathRng& rng, std::vector<double>& out) {
    JumpPath jumps = model.sample_path(cap, rng);
    const auto st_t = chaos.state(jumps, t);
    const auto st_cap = chaos.state(jumps, cap);
    const double pi_t = chaos.kernel(t, st_t);
    // Deflated bond: E[pi_t P(t, T)] = P(0, T).
    out[0] = pi_t * chaos.bond_price(t, T, st_t);
    // Kernel is itself a martingale: E[pi_t] = A_t.
    out[1] = pi_t;
    // Floating leg plus deflated terminal redemption prices at par:
    // E[int_0^cap r pi ds + pi_cap] = pi_0 = 1.
    out[2] = chaos.floating_leg(jumps, 0.0, cap) + chaos.kernel(cap, st_cap);
    // Pathwise positivity violations of pi or of r pi (a perfect square).
    out[3] = (pi_t > 0.0 && chaos.rate_kernel_product(t, st_t) >= 0.0 &&
              chaos.kernel(cap, st_cap) > 0.0)
                 ? 0.0
                 : 1.0;
  });
  CHECK(est[0].within(curve.discount(T)));
  CHECK(est[1].within(curve.discount(t)));
  CHECK(est[2].within(1.0));
  CHECK(est[2].std_error < 0.01);
  CHECK(est[3].mean == 0.0);
}

TEST_CASE("variance-gamma calibrated chaos round trip") {
  YieldCurve curve = YieldCurve::from_zero_rates({1.0, 5.0, 10.0},
                                                 {0.02, 0.02, 0.02});
  LevyModel model = LevyModel::variance_gamma(1.5);
  const double cap = 12.0;
  // gamma(x) = x: int x^2 nu = 1 and int x nu = 0 for the symmetric
  // variance-gamma measure, so Q_t = t and M has no drift correction.
  ChaosModel chaos = calibrate_chaos_model(
      model, curve, [](const Vec& x, double) { return x[0]; }, 0.55, cap,
      [](double) { return 1.0; }, [](double) { return 0.0; });

  for (double t : {0.5, 2.0, 8.0})
    CHECK(chaos.coefficient_a(t) == doctest::Approx(std::exp(-0.02 * t)).epsilon(1e-8));

  // Kernel direct-vs-quadratic equivalence on a sampled path.
  const double t = 2.0;
  chaos.prime({t});
  PathRng rng{20240801u, 7u};
  JumpPath jumps = model.sample_path(cap, rng);
  const auto st = chaos.state(jumps, t);
  CHECK(st.q == doctest::Approx(t).epsilon(1e-10));
  const double quadratic = chaos.kernel(t, st);
  CHECK(chaos.kernel_direct(t, st) == doctest::Approx(quadratic).epsilon(1e-8));

  // Martingale check under subordination sampling: E[pi_t] = P(0, t).
  McConfig mc;
  mc.master_seed = 715;
  mc.n_paths = 6000;
  auto est = run_paths_scalar(mc, [&](const PathRng& prng) {
    JumpPath path = model.sample_path(cap, prng);
    return chaos.kernel(t, chaos.state(path, t));
  });
  CHECK(est.within(std::exp(-0.02 * t)));
}

TEST_CASE("calibration rejects invalid configurations") {
  YieldCurve curve = YieldCurve::from_zero_rates({1.0, 2.0}, {0.02, 0.021});
  LevyModel model = skewed_atoms();
  auto gamma = [](const Vec& x, double) { return x[0]; };

  CHECK_THROWS_AS(calibrate_chaos_model(model, curve, gamma, 1.5, 10.0),
                  ConfigError);
  CHECK_THROWS_AS(calibrate_chaos_model(model, curve, gamma, 0.5, -1.0),
                  ConfigError);

  // A pillar with an increasing discount factor means a negative forward.
  YieldCurve bad({1.0, 2.0}, {0.95, 0.96});
  CHECK_THROWS_AS(calibrate_chaos_model(model, bad, gamma, 0.5, 10.0),
                  DataError);

  // Missing structure functions are rejected at model construction.
  ChaosSpec incomplete{model, nullptr, nullptr, nullptr, {}, {}};
  CHECK_THROWS_AS(ChaosModel(incomplete, 5.0), ConfigError);
  CHECK_THROWS_AS(ChaosModel(exponential_spec(), -2.0), ConfigError);
}

TEST_CASE("degenerate variance weights still calibrate") {
  YieldCurve curve = YieldCurve::from_zero_rates({1.0, 4.0}, {0.02, 0.022});
  LevyModel model = skewed_atoms();
  auto gamma = [](const Vec& x, double) { return x[0]; };

  // Pure first chaos (q = 0): beta vanishes, so C = 0 and the kernel is
  // affine in M.
  ChaosModel first = calibrate_chaos_model(model, curve, gamma, 1.0, 12.0,
                                           [](double) { return 2.0; },
                                           [](double) { return 0.4; });
  CHECK(first.coefficient_a(2.0) == doctest::Approx(curve.discount(2.0)).epsilon(1e-8));
  CHECK(first.coefficient_c(1.0) == doctest::Approx(0.0).epsilon(1e-12));

  // Pure second chaos (p = 0).
  ChaosModel second = calibrate_chaos_model(model, curve, gamma, 0.0, 12.0,
                                            [](double) { return 2.0; },
                                            [](double) { return 0.4; });
  CHECK(second.coefficient_a(2.0) == doctest::Approx(curve.discount(2.0)).epsilon(1e-8));
  CHECK(second.coefficient_b(2.0) == doctest::Approx(0.0).epsilon(1e-12));
}
