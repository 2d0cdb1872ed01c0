#include "levyito/fx.hpp"

#include <cmath>
#include <utility>

#include "levyito/errors.hpp"
#include "levyito/rng.hpp"
#include "levyito/vecmath.hpp"

namespace levyito {

namespace {

// Tolerances for the exchange-rate drift integrals; tight enough that the
// direct route and the kernel-ratio route agree to 1e-10 pathwise.
constexpr QuadratureOptions kFxTight{1e-12, 1e-11, 100000};

SpaceTimeFn resolve_lambda(const FxCurrency& c, int model_dim) {
  if (c.lambda && !c.lambda_vector.empty())
    throw ConfigError("FxSystem: set lambda or lambda_vector, not both");
  if (c.lambda) return c.lambda;
  if (c.lambda_vector.empty()) return {};
  if (static_cast<int>(c.lambda_vector.size()) != model_dim)
    throw ConfigError(
        "FxSystem: lambda_vector dimension does not match the model");
  Vec l = c.lambda_vector;
  return [l](const Vec& x, double) { return dot(l, x); };
}

VecTimeFn brownian_diff(const VecTimeFn& ki, const VecTimeFn& kj) {
  if (!ki && !kj) return {};
  return [ki, kj](double t) {
    if (!ki) return kj(t);
    if (!kj) return scale(-1.0, ki(t));
    return sub(kj(t), ki(t));
  };
}

// int (e^{sigma^{ij}} - 1)(1 - e^{-lambda^j}) nu(dx) at time t.
double jump_excess(const LevyModel& model, const SpaceTimeFn& li,
                   const SpaceTimeFn& lj, double t,
                   const QuadratureOptions& opts) {
  if (!lj) return 0.0;  // the (1 - e^{-lambda^j}) factor vanishes
  return model.integrate_measure(
      [&](const Vec& x) {
        const double si = li ? li(x, t) : 0.0;
        const double sj = lj(x, t);
        return std::expm1(sj - si) * (-std::expm1(-sj));
      },
      Shell::kAll, opts);
}

double brownian_excess(const VecTimeFn& ki, const VecTimeFn& kj, double t) {
  if (!kj) return 0.0;  // dot against kappa^j = 0
  const Vec kjv = kj(t);
  const Vec sb = ki ? sub(kjv, ki(t)) : kjv;
  return dot(sb, kjv);
}

}  // namespace

FxSystem::FxSystem(FxSystemSpec spec, double horizon)
    : spec_(std::move(spec)), horizon_(horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon))
    throw ConfigError("FxSystem: horizon must be positive and finite");
  if (spec_.currencies.size() < 2)
    throw ConfigError("FxSystem: need at least two currencies");
  const int dim = spec_.model.dimension();
  lambdas_.reserve(spec_.currencies.size());
  kernels_.reserve(spec_.currencies.size());
  for (const FxCurrency& c : spec_.currencies) {
    if (!(c.kernel_initial > 0.0) || !std::isfinite(c.kernel_initial))
      throw ConfigError("FxSystem: kernel_initial must be positive");
    lambdas_.push_back(resolve_lambda(c, dim));
    kernels_.emplace_back(spec_.model, c.short_rate,
                          RiskAversion{c.kappa, lambdas_.back()}, horizon_);
  }
}

void FxSystem::check_index(int i) const {
  if (i < 0 || i >= size())
    throw ConfigError("FxSystem: currency index out of range");
}

const PricingKernel& FxSystem::kernel(int i) const {
  check_index(i);
  return kernels_[i];
}

double FxSystem::kernel_log(int i, const JumpPath& jumps, double t,
                            const BrownianIncrements* bm) const {
  check_index(i);
  return std::log(spec_.currencies[i].kernel_initial) +
         kernels_[i].terminal_log(jumps, t, bm);
}

double FxSystem::initial_exchange(int i, int j) const {
  check_index(i);
  check_index(j);
  return spec_.currencies[i].kernel_initial /
         spec_.currencies[j].kernel_initial;
}

double FxSystem::exchange_log_ratio(int i, int j, const JumpPath& jumps,
                                    double t,
                                    const BrownianIncrements* bm) const {
  return kernel_log(i, jumps, t, bm) - kernel_log(j, jumps, t, bm);
}

double FxSystem::fx_jump_volatility(int i, int j, const Vec& x,
                                    double t) const {
  check_index(i);
  check_index(j);
  const double si = lambdas_[i] ? lambdas_[i](x, t) : 0.0;
  const double sj = lambdas_[j] ? lambdas_[j](x, t) : 0.0;
  return sj - si;
}

Vec FxSystem::fx_brownian_volatility(int i, int j, double t) const {
  check_index(i);
  check_index(j);
  const VecTimeFn diff =
      brownian_diff(spec_.currencies[i].kappa, spec_.currencies[j].kappa);
  return diff ? diff(t) : Vec{};
}

double FxSystem::excess_return(int i, int j, double t) const {
  check_index(i);
  check_index(j);
  if (i == j) return 0.0;
  const FxCurrency& ci = spec_.currencies[i];
  const FxCurrency& cj = spec_.currencies[j];
  return brownian_excess(ci.kappa, cj.kappa, t) +
         jump_excess(spec_.model, lambdas_[i], lambdas_[j], t, kFxTight);
}

double FxSystem::excess_return_exponent(int i, int j, double t) const {
  check_index(i);
  check_index(j);
  if (i == j) return 0.0;
  const int dim = spec_.model.dimension();
  auto linear = [&](int k) -> Vec {
    const FxCurrency& c = spec_.currencies[k];
    if (c.lambda)
      throw ConfigError(
          "FxSystem::excess_return_exponent: requires linear jump aversion "
          "(lambda_vector)");
    if (c.lambda_vector.empty()) return Vec(dim, 0.0);
    return c.lambda_vector;
  };
  const Vec li = linear(i);
  const Vec lj = linear(j);
  return brownian_excess(spec_.currencies[i].kappa, spec_.currencies[j].kappa,
                         t) +
         spec_.model.levy_exponent(sub(lj, li)) +
         spec_.model.levy_exponent(neg(lj)) - spec_.model.levy_exponent(neg(li));
}

void FxSystem::prime_grid(const TimeGrid& grid) {
  for (PricingKernel& k : kernels_) k.prime_grid(grid);
}

FxPair::FxPair(const FxSystem& system, int i, int j) : i_(i), j_(j) {
  log_initial_ = std::log(system.initial_exchange(i, j));
  const FxSystemSpec& spec = system.spec();
  const LevyModel model = system.model();
  const int dim = model.dimension();
  const SpaceTimeFn li = resolve_lambda(spec.currencies[i], dim);
  const SpaceTimeFn lj = resolve_lambda(spec.currencies[j], dim);
  SpaceTimeFn sigma;
  if (li || lj)
    sigma = [li, lj](const Vec& x, double t) {
      return (lj ? lj(x, t) : 0.0) - (li ? li(x, t) : 0.0);
    };
  const VecTimeFn ki = spec.currencies[i].kappa;
  const VecTimeFn kj = spec.currencies[j].kappa;
  const VecTimeFn sigma_b = brownian_diff(ki, kj);
  const TimeFn ri = spec.currencies[i].short_rate;
  const TimeFn rj = spec.currencies[j].short_rate;
  // r^j - r^i + R^{ij} - |sigma_B|^2 / 2 - int (e^{sigma} - 1) nu, assembled
  // term by term as displayed rather than algebraically collapsed, so the
  // two exchange-rate routes stay arithmetically independent.
  auto rate = [model, ri, rj, li, lj, sigma, ki, kj, sigma_b](double s) {
    double r = (rj ? rj(s) : 0.0) - (ri ? ri(s) : 0.0);
    r += brownian_excess(ki, kj, s);
    r += jump_excess(model, li, lj, s, kFxTight);
    if (sigma_b) r -= 0.5 * norm2(sigma_b(s));
    if (sigma)
      r -= model.integrate_measure(
          [&](const Vec& x) { return std::expm1(sigma(x, s)); }, Shell::kAll,
          kFxTight);
    return r;
  };
  factor_ = ExponentialFactor(
      CumulativeFunction(rate, 0.0, system.horizon(), kFxTight), sigma_b,
      sigma);
}

double FxPair::log_exchange(const JumpPath& jumps, double t,
                            const BrownianIncrements* bm) const {
  return log_initial_ + factor_.terminal_log(jumps, t, bm);
}

ScalarPath FxPair::simulate(const JumpPath& jumps, const TimeGrid& grid,
                            const BrownianIncrements* bm) const {
  return factor_.simulate(jumps, grid, bm, std::exp(log_initial_));
}

void FxPair::prime_grid(const TimeGrid& grid) { factor_.prime_grid(grid); }

SiegelReport siegel_check(const FxSystem& system, double t) {
  const int n = system.size();
  SiegelReport report;
  report.excess.assign(n, std::vector<double>(n, 0.0));
  bool first = true;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double r = system.excess_return(i, j, t);
      report.excess[i][j] = r;
      if (first || r < report.min_off_diagonal) report.min_off_diagonal = r;
      first = false;
    }
  report.all_positive = !first && report.min_off_diagonal > 0.0;
  return report;
}

namespace {

double uniform_in(RandomStream& rng, double lo, double hi) {
  return lo + (hi - lo) * rng.next_uniform();
}

TimeFn constant_rate(double r) {
  return [r](double) { return r; };
}

VecTimeFn constant_kappa(Vec k) {
  return [k = std::move(k)](double) { return k; };
}

Vec unit2(double theta) { return {std::cos(theta), std::sin(theta)}; }

// Random unit vectors in R^dim, pairwise cos(angle) <= 0.98 so that every
// difference kappa^j - kappa^i stays bounded away from zero.
std::vector<Vec> distinct_directions(RandomStream& rng, int dim, int count) {
  std::vector<Vec> dirs;
  while (static_cast<int>(dirs.size()) < count) {
    Vec u(dim);
    for (double& c : u) c = rng.next_normal();
    const double len = norm(u);
    if (len < 1e-8) continue;
    u = scale(1.0 / len, u);
    bool distinct = true;
    for (const Vec& v : dirs)
      if (dot(u, v) > 0.98) distinct = false;
    if (distinct) dirs.push_back(std::move(u));
  }
  return dirs;
}

FxSystemSpec brownian_family(RandomStream& rng) {
  const int n_ccy = 2 + static_cast<int>(rng.next_u64() % 3);
  const double length = uniform_in(rng, 0.25, 1.5);
  const std::vector<Vec> dirs = distinct_directions(rng, n_ccy, n_ccy);
  FxSystemSpec spec{
      LevyModel::compound_poisson(0.0, JumpLaw::gaussian1d(0.0, 1.0)), {}};
  for (int i = 0; i < n_ccy; ++i) {
    FxCurrency c;
    c.short_rate = constant_rate(uniform_in(rng, 0.0, 0.05));
    c.kappa = constant_kappa(scale(length, dirs[i]));
    spec.currencies.push_back(std::move(c));
  }
  return spec;
}

// One independent compound-Poisson copy per currency, all copies sharing one
// two-sided mark law; currency i loads linearly on copy i alone. The union of
// copies is a single compound Poisson process whose marks live on the axes.
FxSystemSpec iid_copies_family(RandomStream& rng) {
  const int n_ccy = 2 + static_cast<int>(rng.next_u64() % 2);
  const double intensity = uniform_in(rng, 0.5, 2.5);
  const double up = uniform_in(rng, 0.2, 1.2);
  const double down = uniform_in(rng, 0.2, 1.2);
  const double p_up = uniform_in(rng, 0.2, 0.8);
  const double load = uniform_in(rng, 0.25, 1.5);
  std::vector<std::pair<Vec, double>> marks;
  for (int k = 0; k < n_ccy; ++k) {
    Vec plus(n_ccy, 0.0), minus(n_ccy, 0.0);
    plus[k] = up;
    minus[k] = -down;
    marks.emplace_back(std::move(plus), p_up / n_ccy);
    marks.emplace_back(std::move(minus), (1.0 - p_up) / n_ccy);
  }
  FxSystemSpec spec{
      LevyModel::compound_poisson(intensity * n_ccy, JumpLaw::atoms(marks)),
      {}};
  for (int i = 0; i < n_ccy; ++i) {
    FxCurrency c;
    c.short_rate = constant_rate(uniform_in(rng, 0.0, 0.05));
    c.lambda_vector = Vec(n_ccy, 0.0);
    c.lambda_vector[i] = load;
    spec.currencies.push_back(std::move(c));
  }
  return spec;
}

// Compound Poisson with standard bivariate Gaussian marks and equal-length
// distinct aversion vectors: R^{ij} = m (e^{|l^j - l^i|^2 / 2} - 1) > 0.
FxSystemSpec merton_family(RandomStream& rng) {
  const double intensity = uniform_in(rng, 0.5, 3.0);
  const double length = uniform_in(rng, 0.2, 1.2);
  const double theta0 = uniform_in(rng, 0.0, 6.28);
  const double d1 = uniform_in(rng, 0.15, 2.0);
  const double d2 = uniform_in(rng, 0.15, 2.0);
  const double angles[3] = {theta0, theta0 + d1, theta0 + d1 + d2};
  FxSystemSpec spec{
      LevyModel::compound_poisson(
          intensity, JumpLaw::gaussian2d({0.0, 0.0}, {1.0, 1.0}, 0.0)),
      {}};
  for (double a : angles) {
    FxCurrency c;
    c.short_rate = constant_rate(uniform_in(rng, 0.0, 0.05));
    c.lambda_vector = scale(length, unit2(a));
    spec.currencies.push_back(std::move(c));
  }
  return spec;
}

// Two-dimensional variance gamma with equal-length aversion vectors. With
// psi(a) = -m log(1 - |a|^2 / (2m)), equal lengths leave R^{ij} = psi(l^j -
// l^i), positive exactly when cos(angle) > 1 - m / L^2. Two safe regimes:
// short vectors (L^2 < m/2, any angles) or a narrow cone (angles <= 50
// degrees with L^2 <= 1.62 m, threshold at most 0.383 < cos 50).
FxSystemSpec variance_gamma_family(RandomStream& rng) {
  const double intensity = uniform_in(rng, 1.0, 4.0);
  const bool cone = (rng.next_u64() % 2) == 1;
  double length;
  double d1, d2;
  if (cone) {
    length = 0.9 * std::sqrt(2.0 * intensity) * uniform_in(rng, 0.5, 1.0);
    d1 = uniform_in(rng, 0.06, 0.43);
    d2 = uniform_in(rng, 0.06, 0.43);
  } else {
    length = std::sqrt(0.5 * intensity) * uniform_in(rng, 0.3, 0.9);
    d1 = uniform_in(rng, 0.15, 1.9);
    d2 = uniform_in(rng, 0.15, 1.9);
  }
  const double theta0 = uniform_in(rng, 0.0, 6.28);
  const double angles[3] = {theta0, theta0 + d1, theta0 + d1 + d2};
  FxSystemSpec spec{LevyModel::two_dim_variance_gamma(intensity), {}};
  for (double a : angles) {
    FxCurrency c;
    c.short_rate = constant_rate(uniform_in(rng, 0.0, 0.04));
    c.lambda_vector = scale(length, unit2(a));
    spec.currencies.push_back(std::move(c));
  }
  return spec;
}

}  // namespace

FxSystemSpec sample_siegel_system(SiegelFamily family, std::uint64_t seed) {
  RandomStream rng(seed, 0, Substream::kScratch);
  switch (family) {
    case SiegelFamily::kBrownian:
      return brownian_family(rng);
    case SiegelFamily::kIidCopies:
      return iid_copies_family(rng);
    case SiegelFamily::kMerton:
      return merton_family(rng);
    case SiegelFamily::kVarianceGamma:
      return variance_gamma_family(rng);
  }
  throw ConfigError("sample_siegel_system: unknown family");
}

}  // namespace levyito
