#include "levyito/levy_model.hpp"

#include <algorithm>
#include <cmath>

#include "levyito/errors.hpp"

namespace levyito {

// Precomputed sampling tables for a Custom density: retained mass per side and
// a per-side inverse CDF on a geometric knot grid.
struct LevyModel::CustomData {
  std::function<double(double)> density;
  double eps = 0.0;

  struct Side {
    double mass = 0.0;              // nu of the retained side
    std::vector<double> knots;      // |x| knots, ascending, knots[0] = eps
    std::vector<double> cum;        // cumulative mass up to each knot
  };
  Side pos, neg;  // neg stores |x| knots for x < 0

  double total_mass() const { return pos.mass + neg.mass; }
};

namespace {

// Product f * density with the density evaluated first. Where the measure has
// decayed below ~1e-280 the point is treated as massless even if f has
// overflowed; exponential integrands with a healthy margin to the exponent
// domain boundary lose nothing measurable, and boundary-hugging ones fail over
// to a thrown QuadratureError rather than NaN poisoning.
double weighted(double f, double density) {
  if (!(density > 1e-280)) return 0.0;
  return f * density;
}

double bessel_k1(double z) { return std::cyl_bessel_k(1.0, z); }

// Radial Levy density of the isotropic two-dimensional variance gamma model:
// integrating the subordinated Gaussian against the gamma subordinator's Levy
// measure gives nu(x) dx = m sqrt(2m)/pi * K_1(sqrt(2m) r)/r dx.
double vg2_radial_density_times_r(double m, double r) {
  const double s = std::sqrt(2.0 * m);
  return m * s / M_PI * bessel_k1(s * r);
}

// Equally spaced interior breakpoints splitting [0, 2pi] into at least
// ceil(intervals) pieces (clamped to [8, 512]). Used to seed angular
// quadratures: a single Gauss-Kronrod pass over the whole circle can step
// right over a narrow lobe and accept the smooth background with a small
// error estimate, so the lobe width must be resolved by the initial grid.
std::vector<double> angular_seed(double intervals) {
  const int n = std::clamp(static_cast<int>(std::ceil(intervals)), 8, 512);
  std::vector<double> b;
  b.reserve(n - 1);
  for (int k = 1; k < n; ++k) b.push_back(2.0 * M_PI * k / n);
  return b;
}

void build_side(const std::function<double(double)>& density, double sign,
                double eps, LevyModel::CustomData::Side& side) {
  auto f = [&](double a) { return density(sign * a); };
  // Find a cutoff beyond which the remaining mass is negligible.
  double xmax = std::max(2.0 * eps, 1.0);
  double tail = integrate_half_line(f, xmax);
  const double inner = integrate(f, eps, xmax);
  int guard = 0;
  while (tail > 1e-13 * std::max(inner + tail, 1e-300) && guard++ < 80) {
    xmax *= 2.0;
    tail = integrate_half_line(f, xmax);
  }
  const int cells = 512;
  const double ratio = std::pow(xmax / eps, 1.0 / cells);
  side.knots.resize(cells + 1);
  side.cum.resize(cells + 1);
  side.knots[0] = eps;
  side.cum[0] = 0.0;
  for (int i = 1; i <= cells; ++i) {
    side.knots[i] = eps * std::pow(ratio, i);
    side.cum[i] = side.cum[i - 1] + integrate(f, side.knots[i - 1],
                                              side.knots[i]);
  }
  side.mass = side.cum.back() + tail;
  if (!std::isfinite(side.mass))
    throw ConfigError("LevyModel::custom: density not integrable beyond eps");
}

double invert_side(const LevyModel::CustomData::Side& side,
                   const std::function<double(double)>& f, double u) {
  // u in (0, mass): find |x| with cumulative mass u.
  const double target = std::min(u, side.cum.back() * (1.0 - 1e-15));
  auto it = std::upper_bound(side.cum.begin(), side.cum.end(), target);
  std::size_t hi = static_cast<std::size_t>(it - side.cum.begin());
  if (hi == 0) return side.knots.front();
  if (hi >= side.cum.size()) return side.knots.back();
  double lo_x = side.knots[hi - 1], hi_x = side.knots[hi];
  double need = target - side.cum[hi - 1];
  // Bisection on the cell; the cell masses are small so this stays cheap.
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo_x + hi_x);
    const double m = integrate(f, side.knots[hi - 1], mid,
                               {1e-14, 1e-10, 2000});
    if (m < need)
      lo_x = mid;
    else
      hi_x = mid;
    if (hi_x - lo_x < 1e-12 * hi_x) break;
  }
  return 0.5 * (lo_x + hi_x);
}

}  // namespace

LevyModel LevyModel::compound_poisson(double intensity, JumpLaw law) {
  if (!(intensity >= 0.0))
    throw ConfigError("LevyModel::compound_poisson: intensity must be >= 0");
  LevyModel m;
  m.kind_ = LevyKind::kCompoundPoisson;
  m.dim_ = law.dimension();
  m.intensity_ = intensity;
  m.law_ = std::move(law);
  return m;
}

LevyModel LevyModel::gamma_subordinator(double intensity) {
  if (!(intensity > 0.0))
    throw ConfigError("LevyModel::gamma_subordinator: intensity must be > 0");
  LevyModel m;
  m.kind_ = LevyKind::kGamma;
  m.dim_ = 1;
  m.intensity_ = intensity;
  return m;
}

LevyModel LevyModel::variance_gamma(double intensity) {
  if (!(intensity > 0.0))
    throw ConfigError("LevyModel::variance_gamma: intensity must be > 0");
  LevyModel m;
  m.kind_ = LevyKind::kVarianceGamma;
  m.dim_ = 1;
  m.intensity_ = intensity;
  return m;
}

LevyModel LevyModel::two_dim_variance_gamma(double intensity) {
  if (!(intensity > 0.0))
    throw ConfigError(
        "LevyModel::two_dim_variance_gamma: intensity must be > 0");
  LevyModel m;
  m.kind_ = LevyKind::kTwoDimVarianceGamma;
  m.dim_ = 2;
  m.intensity_ = intensity;
  return m;
}

LevyModel LevyModel::custom(std::function<double(double)> density,
                            double eps) {
  if (!density) throw ConfigError("LevyModel::custom: missing density");
  if (eps <= 0.0) {
    // Default radius: largest eps with int_{|x|<=eps} x^2 nu <= 1e-6 of the
    // inner-shell variance.
    auto var_below = [&](double e) {
      auto g = [&](double x) { return x * x * density(x); };
      return integrate(g, 1e-300, e, {1e-16, 1e-10, 4000}) +
             integrate([&](double x) { return g(-x); }, 1e-300, e,
                       {1e-16, 1e-10, 4000});
    };
    const double total = var_below(1.0);
    if (!(total > 0.0) || !std::isfinite(total))
      throw ConfigError("LevyModel::custom: x^2-integral not positive finite");
    double lo = 1e-12, hi = 1.0;
    for (int i = 0; i < 80; ++i) {
      const double mid = std::sqrt(lo * hi);
      if (var_below(mid) <= 1e-6 * total)
        lo = mid;
      else
        hi = mid;
    }
    eps = lo;
  }
  auto data = std::make_shared<CustomData>();
  data->density = std::move(density);
  data->eps = eps;
  build_side(data->density, +1.0, eps, data->pos);
  build_side(data->density, -1.0, eps, data->neg);
  LevyModel m;
  m.kind_ = LevyKind::kCustom;
  m.dim_ = 1;
  m.intensity_ = data->total_mass();
  m.eps_ = eps;
  m.custom_ = std::move(data);
  return m;
}

void LevyModel::set_default_steps_per_unit(int steps) {
  if (steps < 1)
    throw ConfigError("LevyModel: steps_per_unit must be >= 1");
  steps_per_unit_ = steps;
}

const JumpLaw& LevyModel::law() const {
  if (!law_) throw ConfigError("LevyModel: no jump law for this kind");
  return *law_;
}

double LevyModel::levy_exponent(const Vec& arg) const {
  if (static_cast<int>(arg.size()) != dim_)
    throw DomainError("levy_exponent: argument dimension mismatch");
  switch (kind_) {
    case LevyKind::kCompoundPoisson:
      return intensity_ * (law_->mgf(arg) - 1.0);
    case LevyKind::kGamma: {
      if (!(arg[0] < intensity_))
        throw DomainError("levy_exponent: gamma requires arg < intensity");
      return -intensity_ * std::log1p(-arg[0] / intensity_);
    }
    case LevyKind::kVarianceGamma:
    case LevyKind::kTwoDimVarianceGamma: {
      const double q = norm2(arg);
      if (!(q < 2.0 * intensity_))
        throw DomainError(
            "levy_exponent: variance gamma requires |arg|^2 < 2*intensity");
      return -intensity_ * std::log1p(-q / (2.0 * intensity_));
    }
    case LevyKind::kCustom: {
      const double a = arg[0];
      auto g = [&](const Vec& x) {
        const double ax = a * x[0];
        // e^{ax} - 1 - ax, stable for small ax.
        return std::abs(ax) < 1e-4
                   ? ax * ax * (0.5 + ax / 6.0 + ax * ax / 24.0)
                   : std::expm1(ax) - ax;
      };
      const double v = integrate_measure(g, Shell::kAll);
      if (!std::isfinite(v))
        throw DomainError("levy_exponent: integral diverges for this arg");
      return v;
    }
  }
  throw DomainError("levy_exponent: unknown kind");
}

bool LevyModel::in_exponent_domain(const Vec& arg) const {
  if (static_cast<int>(arg.size()) != dim_) return false;
  switch (kind_) {
    case LevyKind::kCompoundPoisson:
      return true;
    case LevyKind::kGamma:
      return arg[0] < intensity_;
    case LevyKind::kVarianceGamma:
    case LevyKind::kTwoDimVarianceGamma:
      return norm2(arg) < 2.0 * intensity_;
    case LevyKind::kCustom: {
      try {
        return std::isfinite(levy_exponent(arg));
      } catch (const NumericsError&) {
        return false;
      }
    }
  }
  return false;
}

double LevyModel::integrate_measure(
    const std::function<double(const Vec&)>& f, Shell shell,
    const QuadratureOptions& opts) const {
  switch (kind_) {
    case LevyKind::kCompoundPoisson:
      return intensity_ * law_->expectation(f, shell, opts);
    case LevyKind::kGamma: {
      const double m = intensity_;
      auto g = [&](double x) {
        Vec v{x};
        return weighted(f(v), m * std::exp(-m * x) / x);
      };
      switch (shell) {
        case Shell::kAll:
          return integrate(g, 0.0, 1.0, opts) +
                 integrate_half_line(g, 1.0, opts);
        case Shell::kInner:
          return integrate(g, 0.0, 1.0, opts);
        case Shell::kOuter:
          return integrate_half_line(g, 1.0, opts);
      }
      break;
    }
    case LevyKind::kVarianceGamma: {
      const double m = intensity_;
      const double b = std::sqrt(2.0 * m);
      auto side = [&](double sign) {
        auto g = [&, sign](double a) {
          Vec v{sign * a};
          return weighted(f(v), m * std::exp(-b * a) / a);
        };
        switch (shell) {
          case Shell::kAll:
            return integrate(g, 0.0, 1.0, opts) +
                   integrate_half_line(g, 1.0, opts);
          case Shell::kInner:
            return integrate(g, 0.0, 1.0, opts);
          case Shell::kOuter:
            return integrate_half_line(g, 1.0, opts);
        }
        return 0.0;
      };
      return side(+1.0) + side(-1.0);
    }
    case LevyKind::kTwoDimVarianceGamma: {
      const double m = intensity_;
      const double s = std::sqrt(2.0 * m);
      const QuadratureOptions inner = nested_inner(opts);
      auto ring = [&](double r) {
        auto h = [&](double th) {
          Vec x{r * std::cos(th), r * std::sin(th)};
          return f(x);
        };
        const double w = vg2_radial_density_times_r(m, r);
        if (!(w > 1e-280)) return 0.0;
        // Exponential integrands e^{a.x} with |a| up to the integrability
        // bound s concentrate in angular lobes of width ~ 1/sqrt(s r). Seed
        // the partition finely enough that no such lobe can hide between
        // the nodes of an accepted interval.
        //
        // The angular result is multiplied by w afterwards, so its absolute
        // error budget is the ring budget divided by w. Far out on the
        // half-line w decays like e^{-s r} while the lobes grow at most like
        // e^{|a| r} with |a| < s, so a fixed angular tolerance would chase
        // cancellation noise it can never beat; the 1/w budget stays ahead
        // of that noise at every radius.
        QuadratureOptions ang = inner;
        ang.abs_tol = std::max(ang.abs_tol, 1e-3 * opts.abs_tol / w);
        return integrate_interval(h, 0.0, 2.0 * M_PI,
                                  angular_seed(3.5 * std::sqrt(s * r)),
                                  ang) *
               w;
      };
      switch (shell) {
        case Shell::kAll:
          return integrate(ring, 0.0, 1.0, opts) +
                 integrate_half_line(ring, 1.0, opts);
        case Shell::kInner:
          return integrate(ring, 0.0, 1.0, opts);
        case Shell::kOuter:
          return integrate_half_line(ring, 1.0, opts);
      }
      break;
    }
    case LevyKind::kCustom: {
      auto side = [&](double sign) {
        auto g = [&, sign](double a) {
          Vec v{sign * a};
          return weighted(f(v), custom_->density(sign * a));
        };
        switch (shell) {
          case Shell::kAll:
            return integrate(g, 0.0, 1.0, opts) +
                   integrate_half_line(g, 1.0, opts);
          case Shell::kInner:
            return integrate(g, 0.0, 1.0, opts);
          case Shell::kOuter:
            return integrate_half_line(g, 1.0, opts);
        }
        return 0.0;
      };
      return side(+1.0) + side(-1.0);
    }
  }
  throw DomainError("integrate_measure: unknown kind");
}

namespace {

JumpPath sample_compound_poisson(const LevyModel& model, double horizon,
                                 const PathRng& rng) {
  JumpPath path;
  path.horizon = horizon;
  RandomStream count_stream = rng.stream(Substream::kJumpCount);
  const std::uint64_t n = count_stream.next_poisson(model.intensity() *
                                                    horizon);
  if (n == 0) return path;
  RandomStream time_stream = rng.stream(Substream::kJumpTime);
  RandomStream size_stream = rng.stream(Substream::kJumpSize);
  std::vector<double> times(n);
  for (auto& t : times) t = horizon * time_stream.next_uniform();
  std::sort(times.begin(), times.end());
  path.events.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i)
    path.events.push_back({times[i], model.law().sample(size_stream)});
  return path;
}

JumpPath sample_subordinated(const LevyModel& model, double horizon,
                             const PathRng& rng, const TimeGrid* grid_hint) {
  TimeGrid grid;
  if (grid_hint) {
    grid = *grid_hint;
    grid.validate();
    if (grid.horizon() < horizon)
      throw GridError("sample_jump_path: grid shorter than horizon");
  } else {
    const int steps = std::max(
        1, static_cast<int>(std::ceil(horizon *
                                      model.default_steps_per_unit())));
    grid = TimeGrid::uniform(horizon, steps);
  }
  const double m = model.intensity();
  RandomStream sub = rng.stream(Substream::kSubordinator);
  RandomStream size = rng.stream(Substream::kJumpSize);
  JumpPath path;
  path.horizon = horizon;
  path.events.reserve(grid.cells());
  for (std::size_t k = 0; k + 1 < grid.times.size(); ++k) {
    if (grid.times[k] >= horizon) break;
    const double t1 = std::min(grid.times[k + 1], horizon);
    const double dt = t1 - grid.times[k];
    // Gamma subordinator increment with E = dt, Var = dt/m.
    const double dg = sub.next_gamma(m * dt) / m;
    Vec x;
    switch (model.kind()) {
      case LevyKind::kGamma:
        x = {dg};
        break;
      case LevyKind::kVarianceGamma:
        x = {std::sqrt(dg) * size.next_normal()};
        break;
      case LevyKind::kTwoDimVarianceGamma:
        x = {std::sqrt(dg) * size.next_normal(),
             std::sqrt(dg) * size.next_normal()};
        break;
      default:
        throw ConfigError("sample_jump_path: unexpected kind");
    }
    if (norm2(x) > 0.0) path.events.push_back({t1, x});
  }
  return path;
}

JumpPath sample_custom(double horizon, const PathRng& rng,
                       const LevyModel::CustomData& data) {
  JumpPath path;
  path.horizon = horizon;
  path.truncation_radius = data.eps;
  RandomStream count_stream = rng.stream(Substream::kJumpCount);
  const double mass = data.total_mass();
  const std::uint64_t n = count_stream.next_poisson(mass * horizon);
  if (n == 0) return path;
  RandomStream time_stream = rng.stream(Substream::kJumpTime);
  RandomStream size_stream = rng.stream(Substream::kJumpSize);
  std::vector<double> times(n);
  for (auto& t : times) t = horizon * time_stream.next_uniform();
  std::sort(times.begin(), times.end());
  path.events.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const double u = mass * size_stream.next_uniform();
    double x;
    if (u <= data.pos.mass) {
      auto f = [&](double a) { return data.density(a); };
      x = invert_side(data.pos, f, u);
    } else {
      auto f = [&](double a) { return data.density(-a); };
      x = -invert_side(data.neg, f, u - data.pos.mass);
    }
    path.events.push_back({times[i], {x}});
  }
  return path;
}

}  // namespace

JumpPath LevyModel::sample_path(double horizon, const PathRng& rng,
                                const TimeGrid* grid_hint) const {
  if (!(horizon > 0.0))
    throw GridError("sample_jump_path: horizon must be > 0");
  switch (kind_) {
    case LevyKind::kCompoundPoisson:
      return sample_compound_poisson(*this, horizon, rng);
    case LevyKind::kGamma:
    case LevyKind::kVarianceGamma:
    case LevyKind::kTwoDimVarianceGamma:
      return sample_subordinated(*this, horizon, rng, grid_hint);
    case LevyKind::kCustom:
      return sample_custom(horizon, rng, *custom_);
  }
  throw ConfigError("sample_jump_path: unknown kind");
}

double levy_exponent(const LevyModel& model, const Vec& arg) {
  return model.levy_exponent(arg);
}

JumpPath sample_jump_path(const LevyModel& model, double horizon,
                          const PathRng& rng, const TimeGrid* grid_hint) {
  return model.sample_path(horizon, rng, grid_hint);
}

}  // namespace levyito
