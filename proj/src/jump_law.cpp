#include "levyito/jump_law.hpp"

#include <algorithm>
#include <cmath>

#include "levyito/errors.hpp"

namespace levyito {

JumpLaw JumpLaw::atoms(std::vector<std::pair<Vec, double>> points) {
  if (points.empty()) throw ConfigError("JumpLaw::atoms: no atoms");
  JumpLaw law;
  law.discrete_ = true;
  law.dim_ = static_cast<int>(points.front().first.size());
  double mass = 0.0;
  for (const auto& [x, p] : points) {
    if (static_cast<int>(x.size()) != law.dim_)
      throw ConfigError("JumpLaw::atoms: inconsistent dimensions");
    if (norm2(x) == 0.0) throw ConfigError("JumpLaw::atoms: atom at origin");
    if (!(p > 0.0)) throw ConfigError("JumpLaw::atoms: nonpositive weight");
    mass += p;
  }
  if (std::abs(mass - 1.0) > 1e-12)
    throw ConfigError("JumpLaw::atoms: probabilities must sum to 1");
  law.atoms_ = std::move(points);
  return law;
}

JumpLaw JumpLaw::gaussian1d(double mean, double sd) {
  if (!(sd > 0.0)) throw ConfigError("JumpLaw::gaussian1d: sd must be > 0");
  JumpLaw law;
  law.dim_ = 1;
  law.mean_ = {mean};
  law.sd_ = {sd};
  return law;
}

JumpLaw JumpLaw::gaussian2d(const Vec& mean, const Vec& sd, double rho) {
  if (mean.size() != 2 || sd.size() != 2)
    throw ConfigError("JumpLaw::gaussian2d: mean and sd must have size 2");
  if (!(sd[0] > 0.0) || !(sd[1] > 0.0) || !(std::abs(rho) < 1.0))
    throw ConfigError("JumpLaw::gaussian2d: need sd > 0 and |rho| < 1");
  JumpLaw law;
  law.dim_ = 2;
  law.mean_ = mean;
  law.sd_ = sd;
  law.rho_ = rho;
  return law;
}

double JumpLaw::mgf(const Vec& a) const {
  if (static_cast<int>(a.size()) != dim_)
    throw DomainError("JumpLaw::mgf: argument dimension mismatch");
  if (discrete_) {
    double s = 0.0;
    for (const auto& [x, p] : atoms_) s += p * std::exp(dot(a, x));
    return s;
  }
  if (dim_ == 1)
    return std::exp(a[0] * mean_[0] + 0.5 * a[0] * a[0] * sd_[0] * sd_[0]);
  const double q = 0.5 * (a[0] * a[0] * sd_[0] * sd_[0] +
                          a[1] * a[1] * sd_[1] * sd_[1]) +
                   a[0] * a[1] * sd_[0] * sd_[1] * rho_;
  return std::exp(a[0] * mean_[0] + a[1] * mean_[1] + q);
}

namespace {

double phi1(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
}

// Equally spaced interior breakpoints splitting [0, 2pi] into at least
// ceil(intervals) pieces (clamped to [8, 512]); see the angular seeding note
// at the use site.
std::vector<double> angular_seed(double intervals) {
  const int n = std::clamp(static_cast<int>(std::ceil(intervals)), 8, 512);
  std::vector<double> b;
  b.reserve(n - 1);
  for (int k = 1; k < n; ++k) b.push_back(2.0 * M_PI * k / n);
  return b;
}

}  // namespace

double JumpLaw::expectation(const std::function<double(const Vec&)>& f,
                            Shell shell, const QuadratureOptions& opts) const {
  if (discrete_) {
    double s = 0.0;
    for (const auto& [x, p] : atoms_)
      if (in_shell(x, shell)) s += p * f(x);
    return s;
  }
  if (dim_ == 1) {
    const double mu = mean_[0], sd = sd_[0];
    auto g = [&](double x) {
      Vec v{x};
      return f(v) * phi1((x - mu) / sd) / sd;
    };
    const double lo = mu - 14.0 * sd, hi = mu + 14.0 * sd;
    switch (shell) {
      case Shell::kAll:
        return integrate_interval(g, lo, hi, {-1.0, 0.0, 1.0}, opts);
      case Shell::kInner:
        return integrate_interval(g, std::max(lo, -1.0), std::min(hi, 1.0),
                                  {0.0}, opts);
      case Shell::kOuter:
        return integrate_interval(g, lo, std::min(hi, -1.0), {}, opts) +
               integrate_interval(g, std::max(lo, 1.0), hi, {}, opts);
    }
  }
  // Bivariate Gaussian in polar coordinates around the origin, so the unit
  // shell is a radial breakpoint and shell restrictions stay exact.
  const double det = sd_[0] * sd_[1] * std::sqrt(1.0 - rho_ * rho_);
  const double inv00 = 1.0 / (sd_[0] * sd_[0] * (1.0 - rho_ * rho_));
  const double inv11 = 1.0 / (sd_[1] * sd_[1] * (1.0 - rho_ * rho_));
  const double inv01 = -rho_ / (sd_[0] * sd_[1] * (1.0 - rho_ * rho_));
  auto density = [&](const Vec& x) {
    const double d0 = x[0] - mean_[0], d1 = x[1] - mean_[1];
    const double q = inv00 * d0 * d0 + 2.0 * inv01 * d0 * d1 + inv11 * d1 * d1;
    return std::exp(-0.5 * q) / (2.0 * M_PI * det);
  };
  const QuadratureOptions inner = nested_inner(opts);
  // The Gaussian factor confines the mass to |x - mean| <~ 14 sd, so angular
  // features of f * density on the radius-r circle live on scales no finer
  // than ~ sd_min / r; seed the angular grid accordingly, as a lone
  // Gauss-Kronrod pass over the circle can step over a narrow lobe without
  // noticing it.
  const double sd_min =
      std::min(sd_[0], sd_[1]) * std::sqrt(1.0 - rho_ * rho_);
  auto ring = [&](double r) {
    auto h = [&](double th) {
      Vec x{r * std::cos(th), r * std::sin(th)};
      return f(x) * density(x);
    };
    // The angular result is multiplied by r afterwards, so its absolute
    // error budget is the ring budget divided by r. Where the true angular
    // integral is dominated by cancelling exponential lobes, a fixed
    // tolerance can sit below the cancellation noise floor; the scaled
    // budget cannot, because the lobes already carry the Gaussian decay.
    QuadratureOptions ang = inner;
    ang.abs_tol = std::max(ang.abs_tol, 1e-3 * opts.abs_tol / std::max(r, 1e-6));
    return r * integrate_interval(h, 0.0, 2.0 * M_PI,
                                  angular_seed(3.5 * r / sd_min), ang);
  };
  const double rmax =
      norm(mean_) + 14.0 * std::max(sd_[0], sd_[1]);
  switch (shell) {
    case Shell::kAll:
      return integrate_interval(ring, 0.0, rmax, {1.0}, opts);
    case Shell::kInner:
      return integrate(ring, 0.0, std::min(1.0, rmax), opts);
    case Shell::kOuter:
      return rmax > 1.0 ? integrate(ring, 1.0, rmax, opts) : 0.0;
  }
  throw DomainError("JumpLaw::expectation: unreachable");
}

Vec JumpLaw::sample(RandomStream& rng) const {
  if (discrete_) {
    double u = rng.next_uniform();
    for (const auto& [x, p] : atoms_) {
      if (u <= p) return x;
      u -= p;
    }
    return atoms_.back().first;
  }
  if (dim_ == 1) return {mean_[0] + sd_[0] * rng.next_normal()};
  const double z0 = rng.next_normal(), z1 = rng.next_normal();
  return {mean_[0] + sd_[0] * z0,
          mean_[1] + sd_[1] * (rho_ * z0 + std::sqrt(1.0 - rho_ * rho_) * z1)};
}

}  // namespace levyito
