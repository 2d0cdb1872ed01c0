#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "levyito/jump_law.hpp"
#include "levyito/jump_path.hpp"
#include "levyito/quadrature.hpp"
#include "levyito/rng.hpp"
#include "levyito/time_grid.hpp"
#include "levyito/vecmath.hpp"

namespace levyito {

enum class LevyKind {
  kCompoundPoisson,
  kGamma,
  kVarianceGamma,
  kTwoDimVarianceGamma,
  kCustom,
};

// A Levy measure nu(dx) on R^n \ {0} together with its sampling scheme and
// cumulant machinery. The Levy exponent follows each kind's natural centering:
// compound Poisson and gamma are uncompensated (psi(a) = (1/t) log E exp(a.X_t)
// of the raw jump sum / subordinator), variance gamma is centered by
// construction, and Custom uses the fully compensated convention
// psi(a) = int (e^{a.x} - 1 - a.x) nu(dx).
class LevyModel {
 public:
  struct CustomData;  // sampling tables for Custom measures, defined in-source

  static LevyModel compound_poisson(double intensity, JumpLaw law);
  static LevyModel gamma_subordinator(double intensity);
  static LevyModel variance_gamma(double intensity);
  static LevyModel two_dim_variance_gamma(double intensity);
  // One-dimensional Levy density, infinite activity allowed away from 0.
  // Marks with |x| <= eps are dropped at the source (their compensator mass is
  // still carried by integrate_measure). eps <= 0 selects the default radius,
  // the largest eps with truncated variance <= 1e-6 of the variance inside the
  // unit shell.
  static LevyModel custom(std::function<double(double)> density, double eps);

  LevyKind kind() const { return kind_; }
  int dimension() const { return dim_; }
  double intensity() const { return intensity_; }
  double truncation_radius() const { return eps_; }
  // Subordination cells per unit time used when no grid hint is supplied
  // (gamma / variance-gamma kinds).
  int default_steps_per_unit() const { return steps_per_unit_; }
  void set_default_steps_per_unit(int steps);

  double levy_exponent(const Vec& arg) const;
  bool in_exponent_domain(const Vec& arg) const;

  // int f(x) nu(dx) over the given shell, by atom summation or adaptive
  // quadrature. The integrand must keep the product f * density integrable
  // (QuadratureError otherwise).
  double integrate_measure(const std::function<double(const Vec&)>& f,
                           Shell shell = Shell::kAll,
                           const QuadratureOptions& opts = {}) const;

  JumpPath sample_path(double horizon, const PathRng& rng,
                       const TimeGrid* grid_hint = nullptr) const;

  const JumpLaw& law() const;

 private:
  LevyModel() = default;
  LevyKind kind_ = LevyKind::kCompoundPoisson;
  int dim_ = 1;
  double intensity_ = 0.0;
  double eps_ = 0.0;
  int steps_per_unit_ = 64;
  std::optional<JumpLaw> law_;
  std::shared_ptr<const CustomData> custom_;
};

double levy_exponent(const LevyModel& model, const Vec& arg);
JumpPath sample_jump_path(const LevyModel& model, double horizon,
                          const PathRng& rng,
                          const TimeGrid* grid_hint = nullptr);

}  // namespace levyito
