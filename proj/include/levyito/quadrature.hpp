#pragma once

#include <functional>
#include <vector>

namespace levyito {

using Fn1 = std::function<double(double)>;

struct QuadratureOptions {
  double abs_tol = 1e-10;
  double rel_tol = 1e-8;
  int max_intervals = 20000;
};

// Adaptive Gauss-Kronrod (G7,K15) on a finite interval. Worst-interval-first
// refinement until the summed error estimate meets max(abs_tol, rel_tol*|I|).
// Endpoints are never evaluated, so integrable endpoint singularities are fine.
double integrate(const Fn1& f, double a, double b,
                 const QuadratureOptions& opts = {});

// Integral over [a, +inf) via x = a + u/(1-u).
double integrate_half_line(const Fn1& f, double a,
                           const QuadratureOptions& opts = {});

// Integral over (-inf, b] via mirroring onto a half line.
double integrate_half_line_down(const Fn1& f, double b,
                                const QuadratureOptions& opts = {});

// Integral over [a, b] where either bound may be infinite. Interior
// breakpoints force subdivision boundaries (put known kinks/discontinuities
// there).
double integrate_interval(const Fn1& f, double a, double b,
                          const std::vector<double>& breakpoints = {},
                          const QuadratureOptions& opts = {});

// Tolerances for the inner layer of an iterated integral: three decades
// tighter than the outer ones, floored near machine precision. Running both
// layers at the same tolerance lets the outer pass refine against the inner
// pass's quadrature noise, accumulating noise-level error estimates without
// bound instead of converging.
QuadratureOptions nested_inner(const QuadratureOptions& outer);

// Cumulative integral t -> int_a^t f(s) ds of a deterministic rate, built once
// by adaptive Simpson and then evaluated at arbitrary points inside [a, b].
// Partial cells are closed with a 7-point Gauss rule on the already-converged
// partition, so eval() error stays at the build tolerance.
class CumulativeFunction {
 public:
  CumulativeFunction() = default;
  CumulativeFunction(Fn1 f, double a, double b,
                     const QuadratureOptions& opts = {});

  double eval(double t) const;                   // int_a^t
  double between(double t0, double t1) const;    // int_t0^t1
  double total() const;
  double lower() const { return a_; }
  double upper() const { return b_; }

 private:
  Fn1 f_;
  double a_ = 0.0, b_ = 0.0;
  std::vector<double> nodes_;  // partition a = n_0 < ... < n_k = b
  std::vector<double> cum_;    // cum_[i] = int_a^{n_i}
};

// CumulativeFunction wrapper with values cached at a fixed set of times.
// Simulation loops evaluate cumulative drifts mostly at grid points; priming
// once before the path loop turns those lookups into binary searches while
// off-grid times (inserted jump times) still get exact evaluation.
class PrimedCumulative {
 public:
  PrimedCumulative() = default;
  explicit PrimedCumulative(CumulativeFunction fn) : fn_(std::move(fn)) {}

  void prime(const std::vector<double>& times);
  double at(double t) const;
  double between(double t0, double t1) const { return at(t1) - at(t0); }

 private:
  CumulativeFunction fn_;
  std::vector<double> times_;
  std::vector<double> cum_;
};

}  // namespace levyito
