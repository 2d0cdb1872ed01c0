#include "levyito/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "levyito/errors.hpp"

namespace levyito {

namespace {

// Nodes and weights of the 15-point Kronrod rule with embedded 7-point Gauss
// rule on [-1, 1] (QUADPACK dqk15 values).
constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119,
    0.417959183673469};

struct CellEstimate {
  double integral;
  double error;
  double abs_integral;  // Kronrod estimate of the integral of |f|.
};

CellEstimate gk15(const Fn1& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double res_g = fc * kWg[3];
  double res_k = fc * kWgk[7];
  double res_abs = std::abs(fc) * kWgk[7];
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double fa = f(c - x), fb = f(c + x);
    const double fsum = fa + fb;
    res_k += kWgk[j] * fsum;
    res_abs += kWgk[j] * (std::abs(fa) + std::abs(fb));
    if (j % 2 == 1) res_g += kWg[j / 2] * fsum;
  }
  res_k *= h;
  res_g *= h;
  res_abs *= h;
  return {res_k, std::abs(res_k - res_g), res_abs};
}

struct HeapCell {
  double error;
  double a, b;
  double integral;
  bool operator<(const HeapCell& o) const { return error < o.error; }
};

double adaptive(const Fn1& f, double a, double b,
                const std::vector<double>& breakpoints,
                const QuadratureOptions& opts) {
  if (!(a < b)) {
    if (a == b) return 0.0;
    throw QuadratureError("integrate: empty or reversed interval");
  }
  std::priority_queue<HeapCell> heap;
  double total = 0.0, err = 0.0;
  auto push = [&](double lo, double hi) {
    CellEstimate e = gk15(f, lo, hi);
    if (!std::isfinite(e.integral))
      throw QuadratureError("integrate: non-finite integrand values");
    // A Gauss/Kronrod discrepancy at or below ~50 eps of the integral of |f|
    // is rounding noise, not discretisation error: the cell is as converged
    // as double precision allows, and splitting it only multiplies the
    // number of noise-level terms in the running error sum. Count such
    // cells as final with zero refinable error.
    const double noise_floor =
        50.0 * std::numeric_limits<double>::epsilon() * e.abs_integral;
    const double refinable = e.error <= noise_floor ? 0.0 : e.error;
    heap.push({refinable, lo, hi, e.integral});
    total += e.integral;
    err += refinable;
  };

  std::vector<double> pts{a};
  for (double p : breakpoints)
    if (p > a && p < b) pts.push_back(p);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) push(pts[i], pts[i + 1]);

  const double width_floor = (b - a) * 1e-14;
  int n = static_cast<int>(heap.size());
  while (err > std::max(opts.abs_tol, opts.rel_tol * std::abs(total))) {
    if (n >= opts.max_intervals) {
      if (err > 1e3 * std::max(opts.abs_tol, opts.rel_tol * std::abs(total)))
        throw QuadratureError("integrate: failed to converge");
      break;
    }
    HeapCell worst = heap.top();
    heap.pop();
    if (worst.error <= 0.0) {
      // Every remaining cell is final (noise floor or width floor); the
      // refinable error is exhausted and the loop cannot make progress.
      heap.push(worst);
      break;
    }
    if (worst.b - worst.a < width_floor) {
      // Cannot refine further in double precision; accept this cell.
      err -= worst.error;
      heap.push({0.0, worst.a, worst.b, worst.integral});
      continue;
    }
    total -= worst.integral;
    err -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    push(worst.a, mid);
    push(mid, worst.b);
    ++n;
  }
  // Re-sum in interval order for a reproducible, cancellation-friendly total.
  std::vector<HeapCell> cells;
  cells.reserve(heap.size());
  while (!heap.empty()) {
    cells.push_back(heap.top());
    heap.pop();
  }
  std::sort(cells.begin(), cells.end(),
            [](const HeapCell& x, const HeapCell& y) { return x.a < y.a; });
  double sum = 0.0, comp = 0.0;
  for (const auto& cell : cells) {
    const double y = cell.integral - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum;
}

}  // namespace

double integrate(const Fn1& f, double a, double b,
                 const QuadratureOptions& opts) {
  return adaptive(f, a, b, {}, opts);
}

double integrate_half_line(const Fn1& f, double a,
                           const QuadratureOptions& opts) {
  auto g = [&f, a](double u) {
    const double om = 1.0 - u;
    const double x = a + u / om;
    return f(x) / (om * om);
  };
  return adaptive(g, 0.0, 1.0, {}, opts);
}

double integrate_half_line_down(const Fn1& f, double b,
                                const QuadratureOptions& opts) {
  return integrate_half_line([&f, b](double x) { return f(b - x); }, 0.0,
                             opts);
}

double integrate_interval(const Fn1& f, double a, double b,
                          const std::vector<double>& breakpoints,
                          const QuadratureOptions& opts) {
  const bool lo_inf = std::isinf(a), hi_inf = std::isinf(b);
  if (!lo_inf && !hi_inf) return adaptive(f, a, b, breakpoints, opts);
  if (lo_inf && hi_inf) {
    double lower =
        integrate_half_line([&f](double x) { return f(-x); }, 0.0, opts);
    double upper = integrate_half_line(f, 0.0, opts);
    return lower + upper;
  }
  if (hi_inf) {
    double head = 0.0, tail_from = a;
    if (!breakpoints.empty()) {
      double last = *std::max_element(breakpoints.begin(), breakpoints.end());
      if (last > a) {
        head = adaptive(f, a, last, breakpoints, opts);
        tail_from = last;
      }
    }
    return head + integrate_half_line(f, tail_from, opts);
  }
  // a = -inf, b finite: mirror.
  return integrate_interval([&f, b](double x) { return f(b - x); }, 0.0,
                            std::numeric_limits<double>::infinity(), {}, opts);
}

QuadratureOptions nested_inner(const QuadratureOptions& outer) {
  QuadratureOptions inner = outer;
  inner.abs_tol = std::max(outer.abs_tol * 1e-3, 5e-16);
  inner.rel_tol = std::max(outer.rel_tol * 1e-3, 1e-14);
  return inner;
}

namespace {

double simpson(double fa, double fm, double fb, double h) {
  return h / 6.0 * (fa + 4.0 * fm + fb);
}

void build_cells(const Fn1& f, double a, double b, double fa, double fm,
                 double fb, double whole, double tol, int depth,
                 std::vector<double>& nodes, std::vector<double>& vals) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = simpson(fa, flm, fm, m - a);
  const double right = simpson(fm, frm, fb, b - m);
  const double delta = left + right - whole;
  if (depth > 0 && std::abs(delta) > 15.0 * tol && (b - a) > 1e-13 * depth) {
    build_cells(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, nodes, vals);
    build_cells(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, nodes, vals);
    return;
  }
  nodes.push_back(b);
  vals.push_back(left + right + delta / 15.0);
}

// 7-point Gauss-Legendre, for partial cells of an already-converged partition.
constexpr double kGl7X[7] = {-0.949107912342759, -0.741531185599394,
                             -0.405845151377397, 0.0,
                             0.405845151377397,  0.741531185599394,
                             0.949107912342759};
constexpr double kGl7W[7] = {0.129484966168870, 0.279705391489277,
                             0.381830050505119, 0.417959183673469,
                             0.381830050505119, 0.279705391489277,
                             0.129484966168870};

double gauss7(const Fn1& f, double a, double b) {
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 7; ++i) s += kGl7W[i] * f(c + h * kGl7X[i]);
  return s * h;
}

}  // namespace

CumulativeFunction::CumulativeFunction(Fn1 f, double a, double b,
                                       const QuadratureOptions& opts)
    : f_(std::move(f)), a_(a), b_(b) {
  if (!(b >= a)) throw QuadratureError("CumulativeFunction: b < a");
  nodes_.push_back(a);
  cum_.push_back(0.0);
  if (b == a) return;
  const double fa = f_(a), fb = f_(b), fm = f_(0.5 * (a + b));
  std::vector<double> ends, vals;
  build_cells(f_, a, b, fa, fm, fb, simpson(fa, fm, fb, b - a),
              std::max(opts.abs_tol, 1e-14), 48, ends, vals);
  double acc = 0.0;
  for (std::size_t i = 0; i < ends.size(); ++i) {
    acc += vals[i];
    nodes_.push_back(ends[i]);
    cum_.push_back(acc);
  }
}

double CumulativeFunction::eval(double t) const {
  if (nodes_.size() <= 1) return 0.0;
  if (t <= a_) return 0.0;
  if (t >= b_) return cum_.back();
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - nodes_.begin());
  std::size_t lo = hi - 1;
  if (t == nodes_[lo]) return cum_[lo];
  return cum_[lo] + gauss7(f_, nodes_[lo], t);
}

double CumulativeFunction::between(double t0, double t1) const {
  return eval(t1) - eval(t0);
}

double CumulativeFunction::total() const {
  return nodes_.size() <= 1 ? 0.0 : cum_.back();
}

void PrimedCumulative::prime(const std::vector<double>& times) {
  times_ = times;
  std::sort(times_.begin(), times_.end());
  times_.erase(std::unique(times_.begin(), times_.end()), times_.end());
  cum_.resize(times_.size());
  for (std::size_t i = 0; i < times_.size(); ++i) cum_[i] = fn_.eval(times_[i]);
}

double PrimedCumulative::at(double t) const {
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it != times_.end() && *it == t)
    return cum_[static_cast<std::size_t>(it - times_.begin())];
  return fn_.eval(t);
}

}  // namespace levyito
