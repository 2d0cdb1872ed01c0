#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "levyito/quadrature.hpp"
#include "levyito/rng.hpp"
#include "levyito/vecmath.hpp"

namespace levyito {

// Region of jump space relative to the unit shell |x| = 1. Inner marks enter
// compensated integrals, outer marks enter raw ones.
enum class Shell { kAll, kInner, kOuter };

inline bool in_shell(const Vec& x, Shell s) {
  if (s == Shell::kAll) return true;
  const bool inner = norm2(x) < 1.0;
  return s == Shell::kInner ? inner : !inner;
}

// Mark distribution of a compound Poisson model: either finitely many atoms or
// a (possibly bivariate) Gaussian.
class JumpLaw {
 public:
  static JumpLaw atoms(std::vector<std::pair<Vec, double>> points);
  static JumpLaw gaussian1d(double mean, double sd);
  static JumpLaw gaussian2d(const Vec& mean, const Vec& sd, double rho);

  int dimension() const { return dim_; }
  // E[exp(a . X)]
  double mgf(const Vec& a) const;
  // E[f(X) 1{X in shell}]
  double expectation(const std::function<double(const Vec&)>& f, Shell shell,
                     const QuadratureOptions& opts = {}) const;
  Vec sample(RandomStream& rng) const;

  bool is_discrete() const { return discrete_; }
  const std::vector<std::pair<Vec, double>>& atom_list() const {
    return atoms_;
  }

 private:
  JumpLaw() = default;
  bool discrete_ = false;
  int dim_ = 1;
  std::vector<std::pair<Vec, double>> atoms_;
  Vec mean_, sd_;
  double rho_ = 0.0;
};

}  // namespace levyito
