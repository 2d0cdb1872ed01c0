#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace levyito {

// Verdict of one check: `observed` is the discrepancy (or statistic) that was
// held to `bound`. `detail` spells out the quantity being compared.
struct CheckResult {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double bound = 0.0;
  std::string detail;
};

struct CheckSuite {
  std::string name;
  std::vector<CheckResult> results;
  bool all_passed() const;
};

// Monte Carlo estimates of E[exp(int int f dN~)] against the deterministic
// exponential-formula value for five bundled (model, integrand) pairs, each
// within 3 standard errors.
CheckSuite check_exponential_formula(std::uint64_t seed, int n_paths);

// E[pi_t B_t] = 1 at t in {0.5, 1, 2} for a compound-Poisson preset with a
// Brownian sector and for a variance-gamma preset, each within 3 standard
// errors.
CheckSuite check_kernel_martingale(std::uint64_t seed, int n_paths);

// Deflated asset price: E[pi_T S_T] = S_0 within 3 standard errors, and the
// pathwise drift regression recovers the quadrature excess rate of return
// within 3 standard errors.
CheckSuite check_deflated_asset(std::uint64_t seed, int n_paths);

// Exchange-rate identities on a three-currency jump system: reciprocal and
// triangle identities pathwise at 1e-12, direct-form versus kernel-ratio
// construction at 1e-10, quadrature excess returns against the
// exponent-combination closed form at 1e-8, and the four analytic Siegel
// constructions (equal-length Brownian vectors, iid copies, bivariate
// Gaussian marks, two-dimensional variance gamma) at their closed-form
// values.
CheckSuite check_fx_identities(std::uint64_t seed, int n_paths);

}  // namespace levyito
