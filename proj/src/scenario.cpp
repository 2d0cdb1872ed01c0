#include "levyito/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "levyito/errors.hpp"
#include "levyito/fx.hpp"
#include "levyito/jump_law.hpp"
#include "levyito/levy_model.hpp"
#include "levyito/mc_engine.hpp"
#include "levyito/pricing_kernel.hpp"
#include "levyito/rates_chaos.hpp"
#include "levyito/rates_vasicek.hpp"
#include "levyito/validation.hpp"
#include "levyito/yield_curve.hpp"

namespace levyito {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// JSON access with schema enforcement. Every helper carries a `where` label so
// rejection messages point at the offending section.

void reject_unknown(const json& obj, const std::string& where,
                    std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed)
      if (it.key() == key) {
        known = true;
        break;
      }
    if (!known)
      throw ConfigError("config: unknown key \"" + it.key() + "\" in " +
                        where);
  }
}

const json& require_section(const json& obj, const std::string& where,
                            const char* key) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ConfigError("config: missing required section \"" +
                      std::string(key) + "\" in " + where);
  if (!it->is_object())
    throw ConfigError("config: \"" + std::string(key) + "\" in " + where +
                      " must be an object");
  return *it;
}

double get_number(const json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ConfigError("config: missing required number \"" + std::string(key) +
                      "\" in " + where);
  if (!it->is_number())
    throw ConfigError("config: \"" + std::string(key) + "\" in " + where +
                      " must be a number");
  return it->get<double>();
}

double get_number_or(const json& obj, const std::string& where,
                     const char* key, double fallback) {
  if (obj.find(key) == obj.end()) return fallback;
  return get_number(obj, where, key);
}

std::int64_t get_integer(const json& obj, const std::string& where,
                         const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_integer())
    throw ConfigError("config: \"" + std::string(key) + "\" in " + where +
                      " must be an integer");
  return it->get<std::int64_t>();
}

std::string get_string(const json& obj, const std::string& where,
                       const char* key) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ConfigError("config: missing required string \"" + std::string(key) +
                      "\" in " + where);
  if (!it->is_string())
    throw ConfigError("config: \"" + std::string(key) + "\" in " + where +
                      " must be a string");
  return it->get<std::string>();
}

Vec get_vector(const json& obj, const std::string& where, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) return {};
  if (!it->is_array())
    throw ConfigError("config: \"" + std::string(key) + "\" in " + where +
                      " must be an array of numbers");
  Vec out;
  out.reserve(it->size());
  for (const json& v : *it) {
    if (!v.is_number())
      throw ConfigError("config: \"" + std::string(key) + "\" in " + where +
                        " must contain numbers only");
    out.push_back(v.get<double>());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Model construction.

JumpLaw parse_law(const json& obj) {
  const std::string where = "model.law";
  const std::string kind = get_string(obj, where, "kind");
  if (kind == "gaussian1d") {
    reject_unknown(obj, where, {"kind", "mean", "sd"});
    return JumpLaw::gaussian1d(get_number_or(obj, where, "mean", 0.0),
                               get_number(obj, where, "sd"));
  }
  if (kind == "gaussian2d") {
    reject_unknown(obj, where, {"kind", "mean", "sd", "rho"});
    Vec mean = get_vector(obj, where, "mean");
    if (mean.empty()) mean = {0.0, 0.0};
    const Vec sd = get_vector(obj, where, "sd");
    if (mean.size() != 2 || sd.size() != 2)
      throw ConfigError(
          "config: gaussian2d law needs 2-entry \"mean\" and \"sd\" arrays");
    return JumpLaw::gaussian2d(mean, sd, get_number_or(obj, where, "rho", 0.0));
  }
  if (kind == "atoms") {
    reject_unknown(obj, where, {"kind", "points", "weights"});
    auto pts = obj.find("points");
    auto wts = obj.find("weights");
    if (pts == obj.end() || !pts->is_array() || wts == obj.end() ||
        !wts->is_array() || pts->size() != wts->size() || pts->empty())
      throw ConfigError(
          "config: atoms law needs equal-length \"points\" and \"weights\" "
          "arrays");
    std::vector<std::pair<Vec, double>> atoms;
    for (std::size_t i = 0; i < pts->size(); ++i) {
      const json& p = (*pts)[i];
      if (!p.is_array())
        throw ConfigError("config: atoms law points must be arrays");
      Vec x;
      for (const json& c : p) {
        if (!c.is_number())
          throw ConfigError("config: atoms law points must hold numbers");
        x.push_back(c.get<double>());
      }
      if (!(*wts)[i].is_number())
        throw ConfigError("config: atoms law weights must be numbers");
      atoms.emplace_back(std::move(x), (*wts)[i].get<double>());
    }
    return JumpLaw::atoms(std::move(atoms));
  }
  throw ConfigError("config: unknown jump law kind \"" + kind + "\"");
}

LevyModel parse_model(const json& root) {
  const json& obj = require_section(root, "top level", "model");
  const std::string kind = get_string(obj, "model", "kind");
  if (kind == "compound_poisson") {
    reject_unknown(obj, "model", {"kind", "intensity", "law"});
    return LevyModel::compound_poisson(
        get_number(obj, "model", "intensity"),
        parse_law(require_section(obj, "model", "law")));
  }
  reject_unknown(obj, "model", {"kind", "intensity"});
  const double intensity = get_number(obj, "model", "intensity");
  if (kind == "gamma") return LevyModel::gamma_subordinator(intensity);
  if (kind == "variance_gamma") return LevyModel::variance_gamma(intensity);
  if (kind == "two_dim_variance_gamma")
    return LevyModel::two_dim_variance_gamma(intensity);
  throw ConfigError("config: unknown model kind \"" + kind + "\"");
}

// ---------------------------------------------------------------------------
// Monte Carlo section and seed precedence.

struct McSection {
  McConfig config;
  double horizon = 1.0;
  int steps = 8;
};

McSection parse_mc(const json& root, const ScenarioOverrides& ovr) {
  McSection out;
  std::uint64_t seed = ovr.env_seed.value_or(0);
  auto it = root.find("mc");
  if (it != root.end()) {
    const json& mc = *it;
    if (!mc.is_object())
      throw ConfigError("config: \"mc\" must be an object");
    reject_unknown(mc, "mc", {"seed", "paths", "workers", "grid"});
    if (mc.contains("seed")) {
      const std::int64_t s = get_integer(mc, "mc", "seed");
      if (s < 0) throw ConfigError("config: mc.seed must be non-negative");
      seed = static_cast<std::uint64_t>(s);
    }
    if (mc.contains("paths")) {
      const std::int64_t p = get_integer(mc, "mc", "paths");
      if (p <= 0 || p > std::numeric_limits<int>::max())
        throw ConfigError("config: mc.paths must be a positive 32-bit count");
      out.config.n_paths = static_cast<int>(p);
    }
    if (mc.contains("workers")) {
      const std::int64_t w = get_integer(mc, "mc", "workers");
      if (w < 0) throw ConfigError("config: mc.workers must be >= 0");
      out.config.worker_hint = static_cast<int>(w);
    }
    if (mc.contains("grid")) {
      const json& grid = require_section(mc, "mc", "grid");
      reject_unknown(grid, "mc.grid", {"horizon", "steps"});
      out.horizon = get_number(grid, "mc.grid", "horizon");
      if (!(out.horizon > 0.0))
        throw ConfigError("config: mc.grid.horizon must be positive");
      const std::int64_t steps = get_integer(grid, "mc.grid", "steps");
      if (steps <= 0 || steps > 100000)
        throw ConfigError("config: mc.grid.steps must be in [1, 100000]");
      out.steps = static_cast<int>(steps);
    }
  }
  if (ovr.seed) seed = *ovr.seed;
  if (ovr.paths) {
    if (*ovr.paths <= 0) throw ConfigError("config: --paths must be positive");
    out.config.n_paths = *ovr.paths;
  }
  out.config.master_seed = seed;
  return out;
}

// ---------------------------------------------------------------------------
// Linear loadings shared by several sections: constant Brownian rows and
// linear jump forms a . x.

VecTimeFn constant_loading(Vec v) {
  if (v.empty()) return {};
  return [v = std::move(v)](double) { return v; };
}

SpaceTimeFn linear_form(Vec a) {
  if (a.empty()) return {};
  return [a = std::move(a)](const Vec& x, double) {
    double s = 0.0;
    const std::size_t n = std::min(a.size(), x.size());
    for (std::size_t i = 0; i < n; ++i) s += a[i] * x[i];
    return s;
  };
}

void require_dimension(const Vec& load, const LevyModel& model,
                       const std::string& where) {
  if (!load.empty() && load.size() != static_cast<std::size_t>(model.dimension()))
    throw ConfigError("config: " + where + " must have one entry per mark "
                      "dimension (" + std::to_string(model.dimension()) + ")");
}

// ---------------------------------------------------------------------------
// CSV emission: one header row, fixed column order, 17 significant digits.

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& header) : path_(path) {
    out_.open(path, std::ios::binary | std::ios::trunc);
    if (!out_)
      throw DataError("cannot open output file " + path.string() +
                      " for writing");
    out_ << header << "\n";
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ",";
      out_ << cells[i];
    }
    out_ << "\n";
  }

  std::string close() {
    out_.close();
    if (!out_) throw DataError("failed writing " + path_.string());
    return path_.string();
  }

 private:
  fs::path path_;
  std::ofstream out_;
};

std::string pass_fail(bool ok) { return ok ? "PASS" : "FAIL"; }

bool agrees(double diff, double three_se, double scale) {
  // Statistical agreement, with an epsilon floor so exact (zero-variance)
  // estimators are not failed on formula-vs-formula rounding.
  return diff <= three_se || diff <= 1e-12 * std::max(1.0, std::abs(scale));
}

// ---------------------------------------------------------------------------
// Task: simulate. Deflated-kernel and deflated-asset martingale table on the
// configured grid.

void run_simulate(const json& root, const LevyModel& model,
                  const McSection& mc, const fs::path& out_dir,
                  ScenarioReport& report) {
  const json& sec = require_section(root, "top level", "simulate");
  reject_unknown(sec, "simulate",
                 {"initial_price", "short_rate", "kappa", "lambda",
                  "sigma_brownian", "sigma_jump"});
  const double s0 = get_number_or(sec, "simulate", "initial_price", 1.0);
  if (!(s0 > 0.0))
    throw ConfigError("config: simulate.initial_price must be positive");
  const double rate = get_number_or(sec, "simulate", "short_rate", 0.0);
  Vec kappa = get_vector(sec, "simulate", "kappa");
  Vec lambda = get_vector(sec, "simulate", "lambda");
  Vec sigma_b = get_vector(sec, "simulate", "sigma_brownian");
  Vec sigma_j = get_vector(sec, "simulate", "sigma_jump");
  require_dimension(lambda, model, "simulate.lambda");
  require_dimension(sigma_j, model, "simulate.sigma_jump");
  if (!kappa.empty() && !sigma_b.empty() && kappa.size() != sigma_b.size())
    throw ConfigError(
        "config: simulate.kappa and simulate.sigma_brownian must have the "
        "same length");
  const int dim_b = static_cast<int>(std::max(kappa.size(), sigma_b.size()));

  const double horizon = mc.horizon;
  const TimeGrid grid = TimeGrid::uniform(horizon, mc.steps);
  const TimeFn r = [rate](double) { return rate; };
  RiskAversion aversion{constant_loading(std::move(kappa)),
                        linear_form(std::move(lambda))};
  AssetExposure exposure{constant_loading(std::move(sigma_b)),
                         linear_form(std::move(sigma_j))};
  PricingKernel kernel(model, r, aversion, horizon);
  AssetPrice asset(model, r, aversion, exposure, s0, horizon);
  kernel.prime_grid(grid);
  asset.prime_grid(grid);

  const std::vector<double>& times = grid.times;
  const int n_times = static_cast<int>(times.size()) - 1;  // skip t = 0
  const auto est = run_paths(
      mc.config, 2 * n_times, [&](const PathRng& rng, std::vector<double>& out) {
        const JumpPath jumps = model.sample_path(horizon, rng);
        BrownianIncrements bm;
        const BrownianIncrements* bm_ptr = nullptr;
        if (dim_b > 0) {
          const TimeGrid refined = grid.refined_with(jumps.event_times());
          bm = sample_brownian(refined, dim_b, rng);
          bm_ptr = &bm;
        }
        for (int k = 0; k < n_times; ++k) {
          const double t = times[k + 1];
          const double log_pi = kernel.terminal_log(jumps, t, bm_ptr);
          out[2 * k] = std::exp(log_pi + kernel.integrated_short_rate(t));
          out[2 * k + 1] = std::exp(log_pi + asset.terminal_log(jumps, t, bm_ptr));
        }
      });

  CsvWriter csv(out_dir / "simulate.csv",
                "time,kernel_account_mean,kernel_account_se,"
                "deflated_asset_mean,deflated_asset_se");
  bool all_ok = true;
  for (int k = 0; k < n_times; ++k) {
    const Estimate& pk = est[2 * k];
    const Estimate& pa = est[2 * k + 1];
    const bool ok =
        agrees(std::abs(pk.mean - 1.0), 3.0 * pk.std_error, 1.0) &&
        agrees(std::abs(pa.mean - s0), 3.0 * pa.std_error, s0);
    all_ok = all_ok && ok;
    csv.row({fmt17(times[k + 1]), fmt17(pk.mean), fmt17(pk.std_error),
             fmt17(pa.mean), fmt17(pa.std_error)});
  }
  report.output_files.push_back(csv.close());
  report.checks_passed = all_ok;
  report.lines.push_back(
      "simulate: E[pi_t B_t] = 1 and E[pi_t S_t] = " + fmt17(s0) + " at " +
      std::to_string(n_times) + " grid times, " +
      std::to_string(mc.config.n_paths) + " paths: " + pass_fail(all_ok));
}

// ---------------------------------------------------------------------------
// Task: price-vasicek. Closed-form bond prices against the simulation oracle.

void run_price_vasicek(const json& root, const LevyModel& model,
                       const McSection& mc, const fs::path& out_dir,
                       ScenarioReport& report) {
  const json& sec = require_section(root, "top level", "vasicek");
  reject_unknown(sec, "vasicek",
                 {"k", "theta", "r0", "sigma_load", "lambda_load",
                  "maturities"});
  VasicekSpec spec;
  spec.model = model;
  spec.k = get_number(sec, "vasicek", "k");
  spec.theta = get_number(sec, "vasicek", "theta");
  spec.r0 = get_number(sec, "vasicek", "r0");
  Vec sigma_load = get_vector(sec, "vasicek", "sigma_load");
  Vec lambda_load = get_vector(sec, "vasicek", "lambda_load");
  require_dimension(sigma_load, model, "vasicek.sigma_load");
  require_dimension(lambda_load, model, "vasicek.lambda_load");
  spec.sigma = linear_form(std::move(sigma_load));
  spec.lambda = linear_form(std::move(lambda_load));
  const Vec maturities = get_vector(sec, "vasicek", "maturities");
  if (maturities.empty())
    throw ConfigError("config: vasicek.maturities must list at least one "
                      "positive maturity");
  for (double T : maturities)
    if (!(T > 0.0))
      throw ConfigError("config: vasicek.maturities must be positive");
  const double horizon = *std::max_element(maturities.begin(), maturities.end());

  const double r0 = spec.r0;
  VasicekModel vasicek(std::move(spec), horizon);
  CsvWriter csv(out_dir / "vasicek.csv",
                "maturity,closed_form,mc_mean,mc_std_error,abs_diff,"
                "within_3se");
  bool all_ok = true;
  for (double T : maturities) {
    const double cf = vasicek.bond_price(r0, 0.0, T);
    McConfig cfg = mc.config;
    cfg.grid = TimeGrid::uniform(T, mc.steps);
    const Estimate est = vasicek.bond_price_mc(r0, 0.0, T, cfg);
    const double diff = std::abs(cf - est.mean);
    const bool ok = agrees(diff, 3.0 * est.std_error, cf);
    all_ok = all_ok && ok;
    csv.row({fmt17(T), fmt17(cf), fmt17(est.mean), fmt17(est.std_error),
             fmt17(diff), ok ? "1" : "0"});
  }
  report.output_files.push_back(csv.close());
  report.checks_passed = all_ok;
  report.lines.push_back(
      "price-vasicek: closed form vs Monte Carlo oracle at " +
      std::to_string(maturities.size()) + " maturities, " +
      std::to_string(mc.config.n_paths) + " paths: " + pass_fail(all_ok));
}

// ---------------------------------------------------------------------------
// Chaos tasks share the calibrated model.

struct ChaosSection {
  ChaosModel model;
  YieldCurve curve;
  Vec maturities;
};

ChaosSection parse_chaos(const json& root, const LevyModel& model,
                         const std::string& curve_csv) {
  const json& sec = require_section(root, "top level", "chaos");
  reject_unknown(sec, "chaos",
                 {"gamma_load", "variance_weight", "support_cap", "flat_rate",
                  "flat_tenors", "maturities"});
  Vec gamma_load = get_vector(sec, "chaos", "gamma_load");
  if (gamma_load.empty())
    throw ConfigError("config: chaos.gamma_load must be a non-empty loading "
                      "vector");
  require_dimension(gamma_load, model, "chaos.gamma_load");
  const double weight = get_number_or(sec, "chaos", "variance_weight", 0.5);
  const double cap = get_number_or(sec, "chaos", "support_cap", 0.0);

  YieldCurve curve = [&]() {
    if (!curve_csv.empty()) return YieldCurve::from_csv(curve_csv);
    const double flat = get_number(sec, "chaos", "flat_rate");
    Vec tenors = get_vector(sec, "chaos", "flat_tenors");
    if (tenors.empty())
      tenors = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0};
    std::vector<double> rates(tenors.size(), flat);
    return YieldCurve::from_zero_rates(std::move(tenors), std::move(rates));
  }();

  // Linear gamma has time-independent moment rates; compute them once so the
  // calibration never re-enters measure quadrature in its hot loops.
  const SpaceTimeFn gamma = linear_form(gamma_load);
  const QuadratureOptions tight{1e-12, 1e-11, 100000};
  const double gamma_sq = model.integrate_measure(
      [&](const Vec& x) {
        const double g = gamma(x, 0.0);
        return g * g;
      },
      Shell::kAll, tight);
  const double gamma_mass = model.integrate_measure(
      [&](const Vec& x) { return gamma(x, 0.0); }, Shell::kAll, tight);

  const double support_cap = cap > 0.0 ? cap : 1.5 * curve.max_tenor();
  ChaosModel chaos = calibrate_chaos_model(
      model, curve, gamma, weight, support_cap,
      [gamma_sq](double) { return gamma_sq; },
      [gamma_mass](double) { return gamma_mass; });
  return ChaosSection{std::move(chaos), std::move(curve),
                      get_vector(sec, "chaos", "maturities")};
}

void run_calibrate_chaos(const json& root, const LevyModel& model,
                         const std::string& curve_csv, const fs::path& out_dir,
                         ScenarioReport& report) {
  ChaosSection chaos = parse_chaos(root, model, curve_csv);
  CsvWriter csv(out_dir / "calibration.csv",
                "tenor_years,market_discount,model_discount,abs_residual");
  double worst = 0.0;
  for (double tenor : chaos.curve.tenors()) {
    const double market = chaos.curve.discount(tenor);
    const double fitted =
        chaos.model.bond_price(0.0, tenor, ChaosModel::State{});
    const double residual = std::abs(fitted - market);
    worst = std::max(worst, residual);
    csv.row({fmt17(tenor), fmt17(market), fmt17(fitted), fmt17(residual)});
  }
  report.output_files.push_back(csv.close());
  report.checks_passed = worst <= 1e-8;
  report.lines.push_back("calibrate-chaos: max pillar residual " +
                         fmt17(worst) + " (bound 1e-08): " +
                         pass_fail(report.checks_passed));
}

void run_price_chaos(const json& root, const LevyModel& model,
                     const std::string& curve_csv, const fs::path& out_dir,
                     ScenarioReport& report) {
  ChaosSection chaos = parse_chaos(root, model, curve_csv);
  if (chaos.maturities.empty())
    throw ConfigError(
        "config: chaos.maturities must list the bond maturities to price");
  for (double T : chaos.maturities)
    if (!(T > 0.0))
      throw ConfigError("config: chaos.maturities must be positive");
  CsvWriter csv(out_dir / "chaos_prices.csv",
                "maturity,model_price,market_price,abs_error");
  double worst = 0.0;
  for (double T : chaos.maturities) {
    const double fitted = chaos.model.bond_price(0.0, T, ChaosModel::State{});
    const double market = chaos.curve.discount(T);
    const double err = std::abs(fitted - market);
    worst = std::max(worst, err);
    csv.row({fmt17(T), fmt17(fitted), fmt17(market), fmt17(err)});
  }
  report.output_files.push_back(csv.close());
  report.checks_passed = worst <= 1e-8;
  report.lines.push_back("price-chaos: " +
                         std::to_string(chaos.maturities.size()) +
                         " bonds priced off the calibrated curve, max curve "
                         "error " + fmt17(worst) + ": " +
                         pass_fail(report.checks_passed));
}

// ---------------------------------------------------------------------------
// FX tasks.

FxSystem parse_fx(const json& root, const LevyModel& model) {
  const json& sec = require_section(root, "top level", "fx");
  reject_unknown(sec, "fx", {"horizon", "currencies"});
  const double horizon = get_number_or(sec, "fx", "horizon", 1.0);
  auto it = sec.find("currencies");
  if (it == sec.end() || !it->is_array() || it->size() < 2)
    throw ConfigError(
        "config: fx.currencies must be an array of at least two entries");
  FxSystemSpec spec{model, {}};
  int index = 0;
  for (const json& c : *it) {
    const std::string where = "fx.currencies[" + std::to_string(index++) + "]";
    if (!c.is_object())
      throw ConfigError("config: " + where + " must be an object");
    reject_unknown(c, where, {"rate", "lambda", "kappa", "kernel_initial"});
    FxCurrency currency;
    const double rate = get_number(c, where, "rate");
    currency.short_rate = [rate](double) { return rate; };
    Vec lambda = get_vector(c, where, "lambda");
    require_dimension(lambda, model, where + ".lambda");
    currency.lambda_vector = std::move(lambda);
    currency.kappa = constant_loading(get_vector(c, where, "kappa"));
    currency.kernel_initial = get_number_or(c, where, "kernel_initial", 1.0);
    spec.currencies.push_back(std::move(currency));
  }
  return FxSystem(std::move(spec), horizon);
}

void run_fx_matrix(const json& root, const LevyModel& model,
                   const fs::path& out_dir, ScenarioReport& report) {
  const FxSystem sys = parse_fx(root, model);
  const int n = sys.size();
  // Exponent route first: it reports domain violations (for example
  // variance-gamma loadings outside the admissible cone) before any
  // quadrature time is spent.
  std::vector<std::vector<double>> exponent(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) exponent[i][j] = sys.excess_return_exponent(i, j, 0.0);

  CsvWriter csv(out_dir / "fx_matrix.csv",
                "i,j,exponent_form,quadrature,abs_diff");
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double quad = sys.excess_return(i, j, 0.0);
      const double diff = std::abs(quad - exponent[i][j]);
      worst = std::max(
          worst, diff / std::max(1.0, std::abs(exponent[i][j])));
      csv.row({std::to_string(i), std::to_string(j), fmt17(exponent[i][j]),
               fmt17(quad), fmt17(diff)});
    }
  report.output_files.push_back(csv.close());
  report.checks_passed = worst <= 1e-8;
  report.lines.push_back(
      "fx-matrix: quadrature vs exponent-combination excess returns over " +
      std::to_string(n * (n - 1)) + " ordered pairs, worst relative gap " +
      fmt17(worst) + ": " + pass_fail(report.checks_passed));
}

void run_siegel_check(const json& root, const LevyModel& model,
                      const fs::path& out_dir, ScenarioReport& report) {
  const FxSystem sys = parse_fx(root, model);
  const SiegelReport siegel = siegel_check(sys);
  CsvWriter csv(out_dir / "siegel.csv", "i,j,excess_return");
  for (int i = 0; i < sys.size(); ++i)
    for (int j = 0; j < sys.size(); ++j) {
      if (i == j) continue;
      csv.row({std::to_string(i), std::to_string(j),
               fmt17(siegel.excess[i][j])});
    }
  report.output_files.push_back(csv.close());
  report.checks_passed = siegel.all_positive;
  report.lines.push_back(
      "siegel-check: min off-diagonal excess return " +
      fmt17(siegel.min_off_diagonal) + "; both sides of every exchange rate "
      "demand a positive premium: " + pass_fail(siegel.all_positive));
}

// ---------------------------------------------------------------------------
// Task: validate. Full invariant sweep with a pass/fail table.

void run_validate(const McSection& mc, const fs::path& out_dir,
                  ScenarioReport& report) {
  const std::uint64_t seed = mc.config.master_seed;
  const int paths = mc.config.n_paths;
  const std::vector<CheckSuite> suites = {
      check_exponential_formula(seed, paths),
      check_kernel_martingale(seed, paths),
      check_deflated_asset(seed, paths),
      check_fx_identities(seed, paths),
  };
  CsvWriter csv(out_dir / "validate_report.csv",
                "suite,check,passed,observed,bound");
  bool all_ok = true;
  for (const CheckSuite& suite : suites) {
    for (const CheckResult& r : suite.results) {
      all_ok = all_ok && r.passed;
      report.lines.push_back("[" + pass_fail(r.passed) + "] " + suite.name +
                             ": " + r.name + " (observed " + fmt17(r.observed) +
                             ", bound " + fmt17(r.bound) + ")");
      csv.row({suite.name, r.name, r.passed ? "1" : "0", fmt17(r.observed),
               fmt17(r.bound)});
    }
  }
  report.output_files.push_back(csv.close());
  report.checks_passed = all_ok;
  report.lines.push_back("validate: " + std::string(all_ok ? "all" : "NOT all") +
                         " invariant checks passed");
}

}  // namespace

ScenarioReport run_scenario(const std::string& config_path,
                            const ScenarioOverrides& overrides) {
  std::ifstream in(config_path, std::ios::binary);
  if (!in)
    throw ConfigError("config: cannot open \"" + config_path + "\"");
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config: " + config_path + " is not valid JSON: " +
                      e.what());
  }
  if (!root.is_object())
    throw ConfigError("config: top level must be a JSON object");
  reject_unknown(root, "top level",
                 {"task", "model", "mc", "io", "simulate", "vasicek", "chaos",
                  "fx"});
  const std::string task = get_string(root, "top level", "task");

  std::string out_dir = ".";
  std::string curve_csv;
  if (root.contains("io")) {
    const json& io = require_section(root, "top level", "io");
    reject_unknown(io, "io", {"out_dir", "curve_csv"});
    if (io.contains("out_dir")) out_dir = get_string(io, "io", "out_dir");
    if (io.contains("curve_csv")) curve_csv = get_string(io, "io", "curve_csv");
  }
  if (overrides.out_dir) out_dir = *overrides.out_dir;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec)
    throw DataError("cannot create output directory \"" + out_dir + "\": " +
                    ec.message());

  const McSection mc = parse_mc(root, overrides);
  ScenarioReport report;
  report.task = task;

  if (task == "validate") {
    run_validate(mc, out_dir, report);
    return report;
  }
  const LevyModel model = parse_model(root);
  if (task == "simulate")
    run_simulate(root, model, mc, out_dir, report);
  else if (task == "price-vasicek")
    run_price_vasicek(root, model, mc, out_dir, report);
  else if (task == "price-chaos")
    run_price_chaos(root, model, curve_csv, out_dir, report);
  else if (task == "calibrate-chaos")
    run_calibrate_chaos(root, model, curve_csv, out_dir, report);
  else if (task == "fx-matrix")
    run_fx_matrix(root, model, out_dir, report);
  else if (task == "siegel-check")
    run_siegel_check(root, model, out_dir, report);
  else
    throw ConfigError("config: unknown task \"" + task + "\"");
  return report;
}

}  // namespace levyito
