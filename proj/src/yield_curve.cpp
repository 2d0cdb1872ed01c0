#include "levyito/yield_curve.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <utility>

#include "levyito/errors.hpp"

namespace levyito {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

double parse_number(const std::string& field, const std::string& context) {
  const std::string token = trim(field);
  if (token.empty()) throw DataError("empty numeric field in " + context);
  std::size_t consumed = 0;
  double value = 0.0;
  try {
    value = std::stod(token, &consumed);
  } catch (const std::exception&) {
    throw DataError("cannot parse '" + token + "' in " + context);
  }
  if (consumed != token.size())
    throw DataError("trailing garbage in '" + token + "' in " + context);
  if (!std::isfinite(value))
    throw DataError("non-finite value '" + token + "' in " + context);
  return value;
}

}  // namespace

YieldCurve::YieldCurve(std::vector<double> tenors, std::vector<double> discounts)
    : tenors_(std::move(tenors)), discounts_(std::move(discounts)) {
  if (tenors_.empty()) throw DataError("yield curve needs at least one pillar");
  if (tenors_.size() != discounts_.size())
    throw DataError("yield curve pillar/discount size mismatch");
  double prev_t = 0.0;
  double prev_logp = 0.0;  // log P(0) = 0
  log_p_.reserve(tenors_.size());
  forwards_.reserve(tenors_.size());
  for (std::size_t i = 0; i < tenors_.size(); ++i) {
    if (!(tenors_[i] > prev_t))
      throw DataError("yield curve tenors must be positive and strictly increasing");
    if (!(discounts_[i] > 0.0) || !std::isfinite(discounts_[i]))
      throw DataError("yield curve discount factors must be positive");
    const double logp = std::log(discounts_[i]);
    log_p_.push_back(logp);
    forwards_.push_back((prev_logp - logp) / (tenors_[i] - prev_t));
    prev_t = tenors_[i];
    prev_logp = logp;
  }
}

YieldCurve YieldCurve::from_discounts(std::vector<double> tenors,
                                      std::vector<double> discounts) {
  return YieldCurve(std::move(tenors), std::move(discounts));
}

YieldCurve YieldCurve::from_zero_rates(std::vector<double> tenors,
                                       std::vector<double> zero_rates) {
  if (tenors.size() != zero_rates.size())
    throw DataError("yield curve pillar/rate size mismatch");
  std::vector<double> discounts(tenors.size());
  for (std::size_t i = 0; i < tenors.size(); ++i)
    discounts[i] = std::exp(-zero_rates[i] * tenors[i]);
  return YieldCurve(std::move(tenors), std::move(discounts));
}

YieldCurve YieldCurve::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open curve file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty curve file '" + path + "'");
  std::string header = trim(line);
  bool zero_rate_column = false;
  if (header == "tenor_years,discount_factor") {
    zero_rate_column = false;
  } else if (header == "tenor_years,zero_rate") {
    zero_rate_column = true;
  } else {
    throw DataError("curve file header must be 'tenor_years,discount_factor' or "
                    "'tenor_years,zero_rate', got '" + header + "'");
  }
  std::vector<double> tenors, values;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::stringstream row(line);
    std::string t_field, v_field, extra;
    if (!std::getline(row, t_field, ',') || !std::getline(row, v_field, ','))
      throw DataError("curve file line " + std::to_string(line_no) +
                      " needs two comma-separated columns");
    if (std::getline(row, extra, ',') && !trim(extra).empty())
      throw DataError("curve file line " + std::to_string(line_no) +
                      " has more than two columns");
    const std::string ctx = "curve file line " + std::to_string(line_no);
    tenors.push_back(parse_number(t_field, ctx));
    values.push_back(parse_number(v_field, ctx));
  }
  if (tenors.empty()) throw DataError("curve file '" + path + "' has no data rows");
  return zero_rate_column ? from_zero_rates(std::move(tenors), std::move(values))
                          : from_discounts(std::move(tenors), std::move(values));
}

double YieldCurve::discount(double t) const {
  if (t < 0.0) throw DataError("discount factor requested at negative time");
  if (t == 0.0) return 1.0;
  // First pillar with tenor >= t; interpolate from the previous one.
  const auto it = std::lower_bound(tenors_.begin(), tenors_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - tenors_.begin());
  double base_t = 0.0, base_logp = 0.0, fwd = 0.0;
  if (i == tenors_.size()) {  // beyond the last pillar: flat last forward
    base_t = tenors_.back();
    base_logp = log_p_.back();
    fwd = forwards_.back();
  } else {
    base_t = (i == 0) ? 0.0 : tenors_[i - 1];
    base_logp = (i == 0) ? 0.0 : log_p_[i - 1];
    fwd = forwards_[i];
  }
  return std::exp(base_logp - fwd * (t - base_t));
}

double YieldCurve::zero_rate(double t) const {
  if (!(t > 0.0)) throw DataError("zero rate requested at non-positive time");
  return -std::log(discount(t)) / t;
}

double YieldCurve::forward_rate(double t) const {
  if (t < 0.0) throw DataError("forward rate requested at negative time");
  const auto it = std::lower_bound(tenors_.begin(), tenors_.end(), t);
  const std::size_t i = static_cast<std::size_t>(it - tenors_.begin());
  return (i == tenors_.size()) ? forwards_.back() : forwards_[i];
}

DiscountCurveFn YieldCurve::discount_function() const {
  return [curve = *this](double t) { return curve.discount(t); };
}

}  // namespace levyito
