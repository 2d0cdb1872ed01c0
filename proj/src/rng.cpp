#include "levyito/rng.hpp"

#include <cmath>

#include "levyito/errors.hpp"

namespace levyito {

namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void round_once(std::array<std::uint32_t, 4>& x,
                       const std::array<std::uint32_t, 2>& k) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * x[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * x[2];
  const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
  const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
  const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
  x = {hi1 ^ x[1] ^ k[0], lo1, hi0 ^ x[3] ^ k[1], lo0};
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) {
  for (int r = 0; r < 10; ++r) {
    round_once(counter, key);
    key[0] += kW0;
    key[1] += kW1;
  }
  return counter;
}

RandomStream::RandomStream(std::uint64_t seed, std::uint64_t path_index,
                           Substream substream) {
  key_ = {static_cast<std::uint32_t>(seed),
          static_cast<std::uint32_t>(seed >> 32)};
  if (path_index >> 32)
    throw ConfigError("RandomStream: path_index must fit in 32 bits");
  prefix_ = {static_cast<std::uint32_t>(path_index),
             static_cast<std::uint32_t>(substream)};
}

void RandomStream::refill() {
  buf_ = philox4x32({static_cast<std::uint32_t>(block_),
                     static_cast<std::uint32_t>(block_ >> 32), prefix_[0],
                     prefix_[1]},
                    key_);
  ++block_;
  pos_ = 0;
}

std::uint64_t RandomStream::next_u64() {
  if (pos_ > 2) refill();
  const std::uint64_t lo = buf_[pos_], hi = buf_[pos_ + 1];
  pos_ += 2;
  return lo | (hi << 32);
}

double RandomStream::next_uniform() {
  // 53 significant bits, shifted into (0, 1].
  return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RandomStream::next_normal() {
  if (has_cached_normal_) {
    has_cached_normal_ = false;
    return cached_normal_;
  }
  const double u1 = next_uniform();
  const double u2 = next_uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * M_PI * u2;
  cached_normal_ = r * std::sin(a);
  has_cached_normal_ = true;
  return r * std::cos(a);
}

double RandomStream::next_gamma(double shape) {
  if (!(shape > 0.0)) throw DomainError("next_gamma: shape must be positive");
  if (shape < 1.0) {
    const double u = next_uniform();
    return next_gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x, v;
    do {
      x = next_normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = next_uniform();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
  }
}

std::uint64_t RandomStream::next_poisson(double mean) {
  if (mean < 0.0) throw DomainError("next_poisson: negative mean");
  if (mean == 0.0) return 0;
  if (mean > 1e6) throw DomainError("next_poisson: mean too large");
  // Count unit-exponential arrivals before the clock passes `mean`.
  std::uint64_t k = 0;
  double acc = -std::log(next_uniform());
  while (acc <= mean) {
    ++k;
    acc -= std::log(next_uniform());
  }
  return k;
}

}  // namespace levyito
