#pragma once

#include <array>
#include <cstdint>

namespace levyito {

// Philox4x32-10 keyed block cipher used as a counter-based generator.
// Streams are addressed by (seed, path_index, substream): the seed is the
// 64-bit key, path_index and substream occupy the upper counter words, and the
// lower 64 counter bits enumerate blocks within the stream. Any draw is a pure
// function of that address, so paths are reproducible independently of
// scheduling, and adding draws to one substream never shifts another.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// Substream roles. Keeping sources apart is what makes a config change in one
// source (say, turning jumps on) leave the others' realizations untouched.
enum class Substream : std::uint32_t {
  kBrownian = 0,
  kJumpCount = 1,
  kJumpSize = 2,
  kSubordinator = 3,
  kJumpTime = 4,
  kScratch = 5,
};

class RandomStream {
 public:
  RandomStream(std::uint64_t seed, std::uint64_t path_index,
               Substream substream);

  std::uint64_t next_u64();
  // Uniform on (0, 1] (never 0, safe under log).
  double next_uniform();
  // Standard normal via Box-Muller; consumes two uniforms per pair.
  double next_normal();
  // Gamma(shape, 1) via Marsaglia-Tsang, boosted for shape < 1.
  double next_gamma(double shape);
  // Poisson(mean) by summing unit exponentials; cost is O(mean) draws.
  std::uint64_t next_poisson(double mean);

 private:
  void refill();
  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 2> prefix_;  // path, substream
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;  // consumed 32-bit words in buf_
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

// Per-path bundle handed to simulation kernels.
struct PathRng {
  std::uint64_t seed;
  std::uint64_t path_index;
  RandomStream stream(Substream s) const {
    return RandomStream(seed, path_index, s);
  }
};

}  // namespace levyito
