#pragma once

#include <cstdint>
#include <random>

namespace rocarc {

// Seeded generator with a fixed, portable output stream: mt19937_64 (whose
// sequence is pinned by the C++ standard) plus hand-written uniform, index and
// Box-Muller normal transforms. The standard <random> distributions are
// implementation-defined and are deliberately not used.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), rejection-sampled to avoid modulo bias.
  std::uint64_t index(std::uint64_t n);

  // Standard normal via Box-Muller; the second variate is cached.
  double normal();

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// Mixes a base seed with a stream id (splitmix64 finalizer) so independent
// sub-tasks get decorrelated, reproducible seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Standard normal CDF.
double normal_cdf(double x);

}  // namespace rocarc
