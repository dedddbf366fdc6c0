#pragma once

#include <cstdint>
#include <random>

namespace janossy {

/// Seeded generator with a portable output mapping. std::mt19937_64 is fully
/// specified by the standard; the real and integer mappings below avoid the
/// implementation-defined standard distributions, so draws are identical
/// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [lo, hi) with 53 random bits.
  double uniform(double lo, double hi);
  /// Uniform integer in [lo, hi], unbiased by rejection.
  int uniform_int(int lo, int hi);
  bool bernoulli(double p) { return uniform(0.0, 1.0) < p; }

 private:
  std::mt19937_64 engine_;
};

/// splitmix64 mix of (base, index); independent per-instance seeds.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index);

}  // namespace janossy
