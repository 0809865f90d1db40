#pragma once

#include <cstdint>

namespace gaic {

// Deterministic random source with a fixed bit stream on every platform
// (xoshiro256++ seeded through splitmix64). std:: distributions are
// implementation-defined, so sampling helpers live here instead.
class Rng {
 public:
  explicit Rng(uint64_t seed);

  uint64_t next_u64();

  // Uniform in [0, 1).
  double uniform();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer in [lo, hi], bounds inclusive.
  int64_t uniform_int(int64_t lo, int64_t hi);
  // Box-Muller normal deviate.
  double normal(double mean = 0.0, double stddev = 1.0);
  bool bernoulli(double p);

  // Derives an independent child stream, advancing this one.
  Rng split();

 private:
  uint64_t state_[4];
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace gaic
