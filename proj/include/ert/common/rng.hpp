#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string_view>

namespace ert {

// Seeded generator used everywhere randomness is needed.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The distributions are written out here instead of using the
// <random> distribution classes, whose outputs are implementation-defined;
// this keeps records byte-identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi] (inclusive), unbiased.
  int uniform_int(int lo, int hi);

  // Gaussian via Box-Muller; the second variate of each pair is cached.
  double normal(double mean, double stddev);

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

// splitmix64 finaliser; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

// Seed for a named sub-stream of `base`, e.g. seed_for(scenario, "noise").
std::uint64_t seed_for(std::uint64_t base, std::string_view stream);

// Seed for an indexed sub-stream.
std::uint64_t seed_for(std::uint64_t base, std::string_view stream, std::uint64_t index);

}  // namespace ert
