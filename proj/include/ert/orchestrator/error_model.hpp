#pragma once

#include <cstdint>

namespace ert::orch {

struct ErrorModelParams {
  double delta = 0.1;  // per-step error probability
  int horizon = 10;    // T
  int trials = 100000;

  void validate() const;  // throws ConfigError
};

// Sum over k < T of (1 - delta)^k * delta * (T - k).
double delta_bound(const ErrorModelParams& p);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// Trajectories err independently per step; the first error at step t
// (1-based) costs T - t + 1. Needs at least 1000 trials.
MonteCarloEstimate delta_monte_carlo(const ErrorModelParams& p, std::uint64_t seed);

}  // namespace ert::orch
