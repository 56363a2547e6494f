#include "ert/orchestrator/error_model.hpp"

#include <algorithm>
#include <cmath>

#include "ert/common/error.hpp"
#include "ert/common/rng.hpp"

namespace ert::orch {

void ErrorModelParams::validate() const {
  if (!(delta >= 0.0 && delta <= 1.0)) throw ConfigError("delta must lie in [0, 1]");
  if (horizon < 1) throw ConfigError("horizon must be at least 1");
  if (trials < 1) throw ConfigError("trials must be at least 1");
}

double delta_bound(const ErrorModelParams& p) {
  p.validate();
  double total = 0.0, survive = 1.0;
  for (int k = 0; k < p.horizon; ++k) {
    total += survive * p.delta * (p.horizon - k);
    survive *= 1.0 - p.delta;
  }
  return total;
}

MonteCarloEstimate delta_monte_carlo(const ErrorModelParams& p, std::uint64_t seed) {
  p.validate();
  if (p.trials < 1000) throw ConfigError("Monte Carlo needs at least 1000 trials");
  Rng rng(seed_for(seed, "error_model"));
  double sum = 0.0, sum_sq = 0.0;
  for (int i = 0; i < p.trials; ++i) {
    double cost = 0.0;
    for (int t = 1; t <= p.horizon; ++t) {
      if (rng.uniform() < p.delta) {
        cost = p.horizon - t + 1;
        break;
      }
    }
    sum += cost;
    sum_sq += cost * cost;
  }
  const double n = p.trials;
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1));
  return {mean, std::sqrt(var / n)};
}

}  // namespace ert::orch
