#pragma once

#include <cstdint>

#include "ert/sim/scene.hpp"

namespace ert::sim {

struct Scenario {
  Scene scene;
  GroundTruthGoal goal;
};

// Deterministic in (task, seed). Throws GenerationError when placement keeps
// failing (1000 attempts per object).
Scenario generate_scenario(const TaskSpec& task, std::uint64_t seed);

inline constexpr int kMaxPlacementAttempts = 1000;

}  // namespace ert::sim
