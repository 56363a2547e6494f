#pragma once

#include <optional>
#include <vector>

#include "ert/sim/scene.hpp"

namespace ert::sim {

// Pick-place tasks teleport the topmost object under pick to place. Sweep
// translates every non-fixture object touched by the pick->place segment so
// that its leading edge reaches place.
Scene apply_action(const Scene& scene, const TaskSpec& task, const StepAction& action);

// Topmost object whose footprint covers the pixel-space point.
std::optional<int> object_at(const Scene& scene, Vec2 px);

EpisodeOutcome check_success(const TaskSpec& task, const GroundTruthGoal& goal, const std::vector<Scene>& history);

// Container (by id) whose footprint holds the object's centroid; topmost wins.
std::optional<int> container_holding(const Scene& scene, int object_id);

// The sequence of containers the target occupied across history, with
// consecutive repeats and empty entries removed.
std::vector<int> visit_sequence(const std::vector<Scene>& history, int object_id);

// Sweep contact point below an object: a sweep that starts here and ends at
// `to` pushes the object along the segment.
Vec2 sweep_start_below(const Scene& scene, const ObjectInstance& o);

// Number of targets that the sweep quantifier asks to move.
int sweep_required(Quantifier q, int n_targets);

// Ground-truth plan computed from true object poses; used to validate
// generated scenarios and as a test reference.
std::vector<StepAction> oracle_plan(const TaskSpec& task, const GroundTruthGoal& goal, const Scene& scene);

}  // namespace ert::sim
