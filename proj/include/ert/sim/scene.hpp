#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ert/common/frame.hpp"
#include "ert/common/geometry.hpp"
#include "ert/sim/vocab.hpp"

namespace ert::sim {

enum class TaskKind { visual_manipulation, scene_understanding, sweep_without_exceeding, pick_order_restore };
enum class Level { placement, combinatorial, novel_object };
enum class Quantifier { any, one, two, three, all };

std::string_view to_string(TaskKind k);
std::string_view to_string(Level l);
std::string_view to_string(Quantifier q);
std::optional<TaskKind> task_kind_from_string(std::string_view s);
std::optional<Level> level_from_string(std::string_view s);
std::optional<Quantifier> quantifier_from_string(std::string_view s);

struct TaskParams {
  Quantifier quantifier = Quantifier::all;  // sweep only
  int sequence_length = 2;                  // pick_order_restore only, 1 or 2
  int n_targets = 1;                        // visual_manipulation only, 1 or 2
};

struct TaskSpec {
  TaskKind kind = TaskKind::visual_manipulation;
  Level level = Level::placement;
  TaskParams params;

  void validate() const;  // throws ConfigError
};

// Steps allowed before step_budget_exhausted.
int step_budget(const TaskSpec& task);

struct ObjectInstance {
  int id = 0;
  ObjectKind kind = ObjectKind::block;
  TextureId texture = TextureId::red;
  Vec2 pos;          // stencil centroid, normalised to [0,1]^2
  double rot = 0.0;  // radians in [-pi, pi)
  double scale = 0.08;

  friend bool operator==(const ObjectInstance&, const ObjectInstance&) = default;
};

struct Rect {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // normalised
  bool contains(Vec2 p) const { return p.x >= x0 && p.x <= x1 && p.y >= y0 && p.y <= y1; }
  Vec2 centre() const { return {(x0 + x1) / 2.0, (y0 + y1) / 2.0}; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

struct Scene {
  std::vector<ObjectInstance> objects;  // draw order: later on top
  int width = kFrameWidth;
  int height = kFrameHeight;
  std::optional<double> constraint_line;  // normalised y; sweep only
  std::optional<Rect> goal_region;        // sweep only

  const ObjectInstance* find(int id) const;
  friend bool operator==(const Scene&, const Scene&) = default;
};

// What counts as success, recorded at generation time so that outcomes never
// depend on parsing the prompt.
struct GroundTruthGoal {
  std::vector<int> targets;          // objects to move
  std::vector<int> containers;       // visual_manipulation / scene_understanding: {goal}; restore: visit order
  std::optional<int> original_container;  // restore only
  std::vector<int> distractors;
  std::optional<int> frame_id;            // sweep only
  std::optional<int> line_id;             // sweep only
  std::optional<Quantifier> quantifier;   // sweep only

  friend bool operator==(const GroundTruthGoal&, const GroundTruthGoal&) = default;
};

// Unit of victim output.
struct StepAction {
  Vec2 pick;
  double pick_rot = 0.0;
  Vec2 place;
  double place_rot = 0.0;

  // Clamps coordinates into [0,1] (non-finite -> 0) and wraps rotations.
  static StepAction make(Vec2 pick, double pick_rot, Vec2 place, double place_rot);
  friend bool operator==(const StepAction&, const StepAction&) = default;
};

enum class FailureReason { wrong_object, wrong_place, constraint_violated, wrong_count, step_budget_exhausted };
std::string_view to_string(FailureReason r);
std::optional<FailureReason> failure_reason_from_string(std::string_view s);

struct EpisodeOutcome {
  bool success = false;
  int steps_taken = 0;
  std::optional<FailureReason> failure_reason;
  friend bool operator==(const EpisodeOutcome&, const EpisodeOutcome&) = default;
};

// Pixel-space helpers. Pixel (i, j) has its centre at (i + 0.5, j + 0.5).
inline Vec2 to_px(Vec2 norm_pos, int width, int height) { return {norm_pos.x * width, norm_pos.y * height}; }
inline Vec2 to_norm(Vec2 px, int width, int height) { return {px.x / width, px.y / height}; }
double side_px(const ObjectInstance& o, int width);  // box side in pixels

// Object-local box coordinates of a pixel-space point.
Vec2 local_coords(const ObjectInstance& o, Vec2 px, int width, int height);

bool mask_contains(const ObjectInstance& o, Vec2 px, int width, int height);
bool footprint_contains(const ObjectInstance& o, Vec2 px, int width, int height);

// JSON records. Field order is stable.
nlohmann::ordered_json to_json(const TaskSpec& t);
TaskSpec task_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json to_json(const ObjectInstance& o);
nlohmann::ordered_json to_json(const Scene& s);
Scene scene_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json to_json(const GroundTruthGoal& g);
GroundTruthGoal goal_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json to_json(const StepAction& a);
StepAction action_from_json(const nlohmann::ordered_json& j);
nlohmann::ordered_json to_json(const EpisodeOutcome& o);
EpisodeOutcome outcome_from_json(const nlohmann::ordered_json& j);

}  // namespace ert::sim
