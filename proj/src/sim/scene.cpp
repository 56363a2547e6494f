#include "ert/sim/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "ert/common/error.hpp"
#include "ert/sim/shape.hpp"

namespace ert::sim {

namespace {

template <typename E, std::size_t N>
std::optional<E> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
  for (std::size_t i = 0; i < N; ++i)
    if (names[i] == s) return static_cast<E>(i);
  return std::nullopt;
}

constexpr std::array<std::string_view, 4> kTaskNames{"visual_manipulation", "scene_understanding",
                                                     "sweep_without_exceeding", "pick_order_restore"};
constexpr std::array<std::string_view, 3> kLevelNames{"placement", "combinatorial", "novel_object"};
constexpr std::array<std::string_view, 5> kQuantNames{"any", "one", "two", "three", "all"};
constexpr std::array<std::string_view, 5> kReasonNames{"wrong_object", "wrong_place", "constraint_violated",
                                                       "wrong_count", "step_budget_exhausted"};

double fin(double v) { return std::isfinite(v) ? v : 0.0; }

}  // namespace

std::string_view to_string(TaskKind k) { return kTaskNames[static_cast<std::size_t>(k)]; }
std::string_view to_string(Level l) { return kLevelNames[static_cast<std::size_t>(l)]; }
std::string_view to_string(Quantifier q) { return kQuantNames[static_cast<std::size_t>(q)]; }
std::string_view to_string(FailureReason r) { return kReasonNames[static_cast<std::size_t>(r)]; }

std::optional<TaskKind> task_kind_from_string(std::string_view s) {
  if (s == "sweep") return TaskKind::sweep_without_exceeding;
  return lookup<TaskKind>(kTaskNames, s);
}
std::optional<Level> level_from_string(std::string_view s) { return lookup<Level>(kLevelNames, s); }
std::optional<Quantifier> quantifier_from_string(std::string_view s) { return lookup<Quantifier>(kQuantNames, s); }
std::optional<FailureReason> failure_reason_from_string(std::string_view s) {
  return lookup<FailureReason>(kReasonNames, s);
}

void TaskSpec::validate() const {
  if (params.sequence_length < 1 || params.sequence_length > 2)
    throw ConfigError("pick_order_restore sequence length must be 1 or 2");
  if (params.n_targets < 1 || params.n_targets > 2) throw ConfigError("visual_manipulation n_targets must be 1 or 2");
}

int step_budget(const TaskSpec& task) {
  switch (task.kind) {
    case TaskKind::visual_manipulation: return task.params.n_targets + 1;
    case TaskKind::scene_understanding: return 2;
    case TaskKind::sweep_without_exceeding:
    case TaskKind::pick_order_restore: return 6;
  }
  return 2;
}

const ObjectInstance* Scene::find(int id) const {
  for (const auto& o : objects)
    if (o.id == id) return &o;
  return nullptr;
}

StepAction StepAction::make(Vec2 pick, double pick_rot, Vec2 place, double place_rot) {
  StepAction a;
  a.pick = {clamp01(pick.x), clamp01(pick.y)};
  a.place = {clamp01(place.x), clamp01(place.y)};
  a.pick_rot = wrap_angle(fin(pick_rot));
  a.place_rot = wrap_angle(fin(place_rot));
  return a;
}

double side_px(const ObjectInstance& o, int width) { return o.scale * width; }

Vec2 local_coords(const ObjectInstance& o, Vec2 px, int width, int height) {
  const Vec2 d = px - to_px(o.pos, width, height);
  return (1.0 / side_px(o, width)) * rotate(d, -o.rot);
}

bool mask_contains(const ObjectInstance& o, Vec2 px, int width, int height) {
  return stencil_contains(o.kind, local_coords(o, px, width, height));
}

bool footprint_contains(const ObjectInstance& o, Vec2 px, int width, int height) {
  return sim::footprint_contains(o.kind, local_coords(o, px, width, height));
}

nlohmann::ordered_json to_json(const TaskSpec& t) {
  nlohmann::ordered_json j;
  j["kind"] = to_string(t.kind);
  j["level"] = to_string(t.level);
  j["quantifier"] = to_string(t.params.quantifier);
  j["sequence_length"] = t.params.sequence_length;
  j["n_targets"] = t.params.n_targets;
  return j;
}

TaskSpec task_from_json(const nlohmann::ordered_json& j) {
  TaskSpec t;
  auto kind = task_kind_from_string(j.at("kind").get<std::string>());
  if (!kind) throw ConfigError("unknown task kind");
  t.kind = *kind;
  if (j.contains("level")) {
    auto lvl = level_from_string(j.at("level").get<std::string>());
    if (!lvl) throw ConfigError("unknown level");
    t.level = *lvl;
  }
  if (j.contains("quantifier")) {
    auto q = quantifier_from_string(j.at("quantifier").get<std::string>());
    if (!q) throw ConfigError("unknown quantifier");
    t.params.quantifier = *q;
  }
  if (j.contains("sequence_length")) t.params.sequence_length = j.at("sequence_length").get<int>();
  if (j.contains("n_targets")) t.params.n_targets = j.at("n_targets").get<int>();
  t.validate();
  return t;
}

nlohmann::ordered_json to_json(const ObjectInstance& o) {
  nlohmann::ordered_json j;
  j["id"] = o.id;
  j["kind"] = kind_info(o.kind).name;
  j["texture"] = texture_info(o.texture).name;
  j["pos"] = {o.pos.x, o.pos.y};
  j["rot"] = o.rot;
  j["scale"] = o.scale;
  return j;
}

nlohmann::ordered_json to_json(const Scene& s) {
  nlohmann::ordered_json j;
  j["width_px"] = s.width;
  j["height_px"] = s.height;
  j["objects"] = nlohmann::ordered_json::array();
  for (const auto& o : s.objects) j["objects"].push_back(to_json(o));
  j["constraint_line"] = s.constraint_line ? nlohmann::ordered_json(*s.constraint_line) : nlohmann::ordered_json();
  if (s.goal_region) {
    const Rect& r = *s.goal_region;
    j["goal_region"] = {r.x0, r.y0, r.x1, r.y1};
  } else {
    j["goal_region"] = nullptr;
  }
  return j;
}

Scene scene_from_json(const nlohmann::ordered_json& j) {
  Scene s;
  s.width = j.at("width_px").get<int>();
  s.height = j.at("height_px").get<int>();
  for (const auto& jo : j.at("objects")) {
    ObjectInstance o;
    o.id = jo.at("id").get<int>();
    auto k = kind_from_name(jo.at("kind").get<std::string>());
    auto t = texture_from_name(jo.at("texture").get<std::string>());
    if (!k || !t) throw ParseError("scene: unknown kind or texture");
    o.kind = *k;
    o.texture = *t;
    o.pos = {jo.at("pos").at(0).get<double>(), jo.at("pos").at(1).get<double>()};
    o.rot = jo.at("rot").get<double>();
    o.scale = jo.at("scale").get<double>();
    s.objects.push_back(o);
  }
  if (j.contains("constraint_line") && !j.at("constraint_line").is_null())
    s.constraint_line = j.at("constraint_line").get<double>();
  if (j.contains("goal_region") && !j.at("goal_region").is_null()) {
    const auto& r = j.at("goal_region");
    s.goal_region = Rect{r.at(0).get<double>(), r.at(1).get<double>(), r.at(2).get<double>(), r.at(3).get<double>()};
  }
  return s;
}

nlohmann::ordered_json to_json(const GroundTruthGoal& g) {
  nlohmann::ordered_json j;
  j["targets"] = g.targets;
  j["containers"] = g.containers;
  j["original_container"] = g.original_container ? nlohmann::ordered_json(*g.original_container) : nlohmann::ordered_json();
  j["distractors"] = g.distractors;
  j["frame_id"] = g.frame_id ? nlohmann::ordered_json(*g.frame_id) : nlohmann::ordered_json();
  j["line_id"] = g.line_id ? nlohmann::ordered_json(*g.line_id) : nlohmann::ordered_json();
  j["quantifier"] = g.quantifier ? nlohmann::ordered_json(to_string(*g.quantifier)) : nlohmann::ordered_json();
  return j;
}

GroundTruthGoal goal_from_json(const nlohmann::ordered_json& j) {
  GroundTruthGoal g;
  g.targets = j.at("targets").get<std::vector<int>>();
  g.containers = j.at("containers").get<std::vector<int>>();
  g.distractors = j.at("distractors").get<std::vector<int>>();
  auto opt_int = [&](const char* key) -> std::optional<int> {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<int>();
  };
  g.original_container = opt_int("original_container");
  g.frame_id = opt_int("frame_id");
  g.line_id = opt_int("line_id");
  if (j.contains("quantifier") && !j.at("quantifier").is_null())
    g.quantifier = quantifier_from_string(j.at("quantifier").get<std::string>());
  return g;
}

nlohmann::ordered_json to_json(const StepAction& a) {
  nlohmann::ordered_json j;
  j["pick"] = {a.pick.x, a.pick.y, a.pick_rot};
  j["place"] = {a.place.x, a.place.y, a.place_rot};
  return j;
}

StepAction action_from_json(const nlohmann::ordered_json& j) {
  const auto& p = j.at("pick");
  const auto& q = j.at("place");
  return StepAction::make({p.at(0).get<double>(), p.at(1).get<double>()}, p.at(2).get<double>(),
                          {q.at(0).get<double>(), q.at(1).get<double>()}, q.at(2).get<double>());
}

nlohmann::ordered_json to_json(const EpisodeOutcome& o) {
  nlohmann::ordered_json j;
  j["success"] = o.success;
  j["steps_taken"] = o.steps_taken;
  j["failure_reason"] = o.failure_reason ? nlohmann::ordered_json(to_string(*o.failure_reason)) : nlohmann::ordered_json();
  return j;
}

EpisodeOutcome outcome_from_json(const nlohmann::ordered_json& j) {
  EpisodeOutcome o;
  o.success = j.at("success").get<bool>();
  o.steps_taken = j.at("steps_taken").get<int>();
  if (j.contains("failure_reason") && !j.at("failure_reason").is_null())
    o.failure_reason = failure_reason_from_string(j.at("failure_reason").get<std::string>());
  return o;
}

}  // namespace ert::sim
