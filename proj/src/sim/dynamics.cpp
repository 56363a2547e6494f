#include "ert/sim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ert/sim/shape.hpp"

namespace ert::sim {

namespace {

bool moved(const Scene& before, const Scene& after, int id) {
  const ObjectInstance* a = before.find(id);
  const ObjectInstance* b = after.find(id);
  if (!a || !b) return a != b;
  return a->pos != b->pos || a->rot != b->rot;
}

bool contains_id(const std::vector<int>& ids, int id) { return std::find(ids.begin(), ids.end(), id) != ids.end(); }

Scene apply_pick_place(const Scene& scene, const StepAction& action) {
  const auto hit = object_at(scene, to_px(action.pick, scene.width, scene.height));
  if (!hit) return scene;
  Scene out = scene;
  auto it = std::find_if(out.objects.begin(), out.objects.end(), [&](const ObjectInstance& o) { return o.id == *hit; });
  ObjectInstance o = *it;
  out.objects.erase(it);
  o.pos = action.place;
  o.rot = action.place_rot;
  out.objects.push_back(o);
  return out;
}

Scene apply_sweep(const Scene& scene, const StepAction& action) {
  const Vec2 p0 = to_px(action.pick, scene.width, scene.height);
  const Vec2 p1 = to_px(action.place, scene.width, scene.height);
  const double len = norm(p1 - p0);
  if (len < 1e-9) return scene;
  const Vec2 dir = (1.0 / len) * (p1 - p0);
  const int n_samples = static_cast<int>(std::ceil(len / 0.5)) + 1;

  Scene out = scene;
  for (auto& o : out.objects) {
    if (is_fixture(o.kind)) continue;
    bool touched = false;
    for (int s = 0; s < n_samples && !touched; ++s) {
      const double t = static_cast<double>(s) / (n_samples - 1);
      touched = footprint_contains(o, p0 + (t * len) * dir, scene.width, scene.height);
    }
    if (!touched) continue;
    const double side = side_px(o, scene.width);
    const Vec2 c = to_px(o.pos, scene.width, scene.height);
    double lead = -std::numeric_limits<double>::infinity();
    for (const Vec2& q : footprint_samples(o.kind)) lead = std::max(lead, dot(c + side * rotate(q, o.rot), dir));
    const double shift = dot(p1, dir) - lead;
    if (shift <= 0.0) continue;
    const Vec2 moved_px = c + shift * dir;
    o.pos = {clamp01(moved_px.x / scene.width), clamp01(moved_px.y / scene.height)};
  }
  return out;
}

EpisodeOutcome pick_place_outcome(const GroundTruthGoal& goal, const std::vector<Scene>& history) {
  EpisodeOutcome out;
  out.steps_taken = static_cast<int>(history.size()) - 1;
  const Scene& first = history.front();
  const Scene& last = history.back();
  const ObjectInstance* box = last.find(goal.containers.front());
  bool all_in = box != nullptr;
  for (int id : goal.targets) {
    const ObjectInstance* t = last.find(id);
    if (!t || !box || !footprint_contains(*box, to_px(t->pos, last.width, last.height), last.width, last.height))
      all_in = false;
  }
  if (all_in) {
    out.success = true;
    return out;
  }
  bool other_moved = false;
  bool target_moved = false;
  for (const auto& o : first.objects) {
    if (!moved(first, last, o.id)) continue;
    (contains_id(goal.targets, o.id) ? target_moved : other_moved) = true;
  }
  out.failure_reason = other_moved    ? FailureReason::wrong_object
                       : target_moved ? FailureReason::wrong_place
                                      : FailureReason::step_budget_exhausted;
  return out;
}

EpisodeOutcome sweep_outcome(const GroundTruthGoal& goal, const std::vector<Scene>& history) {
  EpisodeOutcome out;
  out.steps_taken = static_cast<int>(history.size()) - 1;
  const Scene& first = history.front();
  const Scene& last = history.back();
  const Rect region = first.goal_region.value_or(Rect{});
  const double line = first.constraint_line.value_or(0.0);

  bool crossed = false;
  for (const Scene& s : history)
    for (int id : goal.targets)
      if (const ObjectInstance* o = s.find(id); o && o->pos.y < line) crossed = true;

  int n_in = 0;
  for (int id : goal.targets)
    if (const ObjectInstance* o = last.find(id); o && region.contains(o->pos)) ++n_in;
  bool distractor_in = false;
  for (int id : goal.distractors)
    if (const ObjectInstance* o = last.find(id); o && region.contains(o->pos)) distractor_in = true;

  const Quantifier q = goal.quantifier.value_or(Quantifier::all);
  const int n_targets = static_cast<int>(goal.targets.size());
  const bool count_ok = q == Quantifier::any ? n_in >= 1 : n_in == sweep_required(q, n_targets);

  if (!crossed && !distractor_in && count_ok) {
    out.success = true;
    return out;
  }
  bool anything_moved = false;
  for (const auto& o : first.objects) anything_moved = anything_moved || moved(first, last, o.id);
  out.failure_reason = crossed          ? FailureReason::constraint_violated
                       : distractor_in  ? FailureReason::wrong_object
                       : anything_moved ? FailureReason::wrong_count
                                        : FailureReason::step_budget_exhausted;
  return out;
}

EpisodeOutcome restore_outcome(const GroundTruthGoal& goal, const std::vector<Scene>& history) {
  EpisodeOutcome out;
  out.steps_taken = static_cast<int>(history.size()) - 1;
  const int target = goal.targets.front();
  std::vector<int> expected;
  expected.push_back(goal.original_container.value_or(-1));
  expected.insert(expected.end(), goal.containers.begin(), goal.containers.end());
  expected.push_back(goal.original_container.value_or(-1));

  const std::vector<int> seq = visit_sequence(history, target);
  if (seq == expected) {
    out.success = true;
    return out;
  }
  const Scene& first = history.front();
  const Scene& last = history.back();
  bool other_moved = false;
  for (const auto& o : first.objects)
    if (o.id != target && moved(first, last, o.id)) other_moved = true;
  const bool prefix = seq.size() < expected.size() && std::equal(seq.begin(), seq.end(), expected.begin());
  out.failure_reason = other_moved ? FailureReason::wrong_object
                       : prefix    ? FailureReason::step_budget_exhausted
                                   : FailureReason::wrong_place;
  return out;
}

}  // namespace

std::optional<int> object_at(const Scene& scene, Vec2 px) {
  for (auto it = scene.objects.rbegin(); it != scene.objects.rend(); ++it)
    if (footprint_contains(*it, px, scene.width, scene.height)) return it->id;
  return std::nullopt;
}

Scene apply_action(const Scene& scene, const TaskSpec& task, const StepAction& action) {
  if (task.kind == TaskKind::sweep_without_exceeding) return apply_sweep(scene, action);
  return apply_pick_place(scene, action);
}

std::optional<int> container_holding(const Scene& scene, int object_id) {
  const ObjectInstance* o = scene.find(object_id);
  if (!o) return std::nullopt;
  const Vec2 p = to_px(o->pos, scene.width, scene.height);
  for (auto it = scene.objects.rbegin(); it != scene.objects.rend(); ++it) {
    if (it->id == object_id || !is_container(it->kind)) continue;
    if (footprint_contains(*it, p, scene.width, scene.height)) return it->id;
  }
  return std::nullopt;
}

std::vector<int> visit_sequence(const std::vector<Scene>& history, int object_id) {
  std::vector<int> seq;
  for (const Scene& s : history) {
    const auto c = container_holding(s, object_id);
    if (!c) continue;
    if (seq.empty() || seq.back() != *c) seq.push_back(*c);
  }
  return seq;
}

EpisodeOutcome check_success(const TaskSpec& task, const GroundTruthGoal& goal, const std::vector<Scene>& history) {
  switch (task.kind) {
    case TaskKind::visual_manipulation:
    case TaskKind::scene_understanding: return pick_place_outcome(goal, history);
    case TaskKind::sweep_without_exceeding: return sweep_outcome(goal, history);
    case TaskKind::pick_order_restore: return restore_outcome(goal, history);
  }
  return {};
}

Vec2 sweep_start_below(const Scene& scene, const ObjectInstance& o) {
  const Vec2 c = to_px(o.pos, scene.width, scene.height);
  const double reach = footprint_radius(o.kind) * side_px(o, scene.width) + 3.0;
  return to_norm({c.x, c.y + reach}, scene.width, scene.height);
}

int sweep_required(Quantifier q, int n_targets) {
  switch (q) {
    case Quantifier::any:
    case Quantifier::one: return 1;
    case Quantifier::two: return 2;
    case Quantifier::three: return 3;
    case Quantifier::all: return n_targets;
  }
  return n_targets;
}

std::vector<StepAction> oracle_plan(const TaskSpec& task, const GroundTruthGoal& goal, const Scene& scene) {
  std::vector<StepAction> plan;
  switch (task.kind) {
    case TaskKind::visual_manipulation:
    case TaskKind::scene_understanding: {
      const ObjectInstance* box = scene.find(goal.containers.front());
      for (int id : goal.targets) {
        const ObjectInstance* t = scene.find(id);
        plan.push_back(StepAction::make(t->pos, t->rot, box->pos, t->rot));
      }
      break;
    }
    case TaskKind::sweep_without_exceeding: {
      std::vector<int> ids = goal.targets;
      std::sort(ids.begin(), ids.end());
      const int n = sweep_required(goal.quantifier.value_or(Quantifier::all), static_cast<int>(ids.size()));
      const Rect region = scene.goal_region.value_or(Rect{});
      for (int i = 0; i < n && i < static_cast<int>(ids.size()); ++i) {
        const ObjectInstance* t = scene.find(ids[static_cast<std::size_t>(i)]);
        const Vec2 start = sweep_start_below(scene, *t);
        plan.push_back(StepAction::make(start, 0.0, {t->pos.x, region.centre().y}, 0.0));
      }
      break;
    }
    case TaskKind::pick_order_restore: {
      Scene cur = scene;
      std::vector<int> order = goal.containers;
      if (goal.original_container) order.push_back(*goal.original_container);
      for (int c : order) {
        const ObjectInstance* t = cur.find(goal.targets.front());
        const ObjectInstance* box = cur.find(c);
        const StepAction a = StepAction::make(t->pos, t->rot, box->pos, t->rot);
        plan.push_back(a);
        cur = apply_action(cur, task, a);
      }
      break;
    }
  }
  return plan;
}

}  // namespace ert::sim
