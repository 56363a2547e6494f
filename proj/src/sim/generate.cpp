#include "ert/sim/generate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "ert/common/error.hpp"
#include "ert/common/rng.hpp"
#include "ert/sim/dynamics.hpp"
#include "ert/sim/shape.hpp"

namespace ert::sim {

namespace {

constexpr double kGapPx = 3.0;
constexpr double kBorderPx = 2.0;
constexpr int kSceneAttempts = 50;

using Pair = std::pair<ObjectKind, TextureId>;

const std::vector<ObjectKind> kObjectKinds{ObjectKind::block, ObjectKind::star, ObjectKind::letter_r,
                                           ObjectKind::letter_v, ObjectKind::hexagon};
const std::vector<ObjectKind> kContainerKinds{ObjectKind::container, ObjectKind::pan, ObjectKind::bowl,
                                              ObjectKind::pallet};
const std::vector<ObjectKind> kSweepKinds{ObjectKind::block, ObjectKind::star, ObjectKind::hexagon};

bool in_test_split(ObjectKind k, TextureId t) {
  return !is_held_out(k) && !is_held_out(t) && !in_train_split(k, t);
}

// Exactly one held-out attribute, so a distractor can still share the other.
bool is_novel(ObjectKind k, TextureId t) { return is_held_out(k) != is_held_out(t); }

// Pairs usable for a goal object (one the prompt names) at this level.
bool goal_pair_ok(Level level, ObjectKind k, TextureId t) {
  switch (level) {
    case Level::placement: return in_train_split(k, t);
    case Level::combinatorial: return in_test_split(k, t);
    case Level::novel_object: return is_novel(k, t);
  }
  return false;
}

double random_rot(Rng& rng) { return wrap_angle(rng.uniform_int(0, 7) * std::numbers::pi / 4.0); }

class Builder {
 public:
  Builder(const TaskSpec& task, Rng& rng) : task_(task), rng_(rng) {}

  enum class Pool { goal, train, seen_texture };

  Pair pick_pair(const std::vector<ObjectKind>& kinds, bool goal, const std::vector<Pair>& avoid,
                 bool (*extra)(Pair, Pair) = nullptr, Pair ref = {}) {
    return pick_pair(kinds, goal ? Pool::goal : Pool::train, avoid, extra, ref);
  }

  Pair pick_pair(const std::vector<ObjectKind>& kinds, Pool which, const std::vector<Pair>& avoid,
                 bool (*extra)(Pair, Pair) = nullptr, Pair ref = {}) {
    std::vector<Pair> pool;
    for (ObjectKind k : kinds)
      for (int t = 0; t < kTextureCount; ++t) {
        const TextureId tex = static_cast<TextureId>(t);
        bool ok = false;
        switch (which) {
          case Pool::goal: ok = goal_pair_ok(task_.level, k, tex); break;
          case Pool::train: ok = in_train_split(k, tex); break;
          case Pool::seen_texture: ok = !is_held_out(tex); break;
        }
        if (!ok) continue;
        const Pair p{k, tex};
        if (std::find(avoid.begin(), avoid.end(), p) != avoid.end()) continue;
        if (extra && !extra(p, ref)) continue;
        pool.push_back(p);
      }
    if (pool.empty()) throw GenerationError("no (kind, texture) pair satisfies the generation constraints");
    return pool[static_cast<std::size_t>(rng_.uniform_int(0, static_cast<int>(pool.size()) - 1))];
  }

  // Places an object with a fresh circumscribed circle that keeps kGapPx from
  // every circle already placed; `accept` filters candidate centres (px).
  template <typename Accept>
  ObjectInstance place(ObjectKind k, TextureId t, double scale, double rot, Accept accept) {
    ObjectInstance o;
    o.kind = k;
    o.texture = t;
    o.scale = scale;
    o.rot = rot;
    const double r = footprint_radius(k) * scale * kFrameWidth;
    for (int attempt = 0; attempt < kMaxPlacementAttempts; ++attempt) {
      const Vec2 c{fixed_x_ ? *fixed_x_ : rng_.uniform(r + kBorderPx, kFrameWidth - r - kBorderPx),
                   rng_.uniform(r + kBorderPx, kFrameHeight - r - kBorderPx)};
      if (!accept(c)) continue;
      bool clear = true;
      for (const auto& [pc, pr] : circles_)
        if (norm(c - pc) < r + pr + kGapPx) clear = false;
      if (!clear) continue;
      circles_.emplace_back(c, r);
      o.pos = to_norm(c, kFrameWidth, kFrameHeight);
      return o;
    }
    throw GenerationError("object placement failed after 1000 attempts");
  }

  ObjectInstance place(ObjectKind k, TextureId t, double scale, double rot) {
    return place(k, t, scale, rot, [](Vec2) { return true; });
  }

  // Subsequent placements use this x (px) and sample only y.
  void fix_x(std::optional<double> x) { fixed_x_ = x; }

 private:
  const TaskSpec& task_;
  Rng& rng_;
  std::vector<std::pair<Vec2, double>> circles_;
  std::optional<double> fixed_x_;
};

bool shares_one_attribute(Pair p, Pair ref) { return (p.first == ref.first) != (p.second == ref.second); }
bool same_kind_other_texture(Pair p, Pair ref) { return p.first == ref.first && p.second != ref.second; }
bool other_texture(Pair p, Pair ref) { return p.second != ref.second; }

// Ids are a random permutation of 1..n so labels carry no role information.
void assign_ids(std::vector<ObjectInstance>& objs, Rng& rng) {
  std::vector<int> ids(objs.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = static_cast<int>(i) + 1;
  for (std::size_t i = ids.size(); i > 1; --i)
    std::swap(ids[i - 1], ids[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);
  for (std::size_t i = 0; i < objs.size(); ++i) objs[i].id = ids[i];
}

Scenario build_pick_place(const TaskSpec& task, Rng& rng) {
  Builder b(task, rng);
  const bool su = task.kind == TaskKind::scene_understanding;
  const int n_targets = su ? 1 : task.params.n_targets;

  std::vector<Pair> used;
  const Pair box = b.pick_pair(kContainerKinds, true, used);
  used.push_back(box);
  std::vector<Pair> targets;
  for (int i = 0; i < n_targets; ++i) {
    targets.push_back(b.pick_pair(kObjectKinds, true, used, su ? other_texture : nullptr, box));
    used.push_back(targets.back());
  }

  Pair box_distractor;
  Pair obj_distractor;
  if (su) {
    // Scene understanding names objects by texture alone, so textures of the
    // goal objects must be unique in the scene.
    auto avoid_textures = [&](const std::vector<ObjectKind>& kinds) {
      for (int tries = 0; tries < 200; ++tries) {
        const Pair p = b.pick_pair(kinds, false, used);
        if (p.second != box.second && p.second != targets[0].second) return p;
      }
      throw GenerationError("no distractor with a distinct texture");
    };
    box_distractor = avoid_textures(kContainerKinds);
    obj_distractor = avoid_textures(kObjectKinds);
  } else {
    box_distractor = b.pick_pair(kContainerKinds, false, used, shares_one_attribute, box);
    obj_distractor = b.pick_pair(kObjectKinds, false, used, shares_one_attribute, targets[0]);
  }

  std::vector<ObjectInstance> objs;
  objs.push_back(b.place(box.first, box.second, rng.uniform(0.15, 0.18), random_rot(rng)));
  objs.push_back(b.place(box_distractor.first, box_distractor.second, rng.uniform(0.15, 0.18), random_rot(rng)));
  for (const Pair& t : targets) objs.push_back(b.place(t.first, t.second, rng.uniform(0.07, 0.085), random_rot(rng)));
  objs.push_back(b.place(obj_distractor.first, obj_distractor.second, rng.uniform(0.07, 0.085), random_rot(rng)));
  assign_ids(objs, rng);

  Scenario s;
  s.scene.objects = objs;
  s.goal.containers = {objs[0].id};
  for (int i = 0; i < n_targets; ++i) s.goal.targets.push_back(objs[2 + static_cast<std::size_t>(i)].id);
  s.goal.distractors = {objs[1].id, objs.back().id};
  return s;
}

Scenario build_sweep(const TaskSpec& task, Rng& rng) {
  Builder b(task, rng);
  const Quantifier q = task.params.quantifier;
  int n = 3;
  switch (q) {
    case Quantifier::all: n = 3; break;
    case Quantifier::any: n = rng.uniform_int(1, 3); break;
    case Quantifier::one: n = rng.uniform_int(1, 3); break;
    case Quantifier::two: n = rng.uniform_int(2, 3); break;
    case Quantifier::three: n = 3; break;
  }

  const Pair target = b.pick_pair(kSweepKinds, true, {});
  // Frame and line colours: distinct seen solids.
  std::vector<TextureId> solids;
  for (int t = 0; t < 6; ++t)
    if (!is_held_out(static_cast<TextureId>(t))) solids.push_back(static_cast<TextureId>(t));
  const int fi = rng.uniform_int(0, static_cast<int>(solids.size()) - 1);
  int li = rng.uniform_int(0, static_cast<int>(solids.size()) - 2);
  if (li >= fi) ++li;

  const double W = kFrameWidth, H = kFrameHeight;
  const double frame_scale = 0.2;
  const double fs = frame_scale * W;
  const double top = 14.0;
  const Vec2 box_centre{rng.uniform(0.3 * W, 0.7 * W), top + fs / 2.0};

  ObjectInstance frame;
  frame.kind = ObjectKind::frame3;
  frame.texture = solids[static_cast<std::size_t>(fi)];
  frame.scale = frame_scale;
  frame.pos = to_norm(box_centre + fs * stencil_centroid_offset(ObjectKind::frame3), kFrameWidth, kFrameHeight);

  ObjectInstance line;
  line.kind = ObjectKind::line;
  line.texture = solids[static_cast<std::size_t>(li)];
  line.scale = frame_scale;
  line.pos = to_norm({box_centre.x, top - 6.0}, kFrameWidth, kFrameHeight);

  const Rect region{(box_centre.x - 0.4 * fs) / W, (box_centre.y - 0.4 * fs) / H, (box_centre.x + 0.4 * fs) / W,
                    (box_centre.y + 0.5 * fs) / H};

  const double scale = 0.04;
  const double r = footprint_radius(target.first) * scale * W;
  const double band_top = 0.62 * H;
  const double rx0 = region.x0 * W + 3.0, rx1 = region.x1 * W - 3.0;

  // Targets sit in disjoint columns under the frame so that a straight
  // upward sweep of one never touches another. The slack left after the
  // minimum spacing is split at random between the gaps.
  const double spacing = 2.0 * r + 2.0;
  const double slack = (rx1 - rx0) - spacing * (n - 1);
  if (slack < 0.0) throw GenerationError("sweep targets do not fit under the frame");
  std::vector<double> cuts;
  for (int i = 0; i < n; ++i) cuts.push_back(rng.uniform(0.0, slack));
  std::sort(cuts.begin(), cuts.end());

  std::vector<ObjectInstance> objs{frame, line};
  for (int i = 0; i < n; ++i) {
    b.fix_x(rx0 + cuts[static_cast<std::size_t>(i)] + spacing * i);
    objs.push_back(b.place(target.first, target.second, scale, random_rot(rng), [&](Vec2 c) { return c.y >= band_top; }));
  }
  b.fix_x(std::nullopt);
  for (int i = 0; i < n; ++i) {
    // Same shape as the targets; when that shape is held out there is no
    // training pair for it, so only the texture is constrained.
    const Pair d = b.pick_pair(kSweepKinds, is_held_out(target.first) ? Builder::Pool::seen_texture : Builder::Pool::train,
                               {target}, same_kind_other_texture, target);
    objs.push_back(b.place(d.first, d.second, scale, random_rot(rng), [&](Vec2 c) {
      return c.y >= 0.45 * H && (c.x < region.x0 * W - r - 3.0 || c.x > region.x1 * W + r + 3.0);
    }));
  }
  assign_ids(objs, rng);

  Scenario s;
  s.scene.objects = objs;
  s.scene.constraint_line = line.pos.y;
  s.scene.goal_region = region;
  s.goal.frame_id = objs[0].id;
  s.goal.line_id = objs[1].id;
  for (int i = 0; i < n; ++i) s.goal.targets.push_back(objs[2 + static_cast<std::size_t>(i)].id);
  for (int i = 0; i < n; ++i) s.goal.distractors.push_back(objs[2 + static_cast<std::size_t>(n + i)].id);
  s.goal.quantifier = q;
  return s;
}

Scenario build_restore(const TaskSpec& task, Rng& rng) {
  Builder b(task, rng);
  const int len = task.params.sequence_length;
  std::vector<Pair> used;
  std::vector<Pair> boxes;
  for (int i = 0; i < len + 1; ++i) {
    boxes.push_back(b.pick_pair(kContainerKinds, true, used));
    used.push_back(boxes.back());
  }
  const Pair distractor = b.pick_pair(kContainerKinds, false, used);
  used.push_back(distractor);
  const Pair target = b.pick_pair(kObjectKinds, true, used);

  std::vector<ObjectInstance> objs;
  for (const Pair& p : boxes) objs.push_back(b.place(p.first, p.second, rng.uniform(0.12, 0.14), random_rot(rng)));
  objs.push_back(b.place(distractor.first, distractor.second, rng.uniform(0.12, 0.14), random_rot(rng)));
  ObjectInstance t;
  t.kind = target.first;
  t.texture = target.second;
  t.scale = rng.uniform(0.05, 0.06);
  t.rot = random_rot(rng);
  t.pos = objs[0].pos;  // starts inside its original container
  objs.push_back(t);
  assign_ids(objs, rng);

  Scenario s;
  s.scene.objects = objs;
  s.goal.targets = {objs.back().id};
  s.goal.original_container = objs[0].id;
  for (int i = 1; i <= len; ++i) s.goal.containers.push_back(objs[static_cast<std::size_t>(i)].id);
  s.goal.distractors = {objs[static_cast<std::size_t>(len) + 1].id};
  return s;
}

bool oracle_succeeds(const TaskSpec& task, const Scenario& s) {
  std::vector<Scene> history{s.scene};
  for (const StepAction& a : oracle_plan(task, s.goal, s.scene)) {
    if (static_cast<int>(history.size()) > step_budget(task)) return false;
    history.push_back(apply_action(history.back(), task, a));
  }
  return check_success(task, s.goal, history).success;
}

}  // namespace

Scenario generate_scenario(const TaskSpec& task, std::uint64_t seed) {
  task.validate();
  Rng rng(seed_for(seed, "scenario"));
  for (int attempt = 0; attempt < kSceneAttempts; ++attempt) {
    Scenario s;
    switch (task.kind) {
      case TaskKind::visual_manipulation:
      case TaskKind::scene_understanding: s = build_pick_place(task, rng); break;
      case TaskKind::sweep_without_exceeding: s = build_sweep(task, rng); break;
      case TaskKind::pick_order_restore: s = build_restore(task, rng); break;
    }
    if (oracle_succeeds(task, s)) return s;
  }
  throw GenerationError("no generated scene admits a ground-truth solution");
}

}  // namespace ert::sim
