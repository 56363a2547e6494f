#include "ert/prompt/prompt.hpp"

#include "ert/common/error.hpp"

namespace ert::prompt {

namespace {

Descriptor describe(const sim::ObjectInstance& o, bool plural = false) {
  const auto& k = sim::kind_info(o.kind);
  return {std::string(sim::texture_info(o.texture).phrase), std::string(plural ? k.plural : k.noun)};
}

Descriptor describe_by_texture(const sim::ObjectInstance& o) {
  return {std::string(sim::texture_info(o.texture).phrase), "object"};
}

const sim::ObjectInstance& must_find(const sim::Scene& s, int id) {
  const sim::ObjectInstance* o = s.find(id);
  if (!o) throw Error("goal refers to an object missing from the scene");
  return *o;
}

}  // namespace

std::string Descriptor::display() const { return adjective.empty() ? noun : adjective + " " + noun; }

std::string Prompt::text() const {
  std::string out;
  for (const auto& s : segments) out += s.display();
  return out;
}

Prompt Prompt::from_text(std::string text, sim::TaskKind kind) {
  Prompt p;
  p.task_kind = kind;
  p.segments.push_back(Segment::plain(std::move(text)));
  return p;
}

Prompt generate_prompt(const sim::TaskSpec& task, const sim::GroundTruthGoal& goal, const sim::Scene& scene) {
  using sim::TaskKind;
  Prompt p;
  p.task_kind = task.kind;
  auto& seg = p.segments;
  switch (task.kind) {
    case TaskKind::visual_manipulation: {
      seg.push_back(Segment::plain("Put the "));
      for (std::size_t i = 0; i < goal.targets.size(); ++i) {
        if (i > 0) seg.push_back(Segment::plain(" and the "));
        seg.push_back(Segment::ref(describe(must_find(scene, goal.targets[i])), Role::base));
      }
      seg.push_back(Segment::plain(" into the "));
      seg.push_back(Segment::ref(describe(must_find(scene, goal.containers.front())), Role::target));
      seg.push_back(Segment::plain("."));
      break;
    }
    case TaskKind::scene_understanding: {
      seg.push_back(Segment::plain("Put the "));
      seg.push_back(Segment::ref(describe_by_texture(must_find(scene, goal.targets.front())), Role::base));
      seg.push_back(Segment::plain(" in "));
      seg.push_back(Segment::scene("this scene"));
      seg.push_back(Segment::plain(" into the "));
      seg.push_back(Segment::ref(describe_by_texture(must_find(scene, goal.containers.front())), Role::target));
      seg.push_back(Segment::plain("."));
      break;
    }
    case TaskKind::sweep_without_exceeding: {
      const sim::Quantifier q = goal.quantifier.value_or(sim::Quantifier::all);
      seg.push_back(Segment::plain("Sweep " + std::string(sim::to_string(q)) + " "));
      seg.push_back(Segment::ref(describe(must_find(scene, goal.targets.front()), q != sim::Quantifier::one), Role::base));
      seg.push_back(Segment::plain(" into the "));
      seg.push_back(Segment::ref(describe(must_find(scene, *goal.frame_id)), Role::target));
      seg.push_back(Segment::plain(" without exceeding the "));
      seg.push_back(Segment::ref(describe(must_find(scene, *goal.line_id)), Role::constraint));
      seg.push_back(Segment::plain("."));
      break;
    }
    case TaskKind::pick_order_restore: {
      seg.push_back(Segment::plain("Put the "));
      seg.push_back(Segment::ref(describe(must_find(scene, goal.targets.front())), Role::base));
      seg.push_back(Segment::plain(" into the "));
      for (std::size_t i = 0; i < goal.containers.size(); ++i) {
        if (i > 0) seg.push_back(Segment::plain(" then the "));
        seg.push_back(Segment::ref(describe(must_find(scene, goal.containers[i])), Role::target));
      }
      seg.push_back(Segment::plain(std::string(". ") + kRestoreSuffix));
      break;
    }
  }
  return p;
}

nlohmann::ordered_json to_json(const Prompt& p) {
  nlohmann::ordered_json j;
  j["task_kind"] = sim::to_string(p.task_kind);
  j["text"] = p.text();
  return j;
}

}  // namespace ert::prompt
