#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ert/sim/generate.hpp"
#include "ert/sim/scene.hpp"

namespace ert::prompt {

// Display words of an object reference: adjective phrase + noun phrase,
// e.g. {"red swirl", "block"}. Either may be a synonym after an attack.
struct Descriptor {
  std::string adjective;
  std::string noun;
  std::string display() const;
  friend bool operator==(const Descriptor&, const Descriptor&) = default;
};

enum class SegmentType { text, object_ref, scene_ref };
enum class Role { base, target, constraint };

struct Segment {
  SegmentType type = SegmentType::text;
  std::string text;  // text and scene_ref
  Descriptor desc;   // object_ref
  Role role = Role::base;

  static Segment plain(std::string t) { return {SegmentType::text, std::move(t), {}, Role::base}; }
  static Segment ref(Descriptor d, Role r) { return {SegmentType::object_ref, {}, std::move(d), r}; }
  static Segment scene(std::string t) { return {SegmentType::scene_ref, std::move(t), {}, Role::base}; }
  std::string display() const { return type == SegmentType::object_ref ? desc.display() : text; }
  friend bool operator==(const Segment&, const Segment&) = default;
};

struct Prompt {
  std::vector<Segment> segments;
  sim::TaskKind task_kind = sim::TaskKind::visual_manipulation;

  std::string text() const;
  static Prompt from_text(std::string text, sim::TaskKind kind);
  friend bool operator==(const Prompt&, const Prompt&) = default;
};

Prompt generate_prompt(const sim::TaskSpec& task, const sim::GroundTruthGoal& goal, const sim::Scene& scene);

inline constexpr const char* kRestoreSuffix = "Finally restore it into its original container.";

nlohmann::ordered_json to_json(const Prompt& p);

}  // namespace ert::prompt
