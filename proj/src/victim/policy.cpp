#include <algorithm>
#include <cstdio>

#include "ert/common/error.hpp"
#include "ert/sim/dynamics.hpp"
#include "ert/sim/shape.hpp"
#include "ert/victim/victim.hpp"

namespace ert::victim {

namespace {

bool kind_matches(const prompt::CanonicalDescriptor& d, const DetectedObject& o) {
  if (*d.kind == prompt::kGenericNoun) return true;
  return o.kind && sim::kind_info(*o.kind).name == *d.kind;
}

std::vector<DetectedObject> matches(const prompt::CanonicalDescriptor& d, const std::vector<DetectedObject>& seen) {
  std::vector<DetectedObject> out;
  if (!d.matchable()) return out;
  for (const auto& o : seen) {
    if (d.texture && o.texture != d.texture) continue;
    if (!kind_matches(d, o)) continue;
    out.push_back(o);
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.label != b.label ? a.label < b.label : a.area > b.area;
  });
  return out;
}

sim::StepAction pick_place(const DetectedObject& obj, Vec2 to) { return sim::StepAction::make(obj.centroid, obj.rot, to, obj.rot); }

bool all_matched(const std::vector<prompt::CanonicalDescriptor>& ds, const std::vector<DetectedObject>& seen) {
  return std::all_of(ds.begin(), ds.end(), [&](const auto& d) { return match(d, seen).has_value(); });
}

}  // namespace

void VictimConfig::validate() const {
  if (!(color_tolerance >= 0.0 && color_tolerance <= 255.0)) throw ConfigError("color tolerance must be in [0, 255]");
  if (!(shape_match_threshold >= 0.0 && shape_match_threshold <= 1.0))
    throw ConfigError("shape match threshold must be in [0, 1]");
}

std::string frame_digest(const Frame& f) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto feed = [&h](const std::vector<std::uint8_t>& v) {
    for (auto b : v) {
      h ^= b;
      h *= 0x100000001b3ull;
    }
  };
  feed(f.rgb);
  feed(f.seg);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::optional<DetectedObject> match(const prompt::CanonicalDescriptor& d, const std::vector<DetectedObject>& seen) {
  auto m = matches(d, seen);
  if (m.empty()) return std::nullopt;
  return m.front();
}

ReferenceVictim::ReferenceVictim(VictimConfig config, const prompt::SynonymTable& table)
    : config_(config), table_(table) {
  config_.validate();
}

std::string ReferenceVictim::name() const {
  return config_.synonym_normalization ? "reference_normalizing" : "reference_literal";
}

void ReferenceVictim::reset(const sim::TaskSpec&, const std::string&) {
  cursor_ = 0;
  origin_label_.reset();
}

std::optional<sim::StepAction> ReferenceVictim::act(const Observation& obs) {
  prompt::ParsedInstruction p;
  try {
    p = prompt::parse_prompt(obs.prompt_text, table_, config_.synonym_normalization);
  } catch (const ParseError&) {
    return std::nullopt;
  }
  const auto seen = perceive(obs.frame, config_);
  std::optional<sim::StepAction> a;
  switch (p.action) {
    case prompt::Action::put: a = plan_put(p, seen); break;
    case prompt::Action::sweep: a = plan_sweep(p, seen); break;
    case prompt::Action::restore_sequence: a = plan_restore(p, seen); break;
  }
  if (a) ++cursor_;
  return a;
}

std::optional<sim::StepAction> ReferenceVictim::plan_put(const prompt::ParsedInstruction& p,
                                                         const std::vector<DetectedObject>& seen) {
  if (p.target.empty() || cursor_ >= static_cast<int>(p.base.size())) return std::nullopt;
  const auto obj = match(p.base[static_cast<std::size_t>(cursor_)], seen);
  const auto box = match(p.target.front(), seen);
  if (!obj || !box) return std::nullopt;
  return pick_place(*obj, box->centroid);
}

std::optional<sim::StepAction> ReferenceVictim::plan_sweep(const prompt::ParsedInstruction& p,
                                                           const std::vector<DetectedObject>& seen) {
  if (p.base.empty() || p.target.empty() || !all_matched(p.constraint, seen)) return std::nullopt;
  const auto frame = match(p.target.front(), seen);
  const auto objs = matches(p.base.front(), seen);
  if (!frame || !frame->kind || objs.empty()) return std::nullopt;
  const int need = sim::sweep_required(p.quantifier.value_or(sim::Quantifier::all), static_cast<int>(objs.size()));
  if (cursor_ >= std::min(need, static_cast<int>(objs.size()))) return std::nullopt;
  const auto& o = objs[static_cast<std::size_t>(cursor_)];
  if (!o.kind) return std::nullopt;

  const Vec2 fc = sim::to_px(frame->centroid, kFrameWidth, kFrameHeight);
  const Vec2 box_centre = fc - frame->side_px * rotate(sim::stencil_centroid_offset(*frame->kind), frame->rot);
  const Vec2 c = sim::to_px(o.centroid, kFrameWidth, kFrameHeight);
  const double reach = sim::footprint_radius(*o.kind) * o.side_px + 3.0;
  return sim::StepAction::make(sim::to_norm({c.x, c.y + reach}, kFrameWidth, kFrameHeight), 0.0,
                               sim::to_norm({c.x, box_centre.y}, kFrameWidth, kFrameHeight), 0.0);
}

std::optional<sim::StepAction> ReferenceVictim::plan_restore(const prompt::ParsedInstruction& p,
                                                             const std::vector<DetectedObject>& seen) {
  if (p.base.empty() || p.target.empty()) return std::nullopt;
  const auto obj = match(p.base.front(), seen);
  if (!obj) return std::nullopt;
  if (!origin_label_) {
    double best = 1e9;
    for (const auto& o : seen) {
      if (o.label == obj->label || !o.kind || !sim::is_container(*o.kind)) continue;
      const double d = norm(sim::to_px(o.centroid - obj->centroid, kFrameWidth, kFrameHeight));
      if (d < best) {
        best = d;
        origin_label_ = o.label;
      }
    }
    if (!origin_label_) return std::nullopt;
  }
  std::optional<DetectedObject> box;
  if (cursor_ < static_cast<int>(p.target.size())) {
    box = match(p.target[static_cast<std::size_t>(cursor_)], seen);
  } else if (cursor_ == static_cast<int>(p.target.size())) {
    for (const auto& o : seen)
      if (o.label == *origin_label_) box = o;
  }
  if (!box) return std::nullopt;
  return pick_place(*obj, box->centroid);
}

}  // namespace ert::victim
