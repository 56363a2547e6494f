#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ert/common/frame.hpp"
#include "ert/prompt/lexicon.hpp"
#include "ert/prompt/parse.hpp"
#include "ert/sim/scene.hpp"

namespace ert::victim {

struct VictimConfig {
  bool synonym_normalization = true;
  double color_tolerance = 60.0;       // max L-inf distance to a texture's mean colour
  double shape_match_threshold = 0.6;  // min mask IoU against a kind's stencil

  void validate() const;  // throws ConfigError
};

struct DetectedObject {
  int label = 0;
  Vec2 centroid;  // normalised
  int area = 0;   // pixels
  std::optional<sim::TextureId> texture;
  std::optional<sim::ObjectKind> kind;
  double confidence = 0.0;  // IoU of the best kind fit
  double rot = 0.0;         // rotation of the best fit
  double side_px = 0.0;     // box side of the best fit
};

std::vector<DetectedObject> perceive(const Frame& frame, const VictimConfig& config = {});

struct HistoryEntry {
  std::string frame_digest;
  std::optional<sim::StepAction> action;
};

struct Observation {
  Frame frame;
  std::string prompt_text;
  std::vector<HistoryEntry> history;
  int step = 0;
};

// Hex FNV-1a digest of the frame buffers.
std::string frame_digest(const Frame& f);

// One instance per episode. act() returns nullopt for "no action".
class Victim {
 public:
  virtual ~Victim() = default;
  virtual void reset(const sim::TaskSpec& task, const std::string& prompt_text) = 0;
  virtual std::optional<sim::StepAction> act(const Observation& obs) = 0;
  virtual std::string name() const = 0;
};

// Scripted policy that reads the instruction, perceives the frame and
// plans pick-place or sweep motions from what it sees.
class ReferenceVictim : public Victim {
 public:
  explicit ReferenceVictim(VictimConfig config = {},
                           const prompt::SynonymTable& table = prompt::SynonymTable::standard());

  void reset(const sim::TaskSpec& task, const std::string& prompt_text) override;
  std::optional<sim::StepAction> act(const Observation& obs) override;
  std::string name() const override;

  const VictimConfig& config() const { return config_; }

 private:
  std::optional<sim::StepAction> plan_put(const prompt::ParsedInstruction& p, const std::vector<DetectedObject>& seen);
  std::optional<sim::StepAction> plan_sweep(const prompt::ParsedInstruction& p, const std::vector<DetectedObject>& seen);
  std::optional<sim::StepAction> plan_restore(const prompt::ParsedInstruction& p,
                                              const std::vector<DetectedObject>& seen);

  VictimConfig config_;
  const prompt::SynonymTable& table_;
  int cursor_ = 0;
  std::optional<int> origin_label_;
};

// Detected object matching a descriptor: texture and kind must both agree,
// the generic noun matches any kind. Lowest label wins.
std::optional<DetectedObject> match(const prompt::CanonicalDescriptor& d, const std::vector<DetectedObject>& seen);

}  // namespace ert::victim
