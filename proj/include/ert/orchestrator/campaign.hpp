#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ert/metrics/metrics.hpp"
#include "ert/percept/attacks.hpp"
#include "ert/prompt/llm_client.hpp"
#include "ert/prompt/rephrase.hpp"
#include "ert/sim/generate.hpp"
#include "ert/victim/victim.hpp"

namespace ert::orch {

enum class AttackFamily { none, prompt, perception };

struct AttackSpec {
  AttackFamily family = AttackFamily::none;
  prompt::PromptAttackSpec prompt;
  percept::PerceptionAttackSpec perception;

  static AttackSpec none() { return {}; }
  static AttackSpec of_prompt(prompt::PromptAttackKind k, prompt::Engine e = prompt::Engine::rule_based);
  static AttackSpec of_perception(percept::PerceptKind k);

  // "no_attack", a prompt attack name or a perception attack name.
  std::string name() const;
};

// "none" / "no_attack", a prompt attack name or a perception attack name.
// Throws ConfigError for unknown names.
AttackSpec attack_from_name(const std::string& name, prompt::Engine engine = prompt::Engine::rule_based);
nlohmann::ordered_json to_json(const AttackSpec& a);
AttackSpec attack_from_json(const nlohmann::json& j);

enum class VictimKind { reference_normalizing, reference_literal, bridge };

struct VictimSpec {
  VictimKind kind = VictimKind::reference_normalizing;
  std::string endpoint;  // bridge only
  victim::VictimConfig config;
};

std::string to_string(const VictimSpec& v);
VictimSpec victim_from_string(const std::string& s);  // "reference_normalizing", "reference_literal", "bridge:<endpoint>"
std::unique_ptr<victim::Victim> make_victim(const VictimSpec& v);

enum class JudgeKind { deterministic, external };

struct CampaignConfig {
  sim::TaskSpec task;
  int n_scenarios = 150;
  std::uint64_t base_seed = 0;
  AttackSpec attack;
  VictimSpec victim;
  JudgeKind judge = JudgeKind::deterministic;

  void validate() const;  // throws ConfigError
};

nlohmann::ordered_json to_json(const CampaignConfig& c);
// Missing fields keep their defaults. Throws ConfigError.
CampaignConfig campaign_from_json(const nlohmann::json& j);

// Rewrites the attacked prompt before the victim sees it. Throwing
// DefenseUnavailable makes the episode fall back to the attacked prompt.
using PromptFilter = std::function<std::string(const std::string& attacked)>;

// Optional collaborators. The LLM client is required only by external
// prompt engines and the external judge.
struct CampaignDeps {
  prompt::LlmClient* llm = nullptr;
  PromptFilter defense;
};

struct Rollout {
  std::vector<std::optional<sim::StepAction>> actions;
  sim::EpisodeOutcome outcome;
  Frame first_frame;  // as observed by the victim
};

// Runs the victim until success or the step budget. Perception attacks are
// applied to every observed frame. VictimError propagates.
Rollout rollout(const sim::TaskSpec& task, const sim::Scenario& scenario, const std::string& prompt_text,
                victim::Victim& v, const std::optional<percept::PerceptionAttackSpec>& frame_attack = std::nullopt);

struct EvalRecord {
  std::uint64_t scenario_seed = 0;
  sim::TaskSpec task;
  AttackSpec attack;  // with the per-episode seed filled in
  std::string prompt_before;
  std::string prompt_after;
  std::optional<std::string> prompt_restored;
  std::optional<std::string> defense_status;  // "applied" or "unavailable"
  std::optional<double> input_similarity;     // missing when the judge could not decide
  double action_cosine = 0.0;
  sim::EpisodeOutcome outcome;
  sim::EpisodeOutcome clean_outcome;
  std::vector<std::optional<sim::StepAction>> clean_actions;
  std::vector<std::optional<sim::StepAction>> attacked_actions;
  std::optional<std::string> error;  // victim or attack failure; record excluded from means

  // Not serialised: frames for failure exhibits.
  Frame clean_frame;
  Frame attacked_frame;
};

nlohmann::ordered_json to_json(const EvalRecord& r);

// Per-episode attack seed, derived from the scenario seed.
std::uint64_t episode_attack_seed(std::uint64_t scenario_seed);

EvalRecord run_episode(const CampaignConfig& config, std::uint64_t scenario_seed, const CampaignDeps& deps = {});

struct CampaignSummary {
  std::string task;
  std::string attack;
  std::string family;  // none / prompt / perception
  double input_sim = 0.0;
  double action_cos = 0.0;
  double success_rate = 0.0;  // percent
  int n_episodes = 0;
  int n_valid = 0;
  int n_errors = 0;
  int n_judge_missing = 0;
};

nlohmann::ordered_json to_json(const CampaignSummary& s);
CampaignSummary summary_from_json(const nlohmann::json& j);

// Means over valid records. Throws CampaignError when none are valid.
CampaignSummary summarize(const CampaignConfig& config, const std::vector<EvalRecord>& records);

struct CampaignResult {
  std::vector<EvalRecord> records;
  CampaignSummary summary;
};

// Seeds base_seed .. base_seed + n - 1.
CampaignResult run_campaign(const CampaignConfig& config, const CampaignDeps& deps = {});

// records.jsonl, summary.json and, when asked, failures/<seed>_{clean,attacked}.png.
void write_campaign(const std::filesystem::path& dir, const CampaignResult& result, bool failure_frames = false);

}  // namespace ert::orch
