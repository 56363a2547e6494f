#include "ert/orchestrator/select.hpp"

#include "ert/common/error.hpp"
#include "ert/common/rng.hpp"

namespace ert::orch {

void AttackProblem::validate() const {
  if (candidates.empty()) throw ConfigError("attack problem has no candidates");
  if (pilot_size < 1) throw ConfigError("pilot size must be at least 1");
  if (constraint.prompt_similarity_min < 0 || constraint.prompt_similarity_min > 1 || constraint.ssim_min < -1 ||
      constraint.ssim_min > 1)
    throw ConfigError("similarity thresholds out of range");
}

bool admissible(const CampaignSummary& pilot, const SimilarityConstraint& c) {
  if (pilot.n_valid == 0) return false;
  if (pilot.family == "prompt") return pilot.input_sim >= c.prompt_similarity_min;
  if (pilot.family == "perception") return pilot.input_sim >= c.ssim_min;
  return true;
}

std::size_t select_attack(const std::vector<CampaignSummary>& pilots, const SimilarityConstraint& c) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < pilots.size(); ++i) {
    if (!admissible(pilots[i], c)) continue;
    if (!best) {
      best = i;
      continue;
    }
    const auto& a = pilots[i];
    const auto& b = pilots[*best];
    if (a.success_rate != b.success_rate) {
      if (a.success_rate < b.success_rate) best = i;
    } else if (a.input_sim != b.input_sim) {
      if (a.input_sim > b.input_sim) best = i;
    } else if (a.attack < b.attack) {
      best = i;
    }
  }
  if (!best) throw SelectionError("no candidate attack meets the similarity constraint");
  return *best;
}

std::uint64_t pilot_seed(std::uint64_t base_seed) { return seed_for(base_seed, "pilot"); }

Selection heuristic_select(const AttackProblem& problem, const CampaignConfig& config, const CampaignDeps& deps) {
  problem.validate();
  Selection s;
  for (const auto& cand : problem.candidates) {
    CampaignConfig c = config;
    c.attack = cand;
    c.n_scenarios = problem.pilot_size;
    c.base_seed = pilot_seed(config.base_seed);
    CampaignSummary pilot;
    try {
      pilot = run_campaign(c, deps).summary;
    } catch (const CampaignError&) {
      pilot.task = std::string(sim::to_string(c.task.kind));
      pilot.attack = cand.name();
      pilot.family = cand.family == AttackFamily::none ? "none" : cand.family == AttackFamily::prompt ? "prompt" : "perception";
      pilot.n_episodes = problem.pilot_size;
      pilot.n_errors = problem.pilot_size;
    }
    s.pilots.push_back(pilot);
  }
  s.chosen = problem.candidates[select_attack(s.pilots, problem.constraint)];
  return s;
}

}  // namespace ert::orch
