#pragma once

#include <cstdint>
#include <vector>

#include "ert/orchestrator/campaign.hpp"

namespace ert::orch {

struct SimilarityConstraint {
  double prompt_similarity_min = 0.5;
  double ssim_min = 0.75;
};

struct AttackProblem {
  std::vector<AttackSpec> candidates;
  SimilarityConstraint constraint;
  int pilot_size = 30;

  void validate() const;  // throws ConfigError
};

// Membership of a pilot result in the admissible set.
bool admissible(const CampaignSummary& pilot, const SimilarityConstraint& c);

// Index of the admissible pilot with the lowest success rate; ties go to
// higher similarity, then the smaller attack name. Throws SelectionError
// when no pilot is admissible.
std::size_t select_attack(const std::vector<CampaignSummary>& pilots, const SimilarityConstraint& c);

struct Selection {
  AttackSpec chosen;
  std::vector<CampaignSummary> pilots;  // in candidate order
};

// Runs a pilot campaign of problem.pilot_size scenarios per candidate with
// the config's task and victim, then selects. Pilot scenario seeds start at
// pilot_seed(config.base_seed) so they stay apart from evaluation seeds.
std::uint64_t pilot_seed(std::uint64_t base_seed);

Selection heuristic_select(const AttackProblem& problem, const CampaignConfig& config, const CampaignDeps& deps = {});

}  // namespace ert::orch
