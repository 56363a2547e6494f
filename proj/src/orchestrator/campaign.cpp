#include "ert/orchestrator/campaign.hpp"

#include <fstream>

#include "ert/common/codec.hpp"
#include "ert/common/error.hpp"
#include "ert/common/rng.hpp"
#include "ert/prompt/prompt.hpp"
#include "ert/sim/dynamics.hpp"
#include "ert/sim/render.hpp"
#include "ert/victim/bridge.hpp"

namespace ert::orch {

namespace {

std::string_view family_name(AttackFamily f) {
  switch (f) {
    case AttackFamily::none: return "none";
    case AttackFamily::prompt: return "prompt";
    case AttackFamily::perception: return "perception";
  }
  return "";
}

nlohmann::ordered_json actions_json(const std::vector<std::optional<sim::StepAction>>& v) {
  auto arr = nlohmann::ordered_json::array();
  for (const auto& a : v) arr.push_back(a ? sim::to_json(*a) : nlohmann::ordered_json(nullptr));
  return arr;
}

std::string_view engine_name(prompt::Engine e) { return e == prompt::Engine::rule_based ? "rule_based" : "external"; }

prompt::Engine engine_from(const std::string& s) {
  if (s == "rule_based") return prompt::Engine::rule_based;
  if (s == "external") return prompt::Engine::external;
  throw ConfigError("unknown prompt engine: " + s);
}

}  // namespace

AttackSpec AttackSpec::of_prompt(prompt::PromptAttackKind k, prompt::Engine e) {
  AttackSpec a;
  a.family = AttackFamily::prompt;
  a.prompt.kind = k;
  a.prompt.engine = e;
  return a;
}

AttackSpec AttackSpec::of_perception(percept::PerceptKind k) {
  AttackSpec a;
  a.family = AttackFamily::perception;
  a.perception.kind = k;
  return a;
}

std::string AttackSpec::name() const {
  switch (family) {
    case AttackFamily::none: return "no_attack";
    case AttackFamily::prompt: return std::string(prompt::to_string(prompt.kind));
    case AttackFamily::perception: return std::string(percept::to_string(perception.kind));
  }
  return "";
}

AttackSpec attack_from_name(const std::string& name, prompt::Engine engine) {
  if (name == "none" || name == "no_attack") return AttackSpec::none();
  if (auto k = prompt::prompt_attack_from_string(name)) return AttackSpec::of_prompt(*k, engine);
  if (auto k = percept::percept_kind_from_string(name)) return AttackSpec::of_perception(*k);
  throw ConfigError("unknown attack: " + name);
}

nlohmann::ordered_json to_json(const AttackSpec& a) {
  switch (a.family) {
    case AttackFamily::none: return {{"family", "none"}, {"kind", "no_attack"}};
    case AttackFamily::prompt: {
      nlohmann::ordered_json j;
      j["family"] = "prompt";
      j["kind"] = prompt::to_string(a.prompt.kind);
      j["engine"] = engine_name(a.prompt.engine);
      j["seed"] = a.prompt.seed;
      return j;
    }
    case AttackFamily::perception: return percept::to_json(a.perception);
  }
  return {};
}

AttackSpec attack_from_json(const nlohmann::json& j) {
  if (j.is_string()) return attack_from_name(j.get<std::string>());
  try {
    const std::string family = j.value("family", std::string());
    const std::string kind = j.value("kind", std::string());
    if (family == "perception" || (family.empty() && percept::percept_kind_from_string(kind))) {
      AttackSpec a;
      a.family = AttackFamily::perception;
      a.perception = percept::percept_spec_from_json(j);
      return a;
    }
    if (family == "none" || kind == "no_attack" || kind == "none") return AttackSpec::none();
    AttackSpec a = attack_from_name(kind, engine_from(j.value("engine", std::string("rule_based"))));
    if (a.family != AttackFamily::prompt) throw ConfigError("attack family does not match kind " + kind);
    a.prompt.seed = j.value("seed", std::uint64_t{0});
    return a;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad attack spec: ") + e.what());
  }
}

std::string to_string(const VictimSpec& v) {
  switch (v.kind) {
    case VictimKind::reference_normalizing: return "reference_normalizing";
    case VictimKind::reference_literal: return "reference_literal";
    case VictimKind::bridge: return "bridge:" + v.endpoint;
  }
  return "";
}

VictimSpec victim_from_string(const std::string& s) {
  VictimSpec v;
  if (s == "reference_normalizing" || s == "normalizing") {
    v.kind = VictimKind::reference_normalizing;
  } else if (s == "reference_literal" || s == "literal") {
    v.kind = VictimKind::reference_literal;
  } else if (s.rfind("bridge:", 0) == 0 && s.size() > 7) {
    v.kind = VictimKind::bridge;
    v.endpoint = s.substr(7);
  } else {
    throw ConfigError("unknown victim: " + s);
  }
  return v;
}

std::unique_ptr<victim::Victim> make_victim(const VictimSpec& v) {
  switch (v.kind) {
    case VictimKind::reference_normalizing: {
      auto c = v.config;
      c.synonym_normalization = true;
      return std::make_unique<victim::ReferenceVictim>(c);
    }
    case VictimKind::reference_literal: {
      auto c = v.config;
      c.synonym_normalization = false;
      return std::make_unique<victim::ReferenceVictim>(c);
    }
    case VictimKind::bridge: return std::make_unique<victim::BridgeVictim>(v.endpoint);
  }
  throw ConfigError("unknown victim kind");
}

void CampaignConfig::validate() const {
  task.validate();
  if (n_scenarios < 1) throw ConfigError("n_scenarios must be at least 1");
  victim.config.validate();
  if (attack.family == AttackFamily::perception) attack.perception.validate();
  if (victim.kind == VictimKind::bridge && victim.endpoint.empty()) throw ConfigError("bridge victim needs an endpoint");
}

nlohmann::ordered_json to_json(const CampaignConfig& c) {
  nlohmann::ordered_json j;
  j["task"] = sim::to_json(c.task);
  j["n_scenarios"] = c.n_scenarios;
  j["seed"] = c.base_seed;
  j["attack"] = to_json(c.attack);
  j["victim"] = to_string(c.victim);
  j["victim_config"] = {{"color_tolerance", c.victim.config.color_tolerance},
                        {"shape_match_threshold", c.victim.config.shape_match_threshold}};
  j["judge"] = c.judge == JudgeKind::deterministic ? "deterministic" : "external";
  return j;
}

CampaignConfig campaign_from_json(const nlohmann::json& j) {
  CampaignConfig c;
  try {
    if (j.contains("task")) c.task = sim::task_from_json(nlohmann::ordered_json(j.at("task")));
    c.n_scenarios = j.value("n_scenarios", c.n_scenarios);
    c.base_seed = j.value("seed", c.base_seed);
    if (j.contains("attack")) c.attack = attack_from_json(j.at("attack"));
    if (j.contains("victim")) c.victim = victim_from_string(j.at("victim").get<std::string>());
    if (j.contains("victim_config")) {
      const auto& vc = j.at("victim_config");
      c.victim.config.color_tolerance = vc.value("color_tolerance", c.victim.config.color_tolerance);
      c.victim.config.shape_match_threshold = vc.value("shape_match_threshold", c.victim.config.shape_match_threshold);
    }
    const std::string judge = j.value("judge", std::string("deterministic"));
    if (judge == "deterministic")
      c.judge = JudgeKind::deterministic;
    else if (judge == "external")
      c.judge = JudgeKind::external;
    else
      throw ConfigError("unknown judge: " + judge);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad campaign config: ") + e.what());
  }
  c.validate();
  return c;
}

Rollout rollout(const sim::TaskSpec& task, const sim::Scenario& scenario, const std::string& prompt_text,
                victim::Victim& v, const std::optional<percept::PerceptionAttackSpec>& frame_attack) {
  Rollout r;
  v.reset(task, prompt_text);
  std::vector<sim::Scene> scenes{scenario.scene};
  std::vector<victim::HistoryEntry> history;
  const int budget = sim::step_budget(task);
  for (int step = 0; step < budget; ++step) {
    Frame f = sim::render(scenes.back());
    if (frame_attack) f = percept::apply_perception_attack(f, *frame_attack);
    if (step == 0) r.first_frame = f;
    victim::Observation obs{f, prompt_text, history, step};
    const auto a = v.act(obs);
    history.push_back({victim::frame_digest(f), a});
    r.actions.push_back(a);
    scenes.push_back(a ? sim::apply_action(scenes.back(), task, *a) : scenes.back());
    r.outcome = sim::check_success(task, scenario.goal, scenes);
    if (r.outcome.success) break;
  }
  return r;
}

std::uint64_t episode_attack_seed(std::uint64_t scenario_seed) { return seed_for(scenario_seed, "attack"); }

EvalRecord run_episode(const CampaignConfig& config, std::uint64_t scenario_seed, const CampaignDeps& deps) {
  EvalRecord r;
  r.scenario_seed = scenario_seed;
  r.task = config.task;
  r.attack = config.attack;
  r.attack.prompt.seed = mix64(config.attack.prompt.seed ^ episode_attack_seed(scenario_seed));
  r.attack.perception.seed = mix64(config.attack.perception.seed ^ episode_attack_seed(scenario_seed));

  try {
    const auto scenario = sim::generate_scenario(config.task, scenario_seed);
    const auto p = prompt::generate_prompt(config.task, scenario.goal, scenario.scene);
    r.prompt_before = p.text();
    r.prompt_after = r.prompt_before;

    auto clean_victim = make_victim(config.victim);
    const Rollout clean = rollout(config.task, scenario, r.prompt_before, *clean_victim);
    r.clean_actions = clean.actions;
    r.clean_outcome = clean.outcome;
    r.clean_frame = clean.first_frame;

    if (r.attack.family == AttackFamily::prompt) {
      if (r.attack.prompt.engine == prompt::Engine::rule_based) {
        r.prompt_after = prompt::rule_rephrase(p, r.attack.prompt, prompt::SynonymTable::standard()).prompt.text();
      } else {
        if (!deps.llm) throw ConfigError("external prompt engine needs an LLM endpoint");
        r.prompt_after = prompt::external_rephrase(p, r.attack.prompt, *deps.llm).text();
      }
    }

    std::string fed = r.prompt_after;
    if (deps.defense) {
      try {
        fed = deps.defense(r.prompt_after);
        r.prompt_restored = fed;
        r.defense_status = "applied";
      } catch (const DefenseUnavailable&) {
        r.defense_status = "unavailable";
      }
    }

    std::optional<percept::PerceptionAttackSpec> frame_attack;
    if (r.attack.family == AttackFamily::perception) frame_attack = r.attack.perception;

    Rollout attacked;
    if (!frame_attack && fed == r.prompt_before) {
      attacked = clean;
    } else {
      auto v = make_victim(config.victim);
      attacked = rollout(config.task, scenario, fed, *v, frame_attack);
    }
    r.attacked_actions = attacked.actions;
    r.outcome = attacked.outcome;
    r.attacked_frame = attacked.first_frame;

    switch (r.attack.family) {
      case AttackFamily::none: r.input_similarity = 1.0; break;
      case AttackFamily::prompt:
        if (config.judge == JudgeKind::deterministic) {
          metrics::ParseJudge judge;
          if (auto s = judge.same(r.prompt_before, r.prompt_after)) r.input_similarity = *s ? 1.0 : 0.0;
        } else {
          if (!deps.llm) throw ConfigError("external judge needs an LLM endpoint");
          metrics::LlmJudge judge(*deps.llm);
          if (auto s = judge.same(r.prompt_before, r.prompt_after)) r.input_similarity = *s ? 1.0 : 0.0;
        }
        break;
      case AttackFamily::perception: r.input_similarity = metrics::ssim(clean.first_frame, attacked.first_frame); break;
    }
    const int k_max = sim::step_budget(config.task);
    r.action_cosine = metrics::action_cosine(metrics::embed_actions(r.clean_actions, k_max),
                                             metrics::embed_actions(r.attacked_actions, k_max));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    r.error = e.what();
  }
  return r;
}

nlohmann::ordered_json to_json(const EvalRecord& r) {
  nlohmann::ordered_json j;
  j["scenario_seed"] = r.scenario_seed;
  j["task"] = sim::to_json(r.task);
  j["attack"] = to_json(r.attack);
  j["prompt_before"] = r.prompt_before;
  j["prompt_after"] = r.prompt_after;
  if (r.prompt_restored) j["prompt_restored"] = *r.prompt_restored;
  if (r.defense_status) j["defense"] = *r.defense_status;
  nlohmann::ordered_json m;
  m["input_similarity"] = r.input_similarity ? nlohmann::ordered_json(*r.input_similarity) : nlohmann::ordered_json(nullptr);
  m["action_cosine"] = r.action_cosine;
  m["success"] = r.outcome.success;
  j["metrics"] = m;
  j["outcome"] = sim::to_json(r.outcome);
  j["clean_outcome"] = sim::to_json(r.clean_outcome);
  j["actions"] = {{"clean", actions_json(r.clean_actions)}, {"attacked", actions_json(r.attacked_actions)}};
  j["error"] = r.error ? nlohmann::ordered_json(*r.error) : nlohmann::ordered_json(nullptr);
  return j;
}

nlohmann::ordered_json to_json(const CampaignSummary& s) {
  nlohmann::ordered_json j;
  j["task"] = s.task;
  j["attack"] = s.attack;
  j["family"] = s.family;
  j["input_sim"] = s.input_sim;
  j["action_cos"] = s.action_cos;
  j["success_rate"] = s.success_rate;
  j["n_episodes"] = s.n_episodes;
  j["n_valid"] = s.n_valid;
  j["n_errors"] = s.n_errors;
  j["n_judge_missing"] = s.n_judge_missing;
  return j;
}

CampaignSummary summary_from_json(const nlohmann::json& j) {
  CampaignSummary s;
  try {
    s.task = j.at("task").get<std::string>();
    s.attack = j.at("attack").get<std::string>();
    s.family = j.at("family").get<std::string>();
    s.input_sim = j.at("input_sim").get<double>();
    s.action_cos = j.at("action_cos").get<double>();
    s.success_rate = j.at("success_rate").get<double>();
    s.n_episodes = j.value("n_episodes", 0);
    s.n_valid = j.value("n_valid", 0);
    s.n_errors = j.value("n_errors", 0);
    s.n_judge_missing = j.value("n_judge_missing", 0);
  } catch (const nlohmann::json::exception& e) {
    throw ReportError(std::string("summary does not have the campaign schema: ") + e.what());
  }
  return s;
}

CampaignSummary summarize(const CampaignConfig& config, const std::vector<EvalRecord>& records) {
  CampaignSummary s;
  s.task = std::string(sim::to_string(config.task.kind));
  s.attack = config.attack.name();
  s.family = std::string(family_name(config.attack.family));
  s.n_episodes = static_cast<int>(records.size());
  double sim_sum = 0, cos_sum = 0;
  int sim_n = 0;
  std::vector<sim::EpisodeOutcome> outcomes;
  for (const auto& r : records) {
    if (r.error) {
      ++s.n_errors;
      continue;
    }
    outcomes.push_back(r.outcome);
    cos_sum += r.action_cosine;
    if (r.input_similarity) {
      sim_sum += *r.input_similarity;
      ++sim_n;
    } else {
      ++s.n_judge_missing;
    }
  }
  s.n_valid = static_cast<int>(outcomes.size());
  if (s.n_valid == 0) throw CampaignError("campaign has no valid episodes");
  s.success_rate = metrics::success_rate(outcomes);
  s.action_cos = cos_sum / s.n_valid;
  s.input_sim = sim_n ? sim_sum / sim_n : 0.0;
  return s;
}

CampaignResult run_campaign(const CampaignConfig& config, const CampaignDeps& deps) {
  config.validate();
  CampaignResult res;
  res.records.reserve(static_cast<std::size_t>(config.n_scenarios));
  for (int i = 0; i < config.n_scenarios; ++i)
    res.records.push_back(run_episode(config, config.base_seed + static_cast<std::uint64_t>(i), deps));
  res.summary = summarize(config, res.records);
  return res;
}

void write_campaign(const std::filesystem::path& dir, const CampaignResult& result, bool failure_frames) {
  std::filesystem::create_directories(dir);
  std::string lines;
  for (const auto& r : result.records) lines += to_json(r).dump() + "\n";
  write_text(dir / "records.jsonl", lines);
  write_text(dir / "summary.json", to_json(result.summary).dump(2) + "\n");
  if (!failure_frames) return;
  const auto fdir = dir / "failures";
  for (const auto& r : result.records) {
    if (r.error || r.outcome.success || r.clean_frame.rgb.empty() || r.attacked_frame.rgb.empty()) continue;
    std::filesystem::create_directories(fdir);
    const std::string stem = std::to_string(r.scenario_seed);
    write_bytes(fdir / (stem + "_clean.png"), encode_frame_rgb(r.clean_frame));
    write_bytes(fdir / (stem + "_attacked.png"), encode_frame_rgb(r.attacked_frame));
  }
}

}  // namespace ert::orch
