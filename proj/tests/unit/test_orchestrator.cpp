#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <set>

#include "ert/common/codec.hpp"
#include "ert/common/error.hpp"
#include "ert/common/rng.hpp"
#include "ert/metrics/metrics.hpp"
#include "ert/orchestrator/campaign.hpp"
#include "ert/orchestrator/error_model.hpp"
#include "ert/orchestrator/select.hpp"

using namespace ert;
using namespace ert::orch;

namespace {

CampaignConfig config(const std::string& attack, int n, sim::TaskKind kind = sim::TaskKind::visual_manipulation) {
  CampaignConfig c;
  c.task.kind = kind;
  c.n_scenarios = n;
  c.base_seed = 100;
  c.attack = attack_from_name(attack);
  return c;
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("ert_orch_" + name);
  std::filesystem::remove_all(p);
  return p;
}

// Straight recursion: the expected cost after T steps either errs now and
// pays for every remaining step, or survives and faces a T-1 problem.
double bound_recursive(double delta, int t) {
  if (t == 0) return 0.0;
  return delta * t + (1 - delta) * bound_recursive(delta, t - 1);
}

CampaignSummary pilot(const std::string& name, const std::string& family, double sim, double success) {
  CampaignSummary s;
  s.attack = name;
  s.family = family;
  s.input_sim = sim;
  s.success_rate = success;
  s.n_episodes = s.n_valid = 30;
  return s;
}

}  // namespace

TEST_CASE("no attack gives identical twins") {
  for (auto kind : {sim::TaskKind::visual_manipulation, sim::TaskKind::sweep_without_exceeding,
                    sim::TaskKind::pick_order_restore}) {
    const auto res = run_campaign(config("no_attack", 6, kind));
    for (const auto& r : res.records) {
      REQUIRE_FALSE(r.error);
      CHECK(r.prompt_before == r.prompt_after);
      CHECK(r.input_similarity == 1.0);
      CHECK(r.action_cosine == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(r.outcome == r.clean_outcome);
      CHECK(r.clean_actions == r.attacked_actions);
    }
    CHECK(res.summary.input_sim == 1.0);
    CHECK(res.summary.family == "none");
  }
}

TEST_CASE("campaign output is byte-identical across runs") {
  for (const std::string attack : {"noun", "extension", "blur", "distortion", "add_seg"}) {
    const auto c = config(attack, 4);
    const auto a = scratch("det_a"), b = scratch("det_b");
    write_campaign(a, run_campaign(c));
    write_campaign(b, run_campaign(c));
    CHECK(read_text(a / "records.jsonl") == read_text(b / "records.jsonl"));
    CHECK(read_text(a / "summary.json") == read_text(b / "summary.json"));
  }
}

TEST_CASE("episode seeds differ per scenario and feed the attack") {
  const auto res = run_campaign(config("translation", 5));
  std::set<std::uint64_t> seeds;
  for (const auto& r : res.records) {
    CHECK(r.attack.perception.seed == mix64(episode_attack_seed(r.scenario_seed)));
    seeds.insert(r.attack.perception.seed);
  }
  CHECK(seeds.size() == 5);
}

TEST_CASE("perception records carry ssim of the first frames") {
  const auto res = run_campaign(config("noise", 3));
  for (const auto& r : res.records) {
    REQUIRE(r.input_similarity);
    CHECK(*r.input_similarity == doctest::Approx(metrics::ssim(r.clean_frame, r.attacked_frame)));
    CHECK(*r.input_similarity < 1.0);
    CHECK(*r.input_similarity > 0.0);
  }
}

TEST_CASE("literal victim collapses under the noun attack") {
  auto c = config("noun", 10);
  c.victim.kind = VictimKind::reference_literal;
  const auto res = run_campaign(c);
  CHECK(res.summary.success_rate <= 10.0);
  CHECK(res.summary.input_sim == 1.0);  // meaning preserved
  c.attack = AttackSpec::none();
  CHECK(run_campaign(c).summary.success_rate >= 90.0);
}

TEST_CASE("defense filter is applied or falls back") {
  auto c = config("noun", 3);
  c.victim.kind = VictimKind::reference_literal;
  CampaignDeps restore;
  CampaignDeps down;
  std::vector<std::string> originals;
  for (int i = 0; i < 3; ++i)
    originals.push_back(run_episode(config("no_attack", 1), c.base_seed + static_cast<std::uint64_t>(i)).prompt_before);
  int idx = 0;
  restore.defense = [&](const std::string&) { return originals[static_cast<std::size_t>(idx++)]; };
  down.defense = [](const std::string&) -> std::string { throw DefenseUnavailable("offline"); };

  const auto fixed = run_campaign(c, restore);
  for (const auto& r : fixed.records) {
    CHECK(r.defense_status == "applied");
    CHECK(r.prompt_restored == r.prompt_before);
    CHECK(r.outcome == r.clean_outcome);
  }
  const auto fallback = run_campaign(c, down);
  for (const auto& r : fallback.records) {
    CHECK(r.defense_status == "unavailable");
    CHECK_FALSE(r.prompt_restored);
  }
}

TEST_CASE("victim failures become record errors") {
  auto c = config("no_attack", 2);
  c.victim = victim_from_string("bridge:exec:true");
  std::vector<EvalRecord> recs;
  for (int i = 0; i < 2; ++i) recs.push_back(run_episode(c, static_cast<std::uint64_t>(i)));
  for (const auto& r : recs) CHECK(r.error);
  CHECK_THROWS_AS(summarize(c, recs), CampaignError);
  CHECK(to_json(recs[0])["error"].is_string());
}

TEST_CASE("external engines need a client") {
  auto c = config("noun", 1);
  c.attack.prompt.engine = prompt::Engine::external;
  CHECK_THROWS_AS(run_episode(c, 0), ConfigError);
}

TEST_CASE("summaries skip errors and missing judgements") {
  auto c = config("noun", 1);
  std::vector<EvalRecord> recs(4);
  recs[0].outcome.success = true;
  recs[0].input_similarity = 1.0;
  recs[0].action_cosine = 1.0;
  recs[1].input_similarity = 0.0;
  recs[1].action_cosine = 0.5;
  recs[2].action_cosine = 0.25;
  recs[3].error = "boom";
  const auto s = summarize(c, recs);
  CHECK(s.n_valid == 3);
  CHECK(s.n_errors == 1);
  CHECK(s.n_judge_missing == 1);
  CHECK(s.input_sim == doctest::Approx(0.5));
  CHECK(s.action_cos == doctest::Approx(1.75 / 3));
  CHECK(s.success_rate == doctest::Approx(100.0 / 3));
  const auto back = summary_from_json(nlohmann::json::parse(to_json(s).dump()));
  CHECK(back.attack == s.attack);
  CHECK(back.success_rate == s.success_rate);
  CHECK_THROWS_AS(summary_from_json(nlohmann::json{{"attack", "x"}}), ReportError);
}

TEST_CASE("config and attack JSON round trip") {
  for (const std::string name : {"no_attack", "simple", "extension", "adjective", "noun", "blurring", "noising", "filtering",
                                 "translation", "rotation", "cropping", "distortion", "add_rgb", "add_seg"}) {
    auto c = config(name, 7, sim::TaskKind::sweep_without_exceeding);
    c.task.params.quantifier = sim::Quantifier::two;
    c.victim.kind = VictimKind::reference_literal;
    const auto j = to_json(c);
    const auto back = campaign_from_json(nlohmann::json::parse(j.dump()));
    CHECK(to_json(back).dump() == j.dump());
    CHECK(back.attack.name() == name);
  }
  CHECK(attack_from_json("crop").family == AttackFamily::perception);
  CHECK_THROWS_AS(attack_from_name("melt"), ConfigError);
  CHECK_THROWS_AS(victim_from_string("robot"), ConfigError);
  CHECK_THROWS_AS(campaign_from_json(nlohmann::json{{"n_scenarios", 0}}), ConfigError);
  CHECK_THROWS_AS(campaign_from_json(nlohmann::json{{"judge", "coin"}}), ConfigError);
  CHECK(to_string(victim_from_string("bridge:tcp:localhost:9")) == "bridge:tcp:localhost:9");
}

TEST_CASE("failure exhibits are written for failed episodes") {
  auto c = config("noun", 3);
  c.victim.kind = VictimKind::reference_literal;
  const auto res = run_campaign(c);
  const auto dir = scratch("exhibits");
  write_campaign(dir, res, true);
  for (const auto& r : res.records) {
    const auto f = dir / "failures" / (std::to_string(r.scenario_seed) + "_attacked.png");
    CHECK(std::filesystem::exists(f) == !r.outcome.success);
  }
}

TEST_CASE("error bound matches the recursion") {
  for (double delta : {0.0, 0.01, 0.1, 0.25, 0.5, 0.9, 1.0})
    for (int t : {1, 2, 5, 10, 25, 60}) {
      ErrorModelParams p{delta, t, 1000};
      CHECK(std::abs(delta_bound(p) - bound_recursive(delta, t)) < 1e-12 * std::max(1.0, bound_recursive(delta, t)));
    }
  CHECK(delta_bound({1.0, 10, 1000}) == doctest::Approx(10.0));
  CHECK(delta_bound({0.0, 10, 1000}) == 0.0);
}

TEST_CASE("error bound properties") {
  for (int t = 1; t <= 30; ++t)
    for (int i = 0; i <= 20; ++i) {
      const double d = i / 20.0;
      const double b = delta_bound({d, t, 1000});
      CHECK(b <= d * t * t + 1e-12);
      CHECK(b <= t + 1e-12);
      if (i > 0) CHECK(b >= delta_bound({(i - 1) / 20.0, t, 1000}));
      if (t > 1) CHECK(b >= delta_bound({d, t - 1, 1000}));
    }
  CHECK_THROWS_AS(delta_bound({1.5, 10, 1000}), ConfigError);
  CHECK_THROWS_AS(delta_bound({0.1, 0, 1000}), ConfigError);
  CHECK_THROWS_AS(delta_monte_carlo({0.1, 10, 999}, 0), ConfigError);
}

TEST_CASE("Monte Carlo agrees with the bound") {
  for (double delta : {0.02, 0.1, 0.3})
    for (int t : {5, 10, 20}) {
      const ErrorModelParams p{delta, t, 100000};
      const auto mc = delta_monte_carlo(p, 9);
      CHECK(std::abs(mc.mean - delta_bound(p)) <= 3 * mc.std_error);
      CHECK(mc.std_error > 0);
    }
  const auto a = delta_monte_carlo({0.1, 10, 5000}, 4), b = delta_monte_carlo({0.1, 10, 5000}, 4);
  CHECK(a.mean == b.mean);
}

TEST_CASE("selector matches brute force") {
  std::mt19937_64 gen(5);
  const std::vector<std::string> families{"prompt", "perception", "none"};
  for (int menu = 0; menu < 20; ++menu) {
    std::vector<CampaignSummary> pilots;
    const int n = 2 + static_cast<int>(gen() % 8);
    for (int i = 0; i < n; ++i)
      pilots.push_back(pilot("a" + std::to_string(i), families[gen() % 3], (gen() % 5) / 4.0, (gen() % 4) * 25.0));
    const SimilarityConstraint c{0.5, 0.75};

    std::vector<std::size_t> ok;
    for (std::size_t i = 0; i < pilots.size(); ++i) {
      const auto& p = pilots[i];
      const double need = p.family == "prompt" ? 0.5 : p.family == "perception" ? 0.75 : -1.0;
      if (p.input_sim >= need) ok.push_back(i);
    }
    if (ok.empty()) {
      CHECK_THROWS_AS(select_attack(pilots, c), SelectionError);
      continue;
    }
    double low = 1e9;
    for (auto i : ok) low = std::min(low, pilots[i].success_rate);
    double hi_sim = -1;
    for (auto i : ok)
      if (pilots[i].success_rate == low) hi_sim = std::max(hi_sim, pilots[i].input_sim);
    std::string name = "~";
    for (auto i : ok)
      if (pilots[i].success_rate == low && pilots[i].input_sim == hi_sim) name = std::min(name, pilots[i].attack);

    CHECK(pilots[select_attack(pilots, c)].attack == name);
    std::shuffle(pilots.begin(), pilots.end(), gen);
    CHECK(pilots[select_attack(pilots, c)].attack == name);
  }
}

TEST_CASE("selector rejects empty admissible sets") {
  const SimilarityConstraint c{0.5, 0.75};
  CHECK_THROWS_AS(select_attack({}, c), SelectionError);
  CHECK_THROWS_AS(select_attack({pilot("blur", "perception", 0.7, 0)}, c), SelectionError);
  CHECK(select_attack({pilot("blur", "perception", 0.7, 0), pilot("crop", "perception", 0.8, 50)}, c) == 1);
  auto empty = pilot("noun", "prompt", 1.0, 0);
  empty.n_valid = 0;
  CHECK_FALSE(admissible(empty, c));
}

TEST_CASE("heuristic selection runs pilots") {
  AttackProblem problem;
  problem.candidates = {attack_from_name("simple"), attack_from_name("noun"), attack_from_name("rotation")};
  problem.pilot_size = 4;
  auto c = config("no_attack", 150);
  c.victim.kind = VictimKind::reference_literal;
  const auto sel = heuristic_select(problem, c);
  REQUIRE(sel.pilots.size() == 3);
  CHECK(sel.chosen.name() == "noun");
  for (const auto& p : sel.pilots) CHECK(p.n_episodes == 4);
  problem.candidates.clear();
  CHECK_THROWS_AS(heuristic_select(problem, c), ConfigError);
}
