#include <doctest.h>

#include "ert/common/error.hpp"
#include "ert/defense/restore.hpp"
#include "ert/prompt/parse.hpp"
#include "ert/prompt/rephrase.hpp"
#include "ert/sim/generate.hpp"

using namespace ert;
using namespace ert::defense;

namespace {

std::vector<sim::TaskSpec> tasks() {
  std::vector<sim::TaskSpec> out;
  for (auto level : {sim::Level::placement, sim::Level::combinatorial, sim::Level::novel_object}) {
    sim::TaskSpec vm{sim::TaskKind::visual_manipulation, level, {}};
    out.push_back(vm);
    vm.params.n_targets = 2;
    out.push_back(vm);
    out.push_back({sim::TaskKind::scene_understanding, level, {}});
    for (auto q : {sim::Quantifier::any, sim::Quantifier::one, sim::Quantifier::all}) {
      sim::TaskSpec s{sim::TaskKind::sweep_without_exceeding, level, {}};
      s.params.quantifier = q;
      out.push_back(s);
    }
    for (int len : {1, 2}) {
      sim::TaskSpec r{sim::TaskKind::pick_order_restore, level, {}};
      r.params.sequence_length = len;
      out.push_back(r);
    }
  }
  return out;
}

// 24 task variants x 21 seeds = 504 prompts.
std::vector<prompt::Prompt> prompts() {
  std::vector<prompt::Prompt> out;
  for (const auto& t : tasks())
    for (std::uint64_t s = 0; s < 21; ++s) {
      const auto sc = sim::generate_scenario(t, s);
      out.push_back(prompt::generate_prompt(t, sc.goal, sc.scene));
    }
  return out;
}

prompt::Prompt attack(const prompt::Prompt& p, prompt::PromptAttackKind k, std::uint64_t seed) {
  prompt::PromptAttackSpec spec;
  spec.kind = k;
  spec.seed = seed;
  return prompt::rule_rephrase(p, spec, prompt::SynonymTable::standard()).prompt;
}

class FakeClient : public prompt::LlmClient {
 public:
  std::string reply;
  bool fail = false;
  std::vector<std::string> seen;
  std::string complete(const std::string& p) override {
    seen.push_back(p);
    if (fail) throw TransportError("down");
    return reply;
  }
};

orch::CampaignConfig literal_vm(int n) {
  orch::CampaignConfig c;
  c.n_scenarios = n;
  c.base_seed = 7;
  c.victim.kind = orch::VictimKind::reference_literal;
  return c;
}

}  // namespace

TEST_CASE("synonym attacks are undone exactly") {
  const auto ps = prompts();
  REQUIRE(ps.size() >= 500);
  std::uint64_t seed = 0;
  for (const auto& p : ps)
    for (auto k : {prompt::PromptAttackKind::adjective, prompt::PromptAttackKind::noun}) {
      const auto a = attack(p, k, ++seed);
      const auto r = restore_rule_based(a);
      CHECK(r.prompt.text() == p.text());
      CHECK_FALSE(r.partial);
    }
}

TEST_CASE("frame and filler attacks restore to the canonical prompt") {
  const auto& table = prompt::SynonymTable::standard();
  std::uint64_t seed = 0;
  for (const auto& p : prompts())
    for (auto k : {prompt::PromptAttackKind::simple, prompt::PromptAttackKind::extension}) {
      const auto a = attack(p, k, ++seed);
      const auto r = restore_rule_based(a);
      CHECK(prompt::parse_prompt(r.prompt.text(), table) == prompt::parse_prompt(p.text(), table));
      CHECK(r.prompt.text() == p.text());
      CHECK_FALSE(r.partial);
    }
}

TEST_CASE("every frame is recognised") {
  for (const auto& p : prompts())
    for (int f = 0; f < prompt::kFrameCount; ++f)
      CHECK(restore_rule_based(prompt::apply_frame(p, f)).prompt.text() == p.text());
}

TEST_CASE("canonical prompts are fixed points") {
  for (const auto& p : prompts()) {
    const auto r = restore_rule_based(p);
    CHECK(r.prompt.text() == p.text());
    CHECK_FALSE(r.partial);
  }
}

TEST_CASE("unknown words are flagged") {
  const auto r = restore_rule_based(
      prompt::Prompt::from_text("Put the glittery widget into the crimson bowl.", sim::TaskKind::visual_manipulation));
  CHECK(r.partial);
  CHECK(r.unmapped == std::vector<std::string>{"glittery", "widget"});
  CHECK(r.prompt.text() == "Put the glittery widget into the red bowl.");
}

TEST_CASE("external restorer request and failures") {
  sim::TaskSpec vm;
  const auto ctx = default_context(vm);
  REQUIRE(ctx.examples.size() == 30);
  CHECK(default_context(vm).examples.size() == 30);

  FakeClient client;
  client.reply = "  Put the red block into the blue bowl.\n";
  const auto attacked = prompt::Prompt::from_text("Put the crimson cubic brick into the azure basin.", vm.kind);
  CHECK(restore_external(attacked, ctx, client).text() == "Put the red block into the blue bowl.");

  const std::string& req = client.seen.front();
  CHECK(req.rfind(ctx.instruction, 0) == 0);
  std::size_t pos = 0;
  for (const auto& e : ctx.examples) {
    const std::string pair = "Adversarial: " + e.adversarial + "\nOriginal: " + e.original + "\n";
    const auto at = req.find(pair, pos);
    REQUIRE(at != std::string::npos);
    pos = at + pair.size();
  }
  CHECK(req.substr(pos) == "\nAdversarial: " + attacked.text() + "\nOriginal:");

  client.reply = " \n";
  CHECK_THROWS_AS(restore_external(attacked, ctx, client), DefenseUnavailable);
  client.fail = true;
  CHECK_THROWS_AS(restore_external(attacked, ctx, client), DefenseUnavailable);
  CHECK_THROWS_AS(restore_external(attacked, RestorationContext{}, client), ConfigError);
}

TEST_CASE("restoration context JSON round trip") {
  const auto ctx = default_context({}, 5, 3);
  const auto back = context_from_json(nlohmann::json::parse(to_json(ctx).dump()));
  CHECK(to_json(back).dump() == to_json(ctx).dump());
  CHECK_THROWS_AS(context_from_json(nlohmann::json{{"examples", nlohmann::json::array()}}), ConfigError);
  CHECK_THROWS_AS(context_from_json(nlohmann::json{{"instruction", "x"}}), ConfigError);
}

TEST_CASE("defended campaign defaults and row shape") {
  DefenseConfig d;
  CHECK(d.campaign.n_scenarios == 50);
  d.campaign = literal_vm(4);
  const auto t = run_defended_campaign(d);
  REQUIRE(t.rows.size() == 5);
  const std::vector<std::string> names{"no_attack", "simple", "extension", "adjective", "noun"};
  for (std::size_t i = 0; i < 5; ++i) CHECK(t.rows[i].attack == names[i]);
}

TEST_CASE("rule-based defense restores literal-victim success") {
  DefenseConfig d;
  d.campaign = literal_vm(12);
  const auto t = run_defended_campaign(d);
  const double clean = t.rows[0].success_rate;
  for (const auto& row : t.rows) CHECK(row.success_rate == clean);

  auto undefended = literal_vm(12);
  undefended.attack = orch::attack_from_name("no_attack");
  CHECK(orch::run_campaign(undefended).summary.success_rate == clean);
  undefended.attack = orch::attack_from_name("noun");
  CHECK(orch::run_campaign(undefended).summary.success_rate < clean);
}

TEST_CASE("no restorer equals the undefended campaign") {
  DefenseConfig d;
  d.campaign = literal_vm(4);
  d.restorer = Restorer::none;
  const auto t = run_defended_campaign(d);
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    auto c = literal_vm(4);
    c.attack = orch::attack_from_name(t.rows[i].attack);
    CHECK(orch::to_json(orch::run_campaign(c).summary).dump() == orch::to_json(t.rows[i]).dump());
  }
}

TEST_CASE("external defense falls back when the endpoint fails") {
  FakeClient client;
  client.fail = true;
  DefenseConfig d;
  d.campaign = literal_vm(2);
  d.restorer = Restorer::external;
  CHECK_THROWS_AS(run_defended_campaign(d), ConfigError);
  orch::CampaignDeps deps;
  deps.llm = &client;
  const auto t = run_defended_campaign(d, deps);
  for (const auto& r : t.runs[4].records) CHECK(r.defense_status == "unavailable");
  CHECK(restorer_from_string("rule_based") == Restorer::rule_based);
  CHECK_THROWS_AS(restorer_from_string("magic"), ConfigError);
}
