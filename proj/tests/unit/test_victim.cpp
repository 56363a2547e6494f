#include <doctest.h>

#include <sstream>
#include <future>
#include <thread>

#include "ert/common/codec.hpp"
#include "ert/common/error.hpp"
#include "ert/percept/attacks.hpp"
#include "ert/prompt/prompt.hpp"
#include "ert/prompt/rephrase.hpp"
#include "ert/sim/dynamics.hpp"
#include "ert/sim/generate.hpp"
#include "ert/sim/render.hpp"
#include "ert/victim/bridge.hpp"
#include "ert/victim/victim.hpp"

using namespace ert;
using namespace ert::victim;

namespace {

sim::TaskSpec vm_task() { return {sim::TaskKind::visual_manipulation, sim::Level::placement, {}}; }

sim::EpisodeOutcome rollout(const sim::TaskSpec& t, const sim::Scenario& sc, const std::string& prompt, Victim& v) {
  v.reset(t, prompt);
  std::vector<sim::Scene> hist{sc.scene};
  sim::EpisodeOutcome out;
  for (int step = 0; step < sim::step_budget(t); ++step) {
    Observation obs{sim::render(hist.back()), prompt, {}, step};
    const auto a = v.act(obs);
    hist.push_back(a ? sim::apply_action(hist.back(), t, *a) : hist.back());
    out = sim::check_success(t, sc.goal, hist);
    if (out.success) break;
  }
  return out;
}

sim::ObjectInstance obj(int id, sim::ObjectKind k, sim::TextureId t, Vec2 pos, double scale = 0.08) {
  sim::ObjectInstance o;
  o.id = id;
  o.kind = k;
  o.texture = t;
  o.pos = pos;
  o.scale = scale;
  return o;
}

}  // namespace

TEST_CASE("perception recovers every rendered object") {
  for (int k = 0; k < 4; ++k)
    for (auto level : {sim::Level::placement, sim::Level::combinatorial, sim::Level::novel_object})
      for (std::uint64_t s = 0; s < 12; ++s) {
        const sim::TaskSpec t{static_cast<sim::TaskKind>(k), level, {}};
        const auto sc = sim::generate_scenario(t, s);
        const auto seen = perceive(sim::render(sc.scene));
        CHECK(seen.size() == sc.scene.objects.size());
        for (const auto& d : seen) {
          const auto* g = sc.scene.find(d.label);
          REQUIRE(g != nullptr);
          CHECK(d.kind == g->kind);
          CHECK(d.texture == g->texture);
          CHECK(d.confidence >= 0.6);
          const Vec2 err = sim::to_px(d.centroid - g->pos, kFrameWidth, kFrameHeight);
          CHECK(norm(err) < 2.0);
        }
      }
  CHECK(perceive(Frame::blank()).empty());
}

TEST_CASE("phantom segment is perceived as an extra object") {
  sim::Scene s;
  s.objects = {obj(3, sim::ObjectKind::block, sim::TextureId::red, {0.2, 0.5})};
  const Frame f = sim::render(s);
  percept::PerceptionAttackSpec a;
  a.kind = percept::PerceptKind::add_seg;
  a.params.rect = percept::PixelRect{150, 30, 40, 30};
  const auto seen = perceive(percept::apply_perception_attack(f, a));
  REQUIRE(seen.size() == 2);
  CHECK(seen[0].label == 3);
  CHECK(seen[1].label == 3);
  // Same label: the larger phantom sorts first and matches nothing.
  CHECK(seen[0].area > seen[1].area);
  CHECK(seen[0].texture != sim::TextureId::red);
  CHECK(seen[1].kind == sim::ObjectKind::block);
  CHECK(seen[1].texture == sim::TextureId::red);
  const auto m = match({sim::TextureId::red, std::string("block"), {}}, seen);
  REQUIRE(m);
  CHECK(m->area == seen[1].area);
}

TEST_CASE("maximising the red channel confuses textures that differ only in red") {
  sim::Scene s;
  s.objects = {obj(1, sim::ObjectKind::block, sim::TextureId::green, {0.25, 0.5}),
               obj(2, sim::ObjectKind::block, sim::TextureId::red, {0.5, 0.5}),
               obj(3, sim::ObjectKind::star, sim::TextureId::blue, {0.75, 0.5})};
  const Frame f = sim::render(s);
  percept::PerceptionAttackSpec a;
  a.kind = percept::PerceptKind::filtering;
  a.params.channel = 0;
  int wrong = 0;
  for (const auto& d : perceive(percept::apply_perception_attack(f, a))) wrong += d.texture != s.find(d.label)->texture;
  CHECK(wrong >= 1);
}

TEST_CASE("clean decisions pick the target centroid") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto t = vm_task();
    const auto sc = sim::generate_scenario(t, seed);
    const auto p = prompt::generate_prompt(t, sc.goal, sc.scene);
    ReferenceVictim v;
    v.reset(t, p.text());
    const auto a = v.act({sim::render(sc.scene), p.text(), {}, 0});
    REQUIRE(a.has_value());
    const auto* target = sc.scene.find(sc.goal.targets[0]);
    CHECK(norm(sim::to_px(a->pick - target->pos, kFrameWidth, kFrameHeight)) <= 2.0);
  }
}

TEST_CASE("rotation attack displaces the pick by the same rotation") {
  const auto t = vm_task();
  const auto sc = sim::generate_scenario(t, 4);
  const auto p = prompt::generate_prompt(t, sc.goal, sc.scene);
  const Frame f = sim::render(sc.scene);
  percept::PerceptionAttackSpec a;
  a.kind = percept::PerceptKind::rotation;
  a.params.angle_deg = 2.0;
  ReferenceVictim clean, hit;
  clean.reset(t, p.text());
  hit.reset(t, p.text());
  const auto ca = clean.act({f, p.text(), {}, 0});
  const auto ha = hit.act({percept::apply_perception_attack(f, a), p.text(), {}, 0});
  REQUIRE(ca);
  REQUIRE(ha);
  const Vec2 o{(kFrameWidth - 1) / 2.0 + 0.5, (kFrameHeight - 1) / 2.0 + 0.5};
  const Vec2 c = sim::to_px(ca->pick, kFrameWidth, kFrameHeight);
  const Vec2 expect = o + rotate(c - o, 2.0 * 3.14159265358979 / 180.0);
  CHECK(norm(sim::to_px(ha->pick, kFrameWidth, kFrameHeight) - expect) < 1.5);
}

TEST_CASE("clean competence and literal-victim attackability") {
  int clean = 0, literal_noun = 0, normal_noun = 0;
  const int n = 40;
  for (std::uint64_t seed = 0; seed < n; ++seed) {
    const auto t = vm_task();
    const auto sc = sim::generate_scenario(t, seed);
    const auto p = prompt::generate_prompt(t, sc.goal, sc.scene);
    const auto noun = prompt::rule_rephrase(p, {prompt::PromptAttackKind::noun, prompt::Engine::rule_based, seed},
                                            prompt::SynonymTable::standard());
    ReferenceVictim a, b({false}), c;
    clean += rollout(t, sc, p.text(), a).success;
    literal_noun += rollout(t, sc, noun.prompt.text(), b).success;
    normal_noun += rollout(t, sc, noun.prompt.text(), c).success;
    ReferenceVictim lit({false});
    lit.reset(t, noun.prompt.text());
    CHECK(!lit.act({sim::render(sc.scene), noun.prompt.text(), {}, 0}));
  }
  CHECK(clean >= 0.95 * n);
  CHECK(literal_noun <= 0.05 * n);
  CHECK(normal_noun == clean);
}

TEST_CASE("unparseable prompts and unmatched descriptors give no action") {
  const auto t = vm_task();
  const auto sc = sim::generate_scenario(t, 1);
  ReferenceVictim v;
  v.reset(t, "Flip the table.");
  CHECK(!v.act({sim::render(sc.scene), "Flip the table.", {}, 0}));
  CHECK(!v.act({sim::render(sc.scene), "Put the orange hexagon into the purple pallet.", {}, 0}));
  CHECK_THROWS_AS(ReferenceVictim(VictimConfig{true, 300.0, 0.6}), ConfigError);
}

TEST_CASE("all task kinds succeed on clean scenes") {
  for (int k = 0; k < 4; ++k)
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      sim::TaskSpec t{static_cast<sim::TaskKind>(k), sim::Level::placement, {}};
      const auto sc = sim::generate_scenario(t, seed);
      const auto p = prompt::generate_prompt(t, sc.goal, sc.scene);
      ReferenceVictim v;
      CAPTURE(p.text());
      CHECK(rollout(t, sc, p.text(), v).success);
    }
}

TEST_CASE("protocol messages") {
  const auto a = sim::StepAction::make({0.25, 0.5}, 0.5, {0.75, 0.125}, -1.0);
  const auto reply = encode_reply(a).dump();
  CHECK(reply == R"({"type":"action","pick":[0.25,0.5,0.5],"place":[0.75,0.125,-1.0]})");
  CHECK(decode_reply(reply) == a);
  CHECK(encode_reply(std::nullopt).dump() == R"({"type":"noop"})");
  CHECK(!decode_reply(R"({"type":"noop"})"));
  CHECK_THROWS_AS(decode_reply(R"({"type":"action","pick":[0.1,0.2,0]})"), ProtocolError);
  CHECK_THROWS_AS(decode_reply(R"({"type":"action","pick":[0.1,0.2],"place":[0,0,0]})"), ProtocolError);
  CHECK_THROWS_AS(decode_reply("not json"), ProtocolError);
  CHECK_THROWS_AS(decode_reply(R"({"type":"error","message":"x"})"), ProtocolError);

  const auto sc = sim::generate_scenario(vm_task(), 2);
  const Frame f = sim::render(sc.scene);
  const auto obs = encode_observe(f, 3);
  CHECK(obs["step"] == 3);
  CHECK(decode_observe(nlohmann::json::parse(obs.dump())) == f);
  CHECK(encode_reset(vm_task(), "Put it.")["type"] == "reset");
}

TEST_CASE("bridge_serve replies like the wrapped victim") {
  const auto t = vm_task();
  const auto sc = sim::generate_scenario(t, 6);
  const auto p = prompt::generate_prompt(t, sc.goal, sc.scene).text();
  const Frame f = sim::render(sc.scene);

  std::stringstream in, out;
  in << encode_reset(t, p).dump() << "\n";
  in << "garbage\n";
  in << R"({"type":"dance"})" << "\n";
  in << encode_observe(f, 0).dump() << "\n";
  ReferenceVictim served;
  bridge_serve(in, out, served);

  std::vector<std::string> lines;
  for (std::string l; std::getline(out, l);) lines.push_back(l);
  REQUIRE(lines.size() == 3);
  CHECK(nlohmann::json::parse(lines[0])["type"] == "error");
  CHECK(nlohmann::json::parse(lines[1])["type"] == "error");
  ReferenceVictim direct;
  direct.reset(t, p);
  CHECK(decode_reply(lines[2]) == direct.act({f, p, {}, 0}));
}

TEST_CASE("subprocess bridge with the echo policy") {
  BridgeVictim v("exec:" + std::string(ECHO_POLICY) + " 0.1 0.2 0.3 0.4 0.5 0.6");
  v.reset(vm_task(), "Put the red block into the blue bowl.");
  const auto a = v.act({Frame::blank(), "", {}, 0});
  REQUIRE(a);
  CHECK(*a == sim::StepAction::make({0.1, 0.2}, 0.3, {0.4, 0.5}, 0.6));
  CHECK(v.name().find("bridge") == 0);
}

TEST_CASE("bridge failures surface as victim errors") {
  {
    BridgeVictim v("exec:true");
    CHECK_THROWS_AS(v.act({Frame::blank(), "", {}, 0}), VictimError);
  }
  {
    BridgeVictim v("exec:sleep 5", std::chrono::milliseconds(200));
    CHECK_THROWS_AS(v.act({Frame::blank(), "", {}, 0}), VictimError);
  }
  {
    BridgeVictim v("exec:echo '{\"type\":\"action\",\"pick\":[0,0,0]}'");
    CHECK_THROWS_AS(v.act({Frame::blank(), "", {}, 0}), VictimError);
  }
  CHECK_THROWS_AS(BridgeVictim("tcp:127.0.0.1:1"), VictimError);
  CHECK_THROWS_AS(BridgeVictim("udp:x"), ConfigError);
}

TEST_CASE("tcp bridge round trip") {
  const auto t = vm_task();
  const auto sc = sim::generate_scenario(t, 8);
  const auto p = prompt::generate_prompt(t, sc.goal, sc.scene).text();
  ReferenceVictim served;
  std::promise<int> port;
  auto ready = port.get_future();
  std::thread server([&] { bridge_serve_tcp(0, served, [&](int pt) { port.set_value(pt); }); });
  const int pt = ready.get();
  ReferenceVictim direct;
  {
    BridgeVictim remote("tcp:127.0.0.1:" + std::to_string(pt));
    const auto out_remote = rollout(t, sc, p, remote);
    const auto out_direct = rollout(t, sc, p, direct);
    CHECK(out_remote == out_direct);
    CHECK(out_remote.success);
  }
  server.join();
}
