#include <doctest.h>

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

#include "ert/cli/cli.hpp"
#include "ert/common/codec.hpp"


namespace {

struct Result {
  int code;
  std::string out, err;
};

Result ert_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ert");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = ert::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
  auto p = std::filesystem::temp_directory_path() / ("ert_cli_" + name);
  std::filesystem::remove_all(p);
  return p;
}

nlohmann::json summary_at(const std::filesystem::path& dir) {
  return nlohmann::json::parse(ert::read_text(dir / "summary.json"));
}

}  // namespace

TEST_CASE("run-campaign writes records and summary") {
  const auto dir = scratch("run");
  const auto r = ert_cli({"run-campaign", "--task", "visual_manipulation", "--attack", "noun", "--n", "5", "--seed", "1",
                      "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.find("visual_manipulation noun") != std::string::npos);
  const auto text = ert::read_text(dir / "records.jsonl");
  CHECK(std::count(text.begin(), text.end(), '\n') == 5);
  CHECK(nlohmann::json::parse(text.substr(0, text.find('\n')))["scenario_seed"] == 1);
  CHECK(summary_at(dir)["n_episodes"] == 5);
}

TEST_CASE("usage errors exit with 1 and show help") {
  auto r = ert_cli({"run-campaign", "--bogus", "--out", "x"});
  CHECK(r.code == 1);
  CHECK(r.err.find("Usage") != std::string::npos);
  CHECK(ert_cli({}).code == 1);
  CHECK(ert_cli({"frobnicate"}).code == 1);
  CHECK(ert_cli({"run-campaign", "--attack", "melt", "--out", "x"}).code == 1);
  CHECK(ert_cli({"run-campaign", "--task", "juggling", "--out", "x"}).code == 1);
  CHECK(ert_cli({"run-campaign", "--n", "many", "--out", "x"}).code == 1);
  CHECK(ert_cli({"--help"}).code == 0);
}

TEST_CASE("runtime errors exit with 2") {
  CHECK(ert_cli({"report", "/nonexistent/run"}).code == 2);
  const auto dir = scratch("bad_victim");
  CHECK(ert_cli({"run-campaign", "--n", "1", "--victim", "bridge:exec:true", "--out", dir.string()}).code == 2);
}

TEST_CASE("flags override the config file, which overrides defaults") {
  const auto dir = scratch("precedence");
  std::filesystem::create_directories(dir);
  const auto cfg = dir / "config.json";
  ert::write_text(cfg, R"({"task": {"kind": "scene_understanding", "level": "placement"}, "n_scenarios": 3,
                      "seed": 40, "attack": "adjective"})");

  REQUIRE(ert_cli({"run-campaign", "--config", cfg.string(), "--out", (dir / "a").string()}).code == 0);
  auto s = summary_at(dir / "a");
  CHECK(s["task"] == "scene_understanding");
  CHECK(s["attack"] == "adjective");
  CHECK(s["n_episodes"] == 3);
  const auto first = ert::read_text(dir / "a" / "records.jsonl");
  CHECK(nlohmann::json::parse(first.substr(0, first.find('\n')))["scenario_seed"] == 40);

  REQUIRE(ert_cli({"run-campaign", "--config", cfg.string(), "--attack", "noun", "--n", "2", "--out", (dir / "b").string()}).code == 0);
  s = summary_at(dir / "b");
  CHECK(s["task"] == "scene_understanding");
  CHECK(s["attack"] == "noun");
  CHECK(s["n_episodes"] == 2);

  REQUIRE(ert_cli({"run-campaign", "--n", "2", "--out", (dir / "c").string()}).code == 0);
  s = summary_at(dir / "c");
  CHECK(s["task"] == "visual_manipulation");
  CHECK(s["attack"] == "no_attack");
}

TEST_CASE("error-model prints the bound and the estimate") {
  const auto r = ert_cli({"error-model", "--delta", "0.1", "--T", "10", "--trials", "100000"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  std::map<std::string, double> v;
  std::string k;
  double x;
  while (in >> k >> x) v[k] = x;
  CHECK(v.at("bound") == doctest::Approx(4.138106).epsilon(1e-6));
  CHECK(std::abs(v.at("monte_carlo") - v.at("bound")) <= 3 * v.at("std_error"));
  CHECK(ert_cli({"error-model", "--trials", "10"}).code == 1);
}

TEST_CASE("gen-scenarios, report and defense-eval") {
  const auto dir = scratch("pipeline");
  REQUIRE(ert_cli({"gen-scenarios", "--task", "sweep_without_exceeding", "--quantifier", "two", "--n", "3", "--frames",
               "--out", (dir / "scen").string()})
              .code == 0);
  const auto lines = ert::read_text(dir / "scen" / "scenarios.jsonl");
  CHECK(lines.find("Sweep two") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "scen" / "2.png"));

  REQUIRE(ert_cli({"defense-eval", "--victim", "reference_literal", "--n", "3", "--out", (dir / "def").string()}).code == 0);
  const auto table = ert::read_text(dir / "def" / "defense_table.md");
  CHECK(table.rfind("| No Attack | Simple | Extension | Adjective | Noun |", 0) == 0);
  CHECK(std::filesystem::exists(dir / "def" / "noun" / "summary.json"));

  const auto rep = ert_cli({"report", "--format", "csv", (dir / "def").string()});
  REQUIRE(rep.code == 0);
  CHECK(rep.out.rfind("Attack,Visual Manipulation Prompt Sim.", 0) == 0);
  CHECK(rep.out.find("No Attack,-,-,") != std::string::npos);
}

TEST_CASE("select-heuristic records pilots and a heuristic run") {
  const auto dir = scratch("select");
  const auto r = ert_cli({"select-heuristic", "--victim", "reference_literal", "--candidates", "simple,noun", "--pilot", "3",
                      "--n", "3", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("chosen noun", 0) == 0);
  const auto sel = nlohmann::json::parse(ert::read_text(dir / "selection.json"));
  CHECK(sel["pilots"].size() == 2);
  CHECK(summary_at(dir)["attack"] == "heuristic");
}
