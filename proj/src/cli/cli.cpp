#include "ert/cli/cli.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <memory>

#include "ert/common/codec.hpp"
#include "ert/common/error.hpp"
#include "ert/defense/restore.hpp"
#include "ert/orchestrator/error_model.hpp"
#include "ert/orchestrator/select.hpp"
#include "ert/prompt/prompt.hpp"
#include "ert/report/report.hpp"
#include "ert/sim/render.hpp"
#include "ert/victim/bridge.hpp"

namespace ert::cli {

namespace {

struct TaskFlags {
  std::string task, level, quantifier;
  int sequence_length = 2, targets = 1;
  CLI::Option *task_opt = nullptr, *level_opt = nullptr, *quant_opt = nullptr, *seq_opt = nullptr,
              *targets_opt = nullptr;

  void add(CLI::App* app) {
    task_opt = app->add_option("--task", task, "visual_manipulation | scene_understanding | sweep_without_exceeding | pick_order_restore");
    level_opt = app->add_option("--level", level, "placement | combinatorial | novel_object");
    quant_opt = app->add_option("--quantifier", quantifier, "sweep quantifier: any | one | two | three | all");
    seq_opt = app->add_option("--sequence-length", sequence_length, "containers to visit in pick_order_restore (1 or 2)");
    targets_opt = app->add_option("--targets", targets, "objects to move in visual_manipulation (1 or 2)");
  }

  void apply(sim::TaskSpec& t) const {
    if (task_opt->count()) {
      const auto k = sim::task_kind_from_string(task);
      if (!k) throw ConfigError("unknown task: " + task);
      t.kind = *k;
    }
    if (level_opt->count()) {
      const auto l = sim::level_from_string(level);
      if (!l) throw ConfigError("unknown level: " + level);
      t.level = *l;
    }
    if (quant_opt->count()) {
      const auto q = sim::quantifier_from_string(quantifier);
      if (!q) throw ConfigError("unknown quantifier: " + quantifier);
      t.params.quantifier = *q;
    }
    if (seq_opt->count()) t.params.sequence_length = sequence_length;
    if (targets_opt->count()) t.params.n_targets = targets;
    t.validate();
  }
};

struct CampaignFlags {
  TaskFlags task;
  std::string attack, victim, judge, engine = "rule_based", config_path, out, llm_endpoint;
  int n = 0;
  std::uint64_t seed = 0;
  bool failure_frames = false;
  CLI::Option *attack_opt = nullptr, *victim_opt = nullptr, *judge_opt = nullptr, *engine_opt = nullptr,
              *n_opt = nullptr, *seed_opt = nullptr;

  void add(CLI::App* app, bool with_attack) {
    task.add(app);
    if (with_attack) attack_opt = app->add_option("--attack", attack, "attack name, or no_attack");
    victim_opt = app->add_option("--victim", victim, "reference_normalizing | reference_literal | bridge:<endpoint>");
    judge_opt = app->add_option("--judge", judge, "prompt similarity judge: deterministic | external");
    engine_opt = app->add_option("--engine", engine, "prompt attack engine: rule_based | external");
    n_opt = app->add_option("--n", n, "number of scenarios");
    seed_opt = app->add_option("--seed", seed, "first scenario seed");
    app->add_option("--config", config_path, "campaign config JSON; flags override it");
    app->add_option("--out", out, "output directory")->required();
    app->add_option("--llm-endpoint", llm_endpoint, "HTTP endpoint for external engines, judges and restorers");
    app->add_flag("--failure-frames", failure_frames, "write frame pairs of failed episodes");
  }

  orch::CampaignConfig build(int default_n) const {
    orch::CampaignConfig c;
    c.n_scenarios = default_n;
    if (!config_path.empty()) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(read_text(config_path));
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(config_path + ": " + e.what());
      }
      if (!j.contains("n_scenarios")) j["n_scenarios"] = default_n;
      c = orch::campaign_from_json(j);
    }
    task.apply(c.task);
    const prompt::Engine e = engine == "external" ? prompt::Engine::external
                             : engine == "rule_based"
                                 ? prompt::Engine::rule_based
                                 : throw ConfigError("unknown engine: " + engine);
    if (attack_opt && attack_opt->count()) c.attack = orch::attack_from_name(attack, e);
    if (engine_opt->count() && c.attack.family == orch::AttackFamily::prompt) c.attack.prompt.engine = e;
    if (victim_opt->count()) {
      const auto cfg = c.victim.config;
      c.victim = orch::victim_from_string(victim);
      c.victim.config = cfg;
    }
    if (judge_opt->count()) {
      if (judge == "deterministic")
        c.judge = orch::JudgeKind::deterministic;
      else if (judge == "external")
        c.judge = orch::JudgeKind::external;
      else
        throw ConfigError("unknown judge: " + judge);
    }
    if (n_opt->count()) c.n_scenarios = n;
    if (seed_opt->count()) c.base_seed = seed;
    c.validate();
    return c;
  }

  std::unique_ptr<prompt::LlmClient> client() const {
    if (llm_endpoint.empty()) return nullptr;
    return std::make_unique<prompt::HttpLlmClient>(llm_endpoint);
  }
};

std::string summary_line(const orch::CampaignSummary& s) {
  return s.task + " " + s.attack + ": input_sim " + metrics::format_similarity(s.input_sim) + ", action_cos " +
         metrics::format_similarity(s.action_cos) + ", success " + metrics::format_percent(s.success_rate) + "% (" +
         std::to_string(s.n_valid) + "/" + std::to_string(s.n_episodes) + " valid)";
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s + ",") {
    if (c == ',') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur.push_back(c);
    }
  }
  return out;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Adversarial robustness harness for instruction-following tabletop policies"};
  app.require_subcommand(1);

  // gen-scenarios
  auto* gen = app.add_subcommand("gen-scenarios", "generate scenarios with their instructions");
  TaskFlags gen_task;
  gen_task.add(gen);
  int gen_n = 10;
  std::uint64_t gen_seed = 0;
  std::string gen_out;
  bool gen_frames = false;
  gen->add_option("--n", gen_n, "number of scenarios");
  gen->add_option("--seed", gen_seed, "first scenario seed");
  gen->add_option("--out", gen_out, "output directory")->required();
  gen->add_flag("--frames", gen_frames, "also write rendered RGB frames");

  // run-campaign
  auto* camp = app.add_subcommand("run-campaign", "evaluate one attack over a set of scenarios");
  CampaignFlags camp_flags;
  camp_flags.add(camp, true);

  // select-heuristic
  auto* sel = app.add_subcommand("select-heuristic", "pick the strongest admissible attack from pilot runs");
  CampaignFlags sel_flags;
  sel_flags.add(sel, false);
  std::string candidates =
      "simple,extension,adjective,noun,blurring,noising,filtering,translation,rotation,cropping,distortion,add_rgb,add_seg";
  int pilot = 30;
  double prompt_min = 0.5, ssim_min = 0.75;
  sel->add_option("--candidates", candidates, "comma-separated attack names")->capture_default_str();
  sel->add_option("--pilot", pilot, "pilot scenarios per candidate")->capture_default_str();
  sel->add_option("--prompt-sim-min", prompt_min, "minimum prompt similarity")->capture_default_str();
  sel->add_option("--ssim-min", ssim_min, "minimum SSIM")->capture_default_str();

  // error-model
  auto* em = app.add_subcommand("error-model", "compounding error bound and Monte Carlo check");
  orch::ErrorModelParams em_params;
  std::uint64_t em_seed = 0;
  em->add_option("--delta", em_params.delta, "per-step error probability")->capture_default_str();
  em->add_option("--T", em_params.horizon, "horizon")->capture_default_str();
  em->add_option("--trials", em_params.trials, "Monte Carlo trials")->capture_default_str();
  em->add_option("--seed", em_seed, "Monte Carlo seed");

  // defense-eval
  auto* def = app.add_subcommand("defense-eval", "prompt attacks with restoration before the victim");
  CampaignFlags def_flags;
  def_flags.add(def, false);
  std::string restorer = "rule_based", context_path, def_format = "markdown";
  def->add_option("--restorer", restorer, "none | rule_based | external")->capture_default_str();
  def->add_option("--context", context_path, "restoration examples JSON for the external restorer");
  def->add_option("--format", def_format, "markdown | csv | json")->capture_default_str();

  // report
  auto* rep = app.add_subcommand("report", "tables from campaign output directories");
  std::vector<std::string> rep_paths;
  std::string rep_format = "markdown", rep_out;
  bool rep_failures = false;
  rep->add_option("paths", rep_paths, "run directories")->required();
  rep->add_option("--format", rep_format, "markdown | csv | json")->capture_default_str();
  rep->add_flag("--failures", rep_failures, "append failure exhibits");
  rep->add_option("--out", rep_out, "write to a file instead of stdout");

  // bridge-serve
  auto* serve = app.add_subcommand("bridge-serve", "serve a reference victim over the bridge protocol");
  std::string serve_victim = "reference_normalizing";
  int serve_port = 0;
  serve->add_option("--victim", serve_victim, "reference_normalizing | reference_literal")->capture_default_str();
  serve->add_option("--port", serve_port, "listen on TCP instead of stdio");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return 1;
  }

  try {
    if (*gen) {
      sim::TaskSpec t;
      gen_task.apply(t);
      if (gen_n < 1) throw ConfigError("--n must be at least 1");
      std::filesystem::create_directories(gen_out);
      std::string lines;
      for (int i = 0; i < gen_n; ++i) {
        const std::uint64_t s = gen_seed + static_cast<std::uint64_t>(i);
        const auto sc = sim::generate_scenario(t, s);
        nlohmann::ordered_json j;
        j["seed"] = s;
        j["task"] = sim::to_json(t);
        j["prompt"] = prompt::generate_prompt(t, sc.goal, sc.scene).text();
        j["scene"] = sim::to_json(sc.scene);
        j["goal"] = sim::to_json(sc.goal);
        lines += j.dump() + "\n";
        if (gen_frames)
          write_bytes(std::filesystem::path(gen_out) / (std::to_string(s) + ".png"), encode_frame_rgb(sim::render(sc.scene)));
      }
      write_text(std::filesystem::path(gen_out) / "scenarios.jsonl", lines);
      out << "wrote " << gen_n << " scenarios to " << gen_out << "\n";
      return 0;
    }

    if (*camp) {
      const auto c = camp_flags.build(150);
      const auto llm = camp_flags.client();
      orch::CampaignDeps deps;
      deps.llm = llm.get();
      const auto res = orch::run_campaign(c, deps);
      orch::write_campaign(camp_flags.out, res, camp_flags.failure_frames);
      out << summary_line(res.summary) << "\n";
      return 0;
    }

    if (*sel) {
      auto c = sel_flags.build(150);
      const auto llm = sel_flags.client();
      orch::CampaignDeps deps;
      deps.llm = llm.get();
      orch::AttackProblem problem;
      const prompt::Engine e = sel_flags.engine == "external" ? prompt::Engine::external : prompt::Engine::rule_based;
      for (const auto& name : split_list(candidates)) problem.candidates.push_back(orch::attack_from_name(name, e));
      problem.constraint = {prompt_min, ssim_min};
      problem.pilot_size = pilot;
      const auto selection = orch::heuristic_select(problem, c, deps);

      c.attack = selection.chosen;
      auto res = orch::run_campaign(c, deps);
      const std::string chosen = res.summary.attack;
      res.summary.attack = "heuristic";
      orch::write_campaign(sel_flags.out, res, sel_flags.failure_frames);

      nlohmann::ordered_json j;
      j["chosen"] = chosen;
      j["constraint"] = {{"prompt_similarity_min", prompt_min}, {"ssim_min", ssim_min}};
      j["pilot_size"] = pilot;
      auto arr = nlohmann::ordered_json::array();
      for (const auto& p : selection.pilots) {
        auto pj = orch::to_json(p);
        pj["admissible"] = orch::admissible(p, problem.constraint);
        arr.push_back(pj);
      }
      j["pilots"] = arr;
      write_text(std::filesystem::path(sel_flags.out) / "selection.json", j.dump(2) + "\n");
      out << "chosen " << chosen << "\n" << summary_line(res.summary) << "\n";
      return 0;
    }

    if (*em) {
      const double bound = orch::delta_bound(em_params);
      const auto mc = orch::delta_monte_carlo(em_params, em_seed);
      char buf[256];
      std::snprintf(buf, sizeof buf, "bound %.6f\nmonte_carlo %.6f\nstd_error %.6f\ndelta_T2 %.6f\n", bound, mc.mean,
                    mc.std_error, em_params.delta * em_params.horizon * em_params.horizon);
      out << buf;
      return 0;
    }

    if (*def) {
      defense::DefenseConfig d;
      d.campaign = def_flags.build(defense::kDefendedScenarios);
      d.restorer = defense::restorer_from_string(restorer);
      if (!context_path.empty()) {
        try {
          d.context = defense::context_from_json(nlohmann::json::parse(read_text(context_path)));
        } catch (const nlohmann::json::exception& e) {
          throw ConfigError(context_path + ": " + e.what());
        }
      }
      const auto fmt = report::format_from_string(def_format);
      const auto llm = def_flags.client();
      orch::CampaignDeps deps;
      deps.llm = llm.get();
      const auto table = defense::run_defended_campaign(d, deps);
      for (const auto& r : table.runs)
        orch::write_campaign(std::filesystem::path(def_flags.out) / r.summary.attack, r, def_flags.failure_frames);
      const std::string text = report::emit_defense_table(table.rows, fmt);
      const char* ext = fmt == report::Format::markdown ? "md" : fmt == report::Format::csv ? "csv" : "json";
      write_text(std::filesystem::path(def_flags.out) / (std::string("defense_table.") + ext), text);
      out << text;
      return 0;
    }

    if (*rep) {
      report::ReportSpec spec{report::format_from_string(rep_format), rep_failures};
      std::vector<std::filesystem::path> paths(rep_paths.begin(), rep_paths.end());
      const auto sums = report::load_summaries(paths);
      const auto ex = rep_failures ? report::load_exhibits(paths) : std::vector<report::Exhibit>{};
      const std::string text = report::emit_report(sums, spec, ex);
      if (rep_out.empty())
        out << text;
      else
        write_text(rep_out, text);
      return 0;
    }

    if (*serve) {
      const auto v = orch::victim_from_string(serve_victim);
      if (v.kind == orch::VictimKind::bridge) throw ConfigError("bridge-serve needs a reference victim");
      auto victim = orch::make_victim(v);
      if (serve_port > 0)
        victim::bridge_serve_tcp(serve_port, *victim, [&](int port) { err << "listening on " << port << "\n"; });
      else
        victim::bridge_serve(std::cin, std::cout, *victim);
      return 0;
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace ert::cli
