// Acceptance run: one PASS/FAIL line per criterion, then a tally.
//
// Exit status is 0 when every failing criterion was named with --known-red,
// so a criterion that is red for documented reasons stays visible in the
// output without hiding regressions in the others.

#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <tuple>
#include <random>
#include <set>

#include "ert/common/codec.hpp"
#include "ert/common/error.hpp"
#include "ert/defense/restore.hpp"
#include "ert/metrics/metrics.hpp"
#include "ert/orchestrator/campaign.hpp"
#include "ert/orchestrator/error_model.hpp"
#include "ert/orchestrator/select.hpp"
#include "ert/percept/attacks.hpp"
#include "ert/prompt/rephrase.hpp"
#include "ert/report/report.hpp"
#include "ert/sim/render.hpp"

using namespace ert;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

sim::TaskSpec vm() { return {sim::TaskKind::visual_manipulation, sim::Level::placement, {}}; }

orch::CampaignConfig campaign(const std::string& attack, orch::VictimKind victim, int n = 150) {
  orch::CampaignConfig c;
  c.task = vm();
  c.n_scenarios = n;
  c.attack = orch::attack_from_name(attack);
  c.victim.kind = victim;
  return c;
}

std::vector<Frame> scene_frames(int n, std::uint64_t base) {
  std::vector<Frame> out;
  const sim::TaskKind kinds[] = {sim::TaskKind::visual_manipulation, sim::TaskKind::scene_understanding,
                                 sim::TaskKind::sweep_without_exceeding, sim::TaskKind::pick_order_restore};
  for (int i = 0; i < n; ++i) {
    sim::TaskSpec t;
    t.kind = kinds[i % 4];
    out.push_back(sim::render(sim::generate_scenario(t, base + static_cast<std::uint64_t>(i)).scene));
  }
  return out;
}

// --- 1 ------------------------------------------------------------------

Verdict determinism() {
  const auto root = std::filesystem::temp_directory_path() / "ert_acceptance_det";
  std::filesystem::remove_all(root);
  bool same = true;
  double worst = 0;
  for (const std::string attack : {"noun", "distortion"}) {
    const auto c = campaign(attack, orch::VictimKind::reference_normalizing);
    for (const char* run : {"a", "b"}) {
      const auto t0 = std::chrono::steady_clock::now();
      orch::write_campaign(root / attack / run, orch::run_campaign(c));
      worst = std::max(worst, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
    }
    same = same && read_text(root / attack / "a" / "records.jsonl") == read_text(root / attack / "b" / "records.jsonl");
  }
  return {same && worst < 120.0,
          std::string(same ? "records.jsonl byte-identical" : "records differ") + " for noun and distortion; slowest 150-episode run " +
              fmt("%.1f s", worst)};
}

// --- 2 ------------------------------------------------------------------

// Scalar SSIM written straight from the windowed definition: weighted
// moments at every valid window position, one channel at a time.
double scalar_ssim(const Frame& a, const Frame& b) {
  const int win = 11;
  const double sigma = 1.5, c1 = (0.01 * 255) * (0.01 * 255), c2 = (0.03 * 255) * (0.03 * 255);
  double w[11][11], total = 0;
  for (int j = 0; j < win; ++j)
    for (int i = 0; i < win; ++i) {
      const double dx = i - 5, dy = j - 5;
      w[j][i] = std::exp(-(dx * dx + dy * dy) / (2 * sigma * sigma));
      total += w[j][i];
    }
  for (auto& row : w)
    for (double& v : row) v /= total;
  double sum = 0;
  long count = 0;
  for (int ch = 0; ch < 3; ++ch)
    for (int y = 0; y + win <= a.height; ++y)
      for (int x = 0; x + win <= a.width; ++x) {
        double mx = 0, my = 0, xx = 0, yy = 0, xy = 0;
        for (int j = 0; j < win; ++j)
          for (int i = 0; i < win; ++i) {
            const double p = a.pixel(x + i, y + j)[ch], q = b.pixel(x + i, y + j)[ch];
            mx += w[j][i] * p;
            my += w[j][i] * q;
            xx += w[j][i] * p * p;
            yy += w[j][i] * q * q;
            xy += w[j][i] * p * q;
          }
        const double vx = xx - mx * mx, vy = yy - my * my, cxy = xy - mx * my;
        sum += ((2 * mx * my + c1) * (2 * cxy + c2)) / ((mx * mx + my * my + c1) * (vx + vy + c2));
        ++count;
      }
  return sum / static_cast<double>(count);
}

Verdict ssim_oracle() {
  const auto frames = scene_frames(50, 500);
  const auto kinds = percept::all_percept_kinds();
  double worst = 0, self = 0;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    percept::PerceptionAttackSpec s;
    s.kind = kinds[i % kinds.size()];
    s.seed = i;
    const Frame attacked = percept::apply_perception_attack(frames[i], s);
    worst = std::max(worst, std::abs(metrics::ssim(frames[i], attacked) - scalar_ssim(frames[i], attacked)));
    self = std::max(self, std::abs(metrics::ssim(frames[i], frames[i]) - 1.0));
  }
  return {worst < 1e-6 && self < 1e-9, fmt("max |harness - scalar| %.2e over 50 pairs, max |ssim(x,x) - 1| %.2e", worst, self)};
}

// --- 3 ------------------------------------------------------------------

Verdict identities() {
  const auto frames = scene_frames(8, 900);
  int max_lsb = 0;
  bool seg_ok = true, shift_exact = true;
  for (const auto& f : frames) {
    std::vector<percept::PerceptionAttackSpec> specs(4);
    specs[0].kind = percept::PerceptKind::translation;
    specs[0].params.shift_px = Vec2{0, 0};
    specs[1].kind = percept::PerceptKind::rotation;
    specs[1].params.angle_deg = 0.0;
    specs[2].kind = percept::PerceptKind::cropping;
    specs[2].params.crop = std::array<double, 4>{0, 0, 0, 0};
    specs[3].kind = percept::PerceptKind::distortion;
    const double r = f.width - 0.5, b = f.height - 0.5;
    specs[3].params.corners = std::array<Vec2, 4>{Vec2{-0.5, -0.5}, Vec2{r, -0.5}, Vec2{r, b}, Vec2{-0.5, b}};
    for (std::size_t k = 0; k < specs.size(); ++k) {
      const Frame out = percept::apply_perception_attack(f, specs[k]);
      seg_ok = seg_ok && out.seg == f.seg;
      int lsb = 0;
      for (std::size_t i = 0; i < f.rgb.size(); ++i) lsb = std::max(lsb, std::abs(int(out.rgb[i]) - int(f.rgb[i])));
      if (k == 0 && lsb != 0) shift_exact = false;
      max_lsb = std::max(max_lsb, lsb);
    }
  }
  return {seg_ok && shift_exact && max_lsb <= 1,
          std::string("seg ") + (seg_ok ? "bit-identical" : "changed") + ", zero shift " + (shift_exact ? "exact" : "inexact") +
              fmt(", max rgb deviation %.0f LSB on 8 frames x 4 operators", max_lsb)};
}

// --- 4 ------------------------------------------------------------------

Verdict label_soundness() {
  const auto frames = scene_frames(20, 1300);
  const auto kinds = percept::all_percept_kinds();
  std::mt19937_64 gen(4);
  int bad = 0, skipped = 0;
  for (int i = 0; i < 1000; ++i) {
    const Frame& f = frames[static_cast<std::size_t>(i) % frames.size()];
    percept::PerceptionAttackSpec s;
    s.kind = kinds[gen() % kinds.size()];
    s.seed = gen();
    std::set<int> allowed{0};
    for (auto l : f.seg) allowed.insert(l);
    try {
      const Frame out = percept::apply_perception_attack(f, s);
      for (auto l : out.seg)
        if (!allowed.count(l)) {
          ++bad;
          break;
        }
    } catch (const AttackNotApplicable&) {
      ++skipped;
    }
  }
  return {bad == 0 && skipped == 0, fmt("%.0f of 1000 attacks introduced a foreign label (%.0f not applicable)", bad, skipped)};
}

// --- 5, 6 ---------------------------------------------------------------

struct Rates {
  double norm_clean = -1, norm_noun = -1, lit_clean = -1, lit_noun = -1;
};

Rates& rates() {
  static Rates r;
  if (r.norm_clean < 0) {
    using orch::VictimKind;
    r.norm_clean = orch::run_campaign(campaign("no_attack", VictimKind::reference_normalizing)).summary.success_rate;
    r.norm_noun = orch::run_campaign(campaign("noun", VictimKind::reference_normalizing)).summary.success_rate;
    r.lit_clean = orch::run_campaign(campaign("no_attack", VictimKind::reference_literal)).summary.success_rate;
    r.lit_noun = orch::run_campaign(campaign("noun", VictimKind::reference_literal)).summary.success_rate;
  }
  return r;
}

Verdict clean_baseline() {
  const double s = rates().norm_clean;
  return {s >= 95.0, fmt("normalizing victim %.1f%% on 150 placement-level visual manipulation scenarios", s)};
}

Verdict prompt_phenomenon() {
  const auto& r = rates();
  const double lit_drop = r.lit_clean - r.lit_noun, norm_drop = r.norm_clean - r.norm_noun;
  return {lit_drop >= 20.0 && norm_drop < 5.0,
          fmt("literal %.1f -> %.1f under noun, normalizing %.1f -> %.1f", r.lit_clean, r.lit_noun, r.norm_clean, r.norm_noun)};
}

// --- 7 ------------------------------------------------------------------

Verdict perception_ordering() {
  std::map<std::string, orch::CampaignSummary> s;
  for (const std::string a : {"rotation", "cropping", "distortion", "blurring", "noising"})
    s[a] = orch::run_campaign(campaign(a, orch::VictimKind::reference_normalizing)).summary;
  const double transform = (s["rotation"].success_rate + s["cropping"].success_rate + s["distortion"].success_rate) / 3;
  const double quality = (s["blurring"].success_rate + s["noising"].success_rate) / 2;
  const bool order = quality - transform >= 15.0;
  const bool ssim_order = s["blurring"].input_sim > s["noising"].input_sim;
  std::string detail = fmt("success: transforms %.1f vs image quality %.1f (need a gap of 15); ", transform, quality);
  detail += fmt("rot %.1f crop %.1f dist %.1f", s["rotation"].success_rate, s["cropping"].success_rate,
                s["distortion"].success_rate);
  detail += fmt(" blur %.1f noise %.1f; ", s["blurring"].success_rate, s["noising"].success_rate);
  detail += fmt("SSIM blur %.3f > noise %.3f", s["blurring"].input_sim, s["noising"].input_sim);
  detail += ssim_order ? " holds" : " fails";
  return {order && ssim_order, detail};
}

// --- 8 ------------------------------------------------------------------

Verdict selector() {
  std::mt19937_64 gen(8);
  const orch::SimilarityConstraint c{0.5, 0.75};
  int agree = 0, menus = 0;
  bool raised = false;
  for (int m = 0; m < 20; ++m) {
    std::vector<orch::CampaignSummary> pilots;
    for (int i = 0; i < 3 + static_cast<int>(gen() % 10); ++i) {
      orch::CampaignSummary s;
      s.attack = "attack_" + std::to_string(gen() % 100);
      s.family = gen() % 2 ? "prompt" : "perception";
      s.input_sim = (gen() % 11) / 10.0;
      s.success_rate = (gen() % 5) * 10.0;
      s.n_episodes = s.n_valid = 30;
      pilots.push_back(s);
    }
    // Brute force: smallest (success, -similarity, name) among feasible pilots.
    std::optional<std::tuple<double, double, std::string>> best;
    for (const auto& p : pilots) {
      const double need = p.family == "prompt" ? c.prompt_similarity_min : c.ssim_min;
      if (p.input_sim < need) continue;
      const auto key = std::make_tuple(p.success_rate, -p.input_sim, p.attack);
      if (!best || key < *best) best = key;
    }
    ++menus;
    try {
      const auto& chosen = pilots[orch::select_attack(pilots, c)];
      if (best && std::make_tuple(chosen.success_rate, -chosen.input_sim, chosen.attack) == *best) ++agree;
    } catch (const SelectionError&) {
      if (!best) ++agree;
    }
  }
  std::vector<orch::CampaignSummary> infeasible(3);
  for (auto& p : infeasible) {
    p.family = "perception";
    p.input_sim = 0.5;
    p.n_valid = 30;
  }
  try {
    orch::select_attack(infeasible, c);
  } catch (const SelectionError&) {
    raised = true;
  }
  return {agree == menus && raised, fmt("%.0f of %.0f menus match brute force; infeasible menu ", agree, menus) +
                                        (raised ? "raises SelectionError" : "does not raise")};
}

// --- 9 ------------------------------------------------------------------

double nested(double delta, int t) { return t == 0 ? 0.0 : delta * t + (1 - delta) * nested(delta, t - 1); }

Verdict error_model() {
  double worst_rec = 0;
  bool dominated = true;
  for (int i = 0; i <= 100; ++i)
    for (int t = 1; t <= 100; ++t) {
      const double d = i / 100.0;
      const double b = orch::delta_bound({d, t, 1000});
      worst_rec = std::max(worst_rec, std::abs(b - nested(d, t)) / std::max(1.0, b));
      dominated = dominated && b <= d * t * t + 1e-12;
    }
  const orch::ErrorModelParams p{0.1, 10, 100000};
  const auto mc = orch::delta_monte_carlo(p, 1);
  const double z = std::abs(mc.mean - orch::delta_bound(p)) / mc.std_error;
  return {worst_rec <= 1e-12 && z <= 3 && dominated,
          fmt("recursion error %.1e, Monte Carlo %.2f sigma off, delta T^2 dominance ", worst_rec, z) +
              (dominated ? "holds on 101 x 100 grid" : "violated")};
}

// --- 10 -----------------------------------------------------------------

Verdict defense_round_trip() {
  const auto& table = prompt::SynonymTable::standard();
  int exact = 0, total = 0;
  const sim::TaskKind kinds[] = {sim::TaskKind::visual_manipulation, sim::TaskKind::scene_understanding,
                                 sim::TaskKind::sweep_without_exceeding, sim::TaskKind::pick_order_restore};
  for (int i = 0; i < 500; ++i) {
    sim::TaskSpec t;
    t.kind = kinds[i % 4];
    t.level = static_cast<sim::Level>((i / 4) % 3);
    const auto sc = sim::generate_scenario(t, 2000 + static_cast<std::uint64_t>(i));
    const auto p = prompt::generate_prompt(t, sc.goal, sc.scene);
    for (auto k : {prompt::PromptAttackKind::adjective, prompt::PromptAttackKind::noun}) {
      prompt::PromptAttackSpec spec;
      spec.kind = k;
      spec.seed = static_cast<std::uint64_t>(i);
      ++total;
      if (defense::restore_rule_based(prompt::rule_rephrase(p, spec, table).prompt).prompt.text() == p.text()) ++exact;
    }
  }
  defense::DefenseConfig d;
  d.campaign.victim.kind = orch::VictimKind::reference_literal;
  const auto rows = defense::run_defended_campaign(d).rows;
  const double clean = rows[0].success_rate, noun = rows[4].success_rate;
  return {exact == total && std::abs(clean - noun) <= 2.0,
          fmt("%.0f/%.0f exact restorations; defended literal victim %.1f clean vs %.1f noun", exact, total, clean, noun) +
              fmt(" over %.0f scenarios", d.campaign.n_scenarios)};
}

// --- 11 -----------------------------------------------------------------

Verdict report_fidelity(const std::filesystem::path& golden) {
  auto mk = [](const std::string& task, const std::string& attack, const std::string& fam, double s, double c, double r) {
    orch::CampaignSummary x;
    x.task = task;
    x.attack = attack;
    x.family = fam;
    x.input_sim = s;
    x.action_cos = c;
    x.success_rate = r;
    x.n_episodes = x.n_valid = 150;
    return x;
  };
  const std::vector<orch::CampaignSummary> prompt_set{
      mk("visual_manipulation", "noun", "prompt", 0.0933333, 0.76049, 66.6667),
      mk("sweep_without_exceeding", "no_attack", "none", 1, 1, 94.6667),
      mk("visual_manipulation", "no_attack", "none", 1, 1, 98.6667),
      mk("visual_manipulation", "simple", "prompt", 0.79349, 0.8316, 76.6667),
      mk("sweep_without_exceeding", "simple", "prompt", 0.713, 0.945, 88.6667)};
  const std::vector<orch::CampaignSummary> perception_set{
      mk("visual_manipulation", "no_attack", "none", 1, 1, 98.6667),
      mk("visual_manipulation", "add_seg", "perception", 0.999, 0.789, 68.0),
      mk("visual_manipulation", "rotation", "perception", 0.882, 0.292, 13.3333),
      mk("visual_manipulation", "blurring", "perception", 0.926, 0.989, 98.6667)};
  int matched = 0;
  try {
    matched += report::emit_report(prompt_set, {report::Format::markdown, false}) == read_text(golden / "prompt_table.md");
    matched += report::emit_report(perception_set, {report::Format::csv, false}) == read_text(golden / "perception_table.csv");
  } catch (const Error& e) {
    return {false, e.what()};
  }

  // Column structure on a live four-task table.
  std::vector<orch::CampaignSummary> live;
  for (const std::string task : {"pick_order_restore", "visual_manipulation", "sweep_without_exceeding", "scene_understanding"})
    for (const std::string a : {"noun", "simple", "adjective", "extension", "no_attack"})
      live.push_back(mk(task, a, a == "no_attack" ? "none" : "prompt", 0.5, 0.25, 50.0));
  const auto csv = report::emit_report(live, {report::Format::csv, false});
  const std::string expected_header =
      "Attack,Visual Manipulation Prompt Sim.,Visual Manipulation Action CosSim.,Visual Manipulation Success Rate,"
      "Scene Understanding Prompt Sim.,Scene Understanding Action CosSim.,Scene Understanding Success Rate,"
      "Sweep w/o. Exceeding Prompt Sim.,Sweep w/o. Exceeding Action CosSim.,Sweep w/o. Exceeding Success Rate,"
      "Pick in order then Restore Prompt Sim.,Pick in order then Restore Action CosSim.,Pick in order then Restore Success Rate\n"
      "Simple,0.500,0.250,50.0,0.500,0.250,50.0,0.500,0.250,50.0,0.500,0.250,50.0\n"
      "Extension,0.500,0.250,50.0,0.500,0.250,50.0,0.500,0.250,50.0,0.500,0.250,50.0\n"
      "Adjective,0.500,0.250,50.0,0.500,0.250,50.0,0.500,0.250,50.0,0.500,0.250,50.0\n"
      "Noun,0.500,0.250,50.0,0.500,0.250,50.0,0.500,0.250,50.0,0.500,0.250,50.0\n"
      "No Attack,-,-,50.0,-,-,50.0,-,-,50.0,-,-,50.0\n";
  const bool structure = csv == expected_header;
  return {matched == 2 && structure,
          fmt("%.0f/2 golden files match; four-task column layout ", matched) + (structure ? "exact" : "differs")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> known_red;
  std::string golden = GOLDEN_DIR;
  app.add_option("--known-red", known_red, "criteria whose failure is documented and tolerated in the exit status");
  app.add_option("--golden", golden, "golden file directory");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
      {"determinism", determinism},
      {"ssim oracle", ssim_oracle},
      {"operator identities", identities},
      {"label soundness", label_soundness},
      {"clean baseline", clean_baseline},
      {"prompt-attack phenomenon", prompt_phenomenon},
      {"perception-attack ordering", perception_ordering},
      {"heuristic selector", selector},
      {"error model", error_model},
      {"defense round trip", defense_round_trip},
      {"report fidelity", [&] { return report_fidelity(golden); }},
  };

  int passed = 0, unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    const bool tolerated = std::find(known_red.begin(), known_red.end(), id) != known_red.end();
    std::cout << "criterion " << id << " " << (v.pass ? "PASS" : "FAIL") << " " << criteria[i].first << ": " << v.detail
              << (!v.pass && tolerated ? " [known red]" : "") << std::endl;
    if (v.pass)
      ++passed;
    else if (!tolerated)
      ++unexpected;
  }
  std::cout << passed << "/" << criteria.size() << " criteria pass";
  if (passed < static_cast<int>(criteria.size()))
    std::cout << ", " << (static_cast<int>(criteria.size()) - passed - unexpected) << " known red, " << unexpected
              << " unexpected";
  std::cout << std::endl;
  return unexpected == 0 ? 0 : 1;
}
