#include "ert/report/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>

#include "ert/common/codec.hpp"
#include "ert/common/error.hpp"
#include "ert/metrics/metrics.hpp"

namespace ert::report {

namespace {

struct Label {
  std::string key;
  std::string display;
  std::string category;  // perception rows only
};

const std::vector<Label>& prompt_rows() {
  static const std::vector<Label> rows{
      {"simple", "Simple", ""}, {"extension", "Extension", ""}, {"adjective", "Adjective", ""}, {"noun", "Noun", ""}};
  return rows;
}

const std::vector<Label>& perception_rows() {
  static const std::vector<Label> rows{
      {"blurring", "Blurring", "Image Quality"}, {"noising", "Noising", "Image Quality"},
      {"filtering", "Filtering", "Image Quality"}, {"translation", "Translation", "Transform"},
      {"rotation", "Rotation", "Transform"},     {"cropping", "Cropping", "Transform"},
      {"distortion", "Distortion", "Transform"}, {"add_seg", "in Seg", "Object Addition"},
      {"add_rgb", "in RGB", "Object Addition"}};
  return rows;
}

const std::vector<std::pair<std::string, std::string>>& task_columns() {
  static const std::vector<std::pair<std::string, std::string>> t{
      {"visual_manipulation", "Visual Manipulation"},
      {"scene_understanding", "Scene Understanding"},
      {"sweep_without_exceeding", "Sweep w/o. Exceeding"},
      {"pick_order_restore", "Pick in order then Restore"}};
  return t;
}

struct Cell {
  std::string sim, cos, success;
  double sim_v = 0, cos_v = 0, success_v = 0;
  bool baseline = false;
};

struct Row {
  Label label;
  std::vector<std::optional<Cell>> cells;  // per task column
};

struct Table {
  bool perception = false;
  std::vector<std::string> tasks;  // keys, in column order
  std::vector<Row> rows;
};

double round_to(double v, double scale) { return std::round(v * scale) / scale; }

Table build(const std::vector<orch::CampaignSummary>& summaries) {
  if (summaries.empty()) throw ReportError("no summaries to report");
  std::set<std::string> families;
  std::set<std::string> task_keys;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& s : summaries) {
    if (s.family != "none") families.insert(s.family);
    task_keys.insert(s.task);
    if (!seen.insert({s.task, s.attack}).second)
      throw ReportError("duplicate summary for " + s.task + " / " + s.attack);
  }
  if (families.size() > 1) throw ReportError("prompt and perception summaries cannot share one table");
  for (const auto& f : families)
    if (f != "prompt" && f != "perception") throw ReportError("unknown attack family: " + f);

  Table t;
  t.perception = families.count("perception") > 0;
  for (const auto& [key, name] : task_columns())
    if (task_keys.count(key)) t.tasks.push_back(key);
  if (t.tasks.size() != task_keys.size()) throw ReportError("summary names an unknown task");

  std::vector<Label> labels = t.perception ? perception_rows() : prompt_rows();
  std::set<std::string> known;
  for (const auto& l : labels) known.insert(l.key);
  std::set<std::string> extra;
  for (const auto& s : summaries)
    if (!known.count(s.attack) && s.attack != "heuristic" && s.attack != "no_attack") extra.insert(s.attack);
  for (const auto& e : extra) labels.push_back({e, e, ""});
  labels.push_back({"heuristic", "Heuristic", ""});
  labels.push_back({"no_attack", "No Attack", ""});

  for (const auto& l : labels) {
    Row row{l, std::vector<std::optional<Cell>>(t.tasks.size())};
    bool any = false;
    for (const auto& s : summaries) {
      if (s.attack != l.key) continue;
      const auto col = static_cast<std::size_t>(std::find(t.tasks.begin(), t.tasks.end(), s.task) - t.tasks.begin());
      Cell c;
      c.baseline = s.attack == "no_attack";
      c.sim = c.baseline ? "-" : metrics::format_similarity(s.input_sim);
      c.cos = c.baseline ? "-" : metrics::format_similarity(s.action_cos);
      c.success = metrics::format_percent(s.success_rate);
      c.sim_v = round_to(s.input_sim, 1000);
      c.cos_v = round_to(s.action_cos, 1000);
      c.success_v = round_to(s.success_rate, 10);
      row.cells[col] = c;
      any = true;
    }
    if (any) t.rows.push_back(std::move(row));
  }
  return t;
}

std::string task_display(const std::string& key) {
  for (const auto& [k, name] : task_columns())
    if (k == key) return name;
  return key;
}

std::vector<std::string> header(const Table& t) {
  std::vector<std::string> h;
  if (t.perception) h.push_back("Category");
  h.push_back("Attack");
  for (const auto& task : t.tasks) {
    const std::string name = task_display(task);
    h.push_back(name + " " + (t.perception ? "SSIM" : "Prompt Sim."));
    h.push_back(name + " Action CosSim.");
    h.push_back(name + " Success Rate");
  }
  return h;
}

std::vector<std::vector<std::string>> body(const Table& t) {
  std::vector<std::vector<std::string>> out;
  for (const auto& r : t.rows) {
    std::vector<std::string> line;
    if (t.perception) line.push_back(r.label.category);
    line.push_back(r.label.display);
    for (const auto& c : r.cells) {
      if (c) {
        line.insert(line.end(), {c->sim, c->cos, c->success});
      } else {
        line.insert(line.end(), {"", "", ""});
      }
    }
    out.push_back(std::move(line));
  }
  return out;
}

std::string md_line(const std::vector<std::string>& cells) {
  std::string s = "|";
  for (const auto& c : cells) s += " " + c + " |";
  return s + "\n";
}

std::string csv_cell(const std::string& c) {
  if (c.find_first_of(",\"\n") == std::string::npos) return c;
  std::string q = "\"";
  for (char ch : c) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

std::string csv_line(const std::vector<std::string>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) s += (i ? "," : "") + csv_cell(cells[i]);
  return s + "\n";
}

std::vector<std::string> exhibit_fields(const Exhibit& e) {
  return {e.task,
          e.attack,
          std::to_string(e.scenario_seed),
          e.prompt,
          e.rephrased_prompt,
          e.failure_reason,
          e.clean_frame.value_or(""),
          e.attacked_frame.value_or("")};
}

const std::vector<std::string> kExhibitHeader{"task",           "attack",      "scenario_seed",  "prompt",
                                              "rephrased_prompt", "failure_reason", "clean_frame", "attacked_frame"};

std::string markdown(const Table& t, const std::vector<Exhibit>& exhibits) {
  std::string out = std::string("## ") + (t.perception ? "Perception" : "Prompt") + " attack results\n\n";
  const auto h = header(t);
  out += md_line(h);
  out += md_line(std::vector<std::string>(h.size(), "---"));
  for (const auto& line : body(t)) out += md_line(line);
  if (!exhibits.empty()) {
    out += "\n## Failure cases\n";
    for (const auto& e : exhibits) {
      out += "\n### " + task_display(e.task) + " / " + e.attack + " / scenario " + std::to_string(e.scenario_seed) + "\n\n";
      out += "- prompt: " + e.prompt + "\n";
      out += "- rephrased_prompt: " + e.rephrased_prompt + "\n";
      out += "- failure_reason: " + e.failure_reason + "\n";
      if (e.clean_frame) out += "- frames: " + *e.clean_frame + " , " + e.attacked_frame.value_or("") + "\n";
    }
  }
  return out;
}

std::string csv(const Table& t, const std::vector<Exhibit>& exhibits) {
  std::string out = csv_line(header(t));
  for (const auto& line : body(t)) out += csv_line(line);
  if (!exhibits.empty()) {
    out += "\n" + csv_line(kExhibitHeader);
    for (const auto& e : exhibits) out += csv_line(exhibit_fields(e));
  }
  return out;
}

std::string json(const Table& t, const std::vector<Exhibit>& exhibits) {
  nlohmann::ordered_json j;
  j["table"] = t.perception ? "perception" : "prompt";
  j["tasks"] = t.tasks;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : t.rows) {
    nlohmann::ordered_json row;
    if (t.perception) row["category"] = r.label.category;
    row["attack"] = r.label.key;
    for (std::size_t i = 0; i < t.tasks.size(); ++i) {
      if (!r.cells[i]) continue;
      const auto& c = *r.cells[i];
      nlohmann::ordered_json cell;
      cell[t.perception ? "ssim" : "prompt_sim"] = c.baseline ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(c.sim_v);
      cell["action_cos"] = c.baseline ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(c.cos_v);
      cell["success_rate"] = c.success_v;
      row[t.tasks[i]] = cell;
    }
    rows.push_back(row);
  }
  j["rows"] = rows;
  if (!exhibits.empty()) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& e : exhibits) {
      const auto f = exhibit_fields(e);
      nlohmann::ordered_json x;
      for (std::size_t i = 0; i < f.size(); ++i) x[kExhibitHeader[i]] = f[i];
      x["scenario_seed"] = e.scenario_seed;
      arr.push_back(x);
    }
    j["failures"] = arr;
  }
  return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> find_files(const std::vector<std::filesystem::path>& roots, const std::string& name) {
  std::vector<std::filesystem::path> out;
  for (const auto& root : roots) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(root, ec)) {
      out.push_back(root);
      continue;
    }
    if (!std::filesystem::is_directory(root, ec)) throw ReportError("no such run directory: " + root.string());
    for (const auto& e : std::filesystem::recursive_directory_iterator(root))
      if (e.is_regular_file() && e.path().filename() == name) out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::string_view to_string(Format f) {
  switch (f) {
    case Format::markdown: return "markdown";
    case Format::csv: return "csv";
    case Format::json: return "json";
  }
  return "";
}

Format format_from_string(std::string_view s) {
  if (s == "markdown" || s == "md") return Format::markdown;
  if (s == "csv") return Format::csv;
  if (s == "json") return Format::json;
  throw ConfigError("unknown report format: " + std::string(s));
}

std::vector<orch::CampaignSummary> load_summaries(const std::vector<std::filesystem::path>& paths) {
  std::vector<orch::CampaignSummary> out;
  for (const auto& f : find_files(paths, "summary.json")) {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(read_text(f));
    } catch (const nlohmann::json::exception& e) {
      throw ReportError(f.string() + ": " + e.what());
    }
    out.push_back(orch::summary_from_json(j));
  }
  if (out.empty()) throw ReportError("no summary.json found");
  return out;
}

std::vector<Exhibit> load_exhibits(const std::vector<std::filesystem::path>& paths, int per_run) {
  std::vector<Exhibit> out;
  for (const auto& f : find_files(paths, "records.jsonl")) {
    if (f.filename() != "records.jsonl") continue;
    std::ifstream in(f);
    std::string line;
    int taken = 0;
    while (taken < per_run && std::getline(in, line)) {
      if (line.empty()) continue;
      nlohmann::json r;
      try {
        r = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw ReportError(f.string() + ": " + e.what());
      }
      if (!r["error"].is_null() || r["outcome"].value("success", true)) continue;
      Exhibit e;
      e.task = r["task"].value("kind", "");
      e.attack = r["attack"].value("kind", "");
      e.scenario_seed = r.value("scenario_seed", std::uint64_t{0});
      e.prompt = r.value("prompt_before", "");
      e.rephrased_prompt = r.value("prompt_after", "");
      const auto& reason = r["outcome"]["failure_reason"];
      e.failure_reason = reason.is_string() ? reason.get<std::string>() : "";
      const auto dir = f.parent_path() / "failures";
      const auto clean = dir / (std::to_string(e.scenario_seed) + "_clean.png");
      const auto attacked = dir / (std::to_string(e.scenario_seed) + "_attacked.png");
      if (std::filesystem::exists(clean) && std::filesystem::exists(attacked)) {
        e.clean_frame = clean.string();
        e.attacked_frame = attacked.string();
      }
      out.push_back(std::move(e));
      ++taken;
    }
  }
  return out;
}

std::string emit_report(const std::vector<orch::CampaignSummary>& summaries, const ReportSpec& spec,
                        const std::vector<Exhibit>& exhibits) {
  const Table t = build(summaries);
  static const std::vector<Exhibit> none;
  const auto& ex = spec.include_failure_frames ? exhibits : none;
  switch (spec.format) {
    case Format::markdown: return markdown(t, ex);
    case Format::csv: return csv(t, ex);
    case Format::json: return json(t, ex);
  }
  return "";
}

std::string emit_defense_table(const std::vector<orch::CampaignSummary>& rows, Format format) {
  static const std::vector<std::pair<std::string, std::string>> cols{
      {"no_attack", "No Attack"}, {"simple", "Simple"}, {"extension", "Extension"}, {"adjective", "Adjective"}, {"noun", "Noun"}};
  if (rows.empty()) throw ReportError("no defended summaries to report");
  std::vector<std::string> head, cells;
  nlohmann::ordered_json j;
  for (const auto& [key, name] : cols) {
    const auto it = std::find_if(rows.begin(), rows.end(), [&](const auto& s) { return s.attack == key; });
    if (it == rows.end()) throw ReportError("defense table is missing the " + key + " row");
    head.push_back(name);
    cells.push_back(metrics::format_percent(it->success_rate));
    j[key] = round_to(it->success_rate, 10);
  }
  switch (format) {
    case Format::markdown: return md_line(head) + md_line(std::vector<std::string>(head.size(), "---")) + md_line(cells);
    case Format::csv: return csv_line(head) + csv_line(cells);
    case Format::json: return j.dump(2) + "\n";
  }
  return "";
}

}  // namespace ert::report
