#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ert/orchestrator/campaign.hpp"

namespace ert::report {

enum class Format { markdown, csv, json };
std::string_view to_string(Format f);
Format format_from_string(std::string_view s);  // throws ConfigError

struct ReportSpec {
  Format format = Format::markdown;
  bool include_failure_frames = false;
};

struct Exhibit {
  std::string task;
  std::string attack;
  std::uint64_t scenario_seed = 0;
  std::string prompt;
  std::string rephrased_prompt;
  std::string failure_reason;
  std::optional<std::string> clean_frame;     // path
  std::optional<std::string> attacked_frame;  // path
};

// Summaries from every summary.json at or below each path, sorted by path.
// Throws ReportError when nothing is found or a file is not a summary.
std::vector<orch::CampaignSummary> load_summaries(const std::vector<std::filesystem::path>& paths);

// Failed, error-free records from every records.jsonl below each path, at
// most `per_run` per run. Frame paths are filled when the PNGs exist.
std::vector<Exhibit> load_exhibits(const std::vector<std::filesystem::path>& paths, int per_run = 3);

// One block of task columns, attack rows in table order, no-attack row last.
// Throws ReportError on empty input, prompt and perception summaries mixed
// together, or a repeated (task, attack) pair.
std::string emit_report(const std::vector<orch::CampaignSummary>& summaries, const ReportSpec& spec,
                        const std::vector<Exhibit>& exhibits = {});

// Defended success rates as one row: No Attack, Simple, Extension, Adjective, Noun.
std::string emit_defense_table(const std::vector<orch::CampaignSummary>& rows, Format format);

}  // namespace ert::report
