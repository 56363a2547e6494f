#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ert/prompt/lexicon.hpp"
#include "ert/prompt/llm_client.hpp"
#include "ert/prompt/prompt.hpp"

namespace ert::prompt {

enum class PromptAttackKind { simple, extension, adjective, noun };
enum class Engine { rule_based, external };

std::string_view to_string(PromptAttackKind k);
std::optional<PromptAttackKind> prompt_attack_from_string(std::string_view s);

struct PromptAttackSpec {
  PromptAttackKind kind = PromptAttackKind::simple;
  Engine engine = Engine::rule_based;
  std::uint64_t seed = 0;
};

// Word-level edit script over space-separated words.
struct EditOp {
  enum class Kind { keep, remove, insert };
  Kind kind;
  std::vector<std::string> words;
  friend bool operator==(const EditOp&, const EditOp&) = default;
};

struct EditScript {
  std::vector<EditOp> ops;

  // Minimal (LCS) script turning `from` into `to`.
  static EditScript diff(std::string_view from, std::string_view to);
  // Throws Error if `text` is not the string the script was built from.
  std::string apply(std::string_view text) const;
};

struct RephraseResult {
  Prompt prompt;
  EditScript inverse;  // attacked text -> original text
};

// Sentence-frame rewrites used by simple and extension attacks.
inline constexpr int kFrameCount = 4;

// Inert clauses appended by the extension attack. They contain no
// descriptor, quantifier, determiner, direction or action words.
const std::array<std::string_view, 8>& filler_clauses();

// Throws AttackNotApplicable when a descriptor has no entry in the map or
// the prompt has no object references.
RephraseResult rule_rephrase(const Prompt& prompt, const PromptAttackSpec& spec, const SynonymTable& table);

// Rewrites the prompt with the given sentence frame (0..3). Exposed for
// tests and for the defence's frame patterns.
Prompt apply_frame(const Prompt& prompt, int frame);

// Instruction prefixes sent to an external rephraser.
std::string_view external_prefix(PromptAttackKind k);

// Throws RephraseError on transport failure or an empty reply.
Prompt external_rephrase(const Prompt& prompt, const PromptAttackSpec& spec, LlmClient& client);

}  // namespace ert::prompt
