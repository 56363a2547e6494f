#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "ert/prompt/lexicon.hpp"
#include "ert/sim/scene.hpp"

namespace ert::prompt {

enum class Action { put, sweep, restore_sequence };
std::string_view to_string(Action a);

// Canonical descriptor. `kind` is a kind identifier or "object" for the
// generic noun; `unknown` holds words inside the noun phrase that matched
// nothing, which makes the descriptor unmatchable.
struct CanonicalDescriptor {
  std::optional<sim::TextureId> texture;
  std::optional<std::string> kind;
  std::vector<std::string> unknown;

  bool matchable() const { return unknown.empty() && kind.has_value(); }
  std::string str() const;
  friend bool operator==(const CanonicalDescriptor&, const CanonicalDescriptor&) = default;
};

struct ParsedInstruction {
  Action action = Action::put;
  std::vector<CanonicalDescriptor> base;
  std::vector<CanonicalDescriptor> target;
  std::vector<CanonicalDescriptor> constraint;
  std::optional<sim::Quantifier> quantifier;

  friend bool operator==(const ParsedInstruction&, const ParsedInstruction&) = default;
};

// Throws ParseError when no action verb is found or no base object is named.
ParsedInstruction parse_prompt(std::string_view text, const SynonymTable& table, bool normalize = true);

nlohmann::ordered_json to_json(const ParsedInstruction& p);

}  // namespace ert::prompt
