#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ert/sim/vocab.hpp"

namespace ert::prompt {

// Lower-cased word tokens; punctuation , . ; : ! ? become single tokens.
// Hyphens and apostrophes stay inside words.
std::vector<std::string> tokenize(std::string_view text);

// Canonical descriptor vocabulary, lower-cased and tokenised.
struct TexturePhrase {
  sim::TextureId id;
  std::vector<std::string> words;  // e.g. {"green","and","purple","stripe"}
};
struct KindPhrase {
  std::optional<sim::ObjectKind> kind;  // nullopt = generic "object"
  std::vector<std::string> words;
  bool plural;
};
const std::vector<TexturePhrase>& texture_phrases();
const std::vector<KindPhrase>& kind_phrases();

inline constexpr std::string_view kGenericNoun = "object";
inline constexpr std::string_view kGenericNounPlural = "objects";

// Canonical <-> synonym phrase pairs. Both maps are bijections and no
// synonym contains a canonical descriptor word of either map.
struct SynonymTable {
  struct Entry {
    std::string canonical;
    std::string synonym;
  };
  std::vector<Entry> adjective_map;  // texture phrase -> synonym phrase
  std::vector<Entry> noun_map;       // kind noun -> synonym, singular and plural rows

  static const SynonymTable& standard();

  std::optional<std::string> adjective_synonym(std::string_view canonical) const;
  std::optional<std::string> noun_synonym(std::string_view canonical) const;
  std::optional<std::string> adjective_canonical(std::string_view synonym) const;
  std::optional<std::string> noun_canonical(std::string_view synonym) const;
};

// Replaces every synonym phrase (longest match, whole words, case-insensitive
// on the first letter) in `text` by its canonical phrase. Works on display
// text and preserves everything else byte for byte.
std::string invert_synonyms(std::string_view text, const SynonymTable& table);

// Same substitution on a token stream (tokens already lower-cased).
std::vector<std::string> invert_synonyms(const std::vector<std::string>& tokens, const SynonymTable& table);

}  // namespace ert::prompt
