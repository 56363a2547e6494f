#include "ert/prompt/lexicon.hpp"

#include <algorithm>
#include <cctype>

namespace ert::prompt {

namespace {

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '\'';
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> split_words(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

struct PhraseRow {
  std::vector<std::string> from;  // lower-cased tokens
  std::string to;                 // replacement display text
};

// Rows for synonym -> canonical, longest first.
std::vector<PhraseRow> inverse_rows(const SynonymTable& table) {
  std::vector<PhraseRow> rows;
  for (const auto* map : {&table.adjective_map, &table.noun_map})
    for (const auto& e : *map) rows.push_back({tokenize(e.synonym), e.canonical});
  std::stable_sort(rows.begin(), rows.end(), [](const PhraseRow& a, const PhraseRow& b) { return a.from.size() > b.from.size(); });
  return rows;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(lower(cur));
    cur.clear();
  };
  for (char c : text) {
    if (is_word_char(c)) {
      cur.push_back(c);
    } else {
      flush();
      if (c == ',' || c == '.' || c == ';' || c == ':' || c == '!' || c == '?') out.emplace_back(1, c);
    }
  }
  flush();
  return out;
}

const std::vector<TexturePhrase>& texture_phrases() {
  static const std::vector<TexturePhrase> rows = [] {
    std::vector<TexturePhrase> r;
    for (const auto& t : sim::all_textures()) r.push_back({t.id, tokenize(t.phrase)});
    std::stable_sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.words.size() > b.words.size(); });
    return r;
  }();
  return rows;
}

const std::vector<KindPhrase>& kind_phrases() {
  static const std::vector<KindPhrase> rows = [] {
    std::vector<KindPhrase> r;
    for (const auto& k : sim::all_kinds()) {
      r.push_back({k.kind, tokenize(k.noun), false});
      r.push_back({k.kind, tokenize(k.plural), true});
    }
    r.push_back({std::nullopt, {std::string(kGenericNoun)}, false});
    r.push_back({std::nullopt, {std::string(kGenericNounPlural)}, true});
    std::stable_sort(r.begin(), r.end(), [](const auto& a, const auto& b) { return a.words.size() > b.words.size(); });
    return r;
  }();
  return rows;
}

const SynonymTable& SynonymTable::standard() {
  static const SynonymTable table = [] {
    SynonymTable t;
    t.adjective_map = {
        {"red", "crimson"},
        {"green", "emerald"},
        {"blue", "azure"},
        {"yellow", "golden"},
        {"purple", "violet"},
        {"orange", "tangerine"},
        {"red swirl", "scarlet spiraled"},
        {"green and purple stripe", "jade and lilac banded"},
        {"blue and green stripe", "cobalt and moss banded"},
        {"yellow and purple polka dot", "lemon and plum speckled"},
        {"green and blue polka dot", "mint and navy speckled"},
        {"red and yellow stripe", "ruby and saffron banded"},
    };
    t.noun_map = {
        {"block", "cubic brick"},
        {"blocks", "cubic bricks"},
        {"star", "five-pointed figure"},
        {"stars", "five-pointed figures"},
        {"letter R", "uppercase arr glyph"},
        {"letter Rs", "uppercase arr glyphs"},
        {"letter V", "uppercase vee glyph"},
        {"letter Vs", "uppercase vee glyphs"},
        {"hexagon", "six-sided polygon"},
        {"hexagons", "six-sided polygons"},
        {"container", "receptacle"},
        {"containers", "receptacles"},
        {"pan", "skillet"},
        {"pans", "skillets"},
        {"bowl", "basin"},
        {"bowls", "basins"},
        {"pallet", "skid platform"},
        {"pallets", "skid platforms"},
        {"frame", "three-walled enclosure"},
        {"frames", "three-walled enclosures"},
        {"line", "boundary marking"},
        {"lines", "boundary markings"},
        {"object", "item"},
        {"objects", "items"},
    };
    return t;
  }();
  return table;
}

namespace {
std::optional<std::string> find_in(const std::vector<SynonymTable::Entry>& map, std::string_view key, bool forward) {
  for (const auto& e : map)
    if ((forward ? e.canonical : e.synonym) == key) return forward ? e.synonym : e.canonical;
  return std::nullopt;
}
}  // namespace

std::optional<std::string> SynonymTable::adjective_synonym(std::string_view c) const { return find_in(adjective_map, c, true); }
std::optional<std::string> SynonymTable::noun_synonym(std::string_view c) const { return find_in(noun_map, c, true); }
std::optional<std::string> SynonymTable::adjective_canonical(std::string_view s) const { return find_in(adjective_map, s, false); }
std::optional<std::string> SynonymTable::noun_canonical(std::string_view s) const { return find_in(noun_map, s, false); }

std::string invert_synonyms(std::string_view text, const SynonymTable& table) {
  const auto rows = inverse_rows(table);
  const std::vector<std::string> words = split_words(text);

  // Strip leading capital / trailing punctuation per word for matching only.
  std::vector<std::string> keys;
  keys.reserve(words.size());
  for (const auto& w : words) {
    std::string k;
    for (char c : w)
      if (is_word_char(c)) k.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    keys.push_back(k);
  }

  std::string out;
  std::size_t i = 0;
  auto emit = [&](const std::string& s) {
    if (!out.empty()) out.push_back(' ');
    out += s;
  };
  while (i < words.size()) {
    bool matched = false;
    for (const auto& row : rows) {
      const std::size_t n = row.from.size();
      if (i + n > words.size()) continue;
      bool ok = true;
      for (std::size_t k = 0; k < n && ok; ++k) {
        ok = keys[i + k] == row.from[k];
        // Inner words must be bare (no attached punctuation) so phrases do
        // not match across clause boundaries.
        if (ok && k + 1 < n && !std::all_of(words[i + k].begin(), words[i + k].end(), is_word_char)) ok = false;
      }
      if (!ok) continue;
      const std::string& first = words[i];
      std::string rep = row.to;
      if (!first.empty() && std::isupper(static_cast<unsigned char>(first[0])))
        rep[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(rep[0])));
      // Carry trailing punctuation of the last matched word.
      const std::string& last = words[i + n - 1];
      std::size_t tail = last.size();
      while (tail > 0 && !is_word_char(last[tail - 1])) --tail;
      emit(rep + last.substr(tail));
      i += n;
      matched = true;
      break;
    }
    if (!matched) emit(words[i++]);
  }
  return out;
}

std::vector<std::string> invert_synonyms(const std::vector<std::string>& tokens, const SynonymTable& table) {
  const auto rows = inverse_rows(table);
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    bool matched = false;
    for (const auto& row : rows) {
      const std::size_t n = row.from.size();
      if (i + n > tokens.size() || !std::equal(row.from.begin(), row.from.end(), tokens.begin() + static_cast<long>(i))) continue;
      for (auto& t : tokenize(row.to)) out.push_back(t);
      i += n;
      matched = true;
      break;
    }
    if (!matched) out.push_back(tokens[i++]);
  }
  return out;
}

}  // namespace ert::prompt
