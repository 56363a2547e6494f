#include "ert/prompt/distance.hpp"

#include <algorithm>
#include <cctype>
#include <iterator>
#include <unordered_set>

namespace ert::prompt {

namespace {

const std::unordered_set<std::string>& stop_words() {
  static const std::unordered_set<std::string> s{
      "the", "a", "an", "this", "that", "these", "those", "it", "them", "its", "and", "or", "of", "in",
      "on", "to", "then", "so", "as", "with", "by", "be", "is", "are", "should", "while", "from", "until",
      "there", "they", "where", "throughout", "whole", "entire", "very", "much", "more", "over", "any"};
  return s;
}

bool is_punct(const std::string& t) {
  return std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::ispunct(c); });
}

std::string singular(const std::string& w) {
  static const std::unordered_set<std::string> plural_nouns = [] {
    std::unordered_set<std::string> s;
    for (const auto& k : kind_phrases())
      if (k.plural && !k.words.empty()) s.insert(k.words.back());
    return s;
  }();
  if (plural_nouns.count(w) && w.size() > 1 && w.back() == 's') {
    if (w.size() > 3 && w.compare(w.size() - 3, 3, "xes") == 0) return w.substr(0, w.size() - 2);
    return w.substr(0, w.size() - 1);
  }
  return w;
}

}  // namespace

std::set<std::string> content_tokens(std::string_view text, const SynonymTable& table) {
  std::set<std::string> out;
  for (const auto& t : invert_synonyms(tokenize(text), table)) {
    if (is_punct(t) || stop_words().count(t)) continue;
    out.insert(singular(t));
  }
  return out;
}

double prompt_distance(std::string_view a, std::string_view b, const SynonymTable& table) {
  const auto sa = content_tokens(a, table);
  const auto sb = content_tokens(b, table);
  if (sa.empty() && sb.empty()) return 0.0;
  std::set<std::string> inter;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::inserter(inter, inter.begin()));
  const double uni = static_cast<double>(sa.size() + sb.size() - inter.size());
  return 1.0 - static_cast<double>(inter.size()) / uni;
}

}  // namespace ert::prompt
