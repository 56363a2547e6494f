#include "ert/prompt/parse.hpp"

#include <algorithm>
#include <set>

#include "ert/common/error.hpp"

namespace ert::prompt {

namespace {

const std::set<std::string, std::less<>> kPutVerbs{"put", "place", "take", "drop", "move", "set", "pick", "bring"};
const std::set<std::string, std::less<>> kSweepVerbs{"sweep", "swept", "push", "pushed", "wipe", "wiped"};
const std::set<std::string, std::less<>> kRestoreVerbs{"restore", "restores", "restored", "restoring"};
const std::set<std::string, std::less<>> kDeterminers{"the", "a", "an", "all", "any", "one", "two", "three", "every", "each"};
const std::set<std::string, std::less<>> kTargetWords{"into", "inside", "within", "onto", "to", "then"};
const std::set<std::string, std::less<>> kConstraintWords{"exceeding", "exceed", "past", "crossing", "cross",
                                                          "beyond", "behind"};
const std::set<std::string, std::less<>> kBoundary{",", ".", ";", ":", "!", "?", "in", "on", "at", "from",
                                                   "without", "while", "should", "be", "it", "them", "is", "are",
                                                   "this", "that", "so", "with", "of", "going", "staying"};

bool is_verb(std::string_view w) { return kPutVerbs.count(w) || kSweepVerbs.count(w) || kRestoreVerbs.count(w); }

bool is_boundary(std::string_view w) {
  return kBoundary.count(w) || kDeterminers.count(w) || kTargetWords.count(w) || kConstraintWords.count(w) || is_verb(w);
}

bool match_at(const std::vector<std::string>& toks, std::size_t i, const std::vector<std::string>& words) {
  if (i + words.size() > toks.size()) return false;
  return std::equal(words.begin(), words.end(), toks.begin() + static_cast<long>(i));
}

// Reads a noun phrase starting at i (just after a determiner). Returns the
// descriptor and advances i. A phrase ends after its kind noun or at a
// boundary word.
CanonicalDescriptor read_np(const std::vector<std::string>& toks, std::size_t& i) {
  CanonicalDescriptor d;
  while (i < toks.size()) {
    bool consumed = false;
    if (!d.texture) {
      for (const auto& tp : texture_phrases()) {
        if (match_at(toks, i, tp.words)) {
          d.texture = tp.id;
          i += tp.words.size();
          consumed = true;
          break;
        }
      }
      if (consumed) continue;
    }
    for (const auto& kp : kind_phrases()) {
      if (match_at(toks, i, kp.words)) {
        d.kind = kp.kind ? std::string(sim::kind_info(*kp.kind).name) : std::string(kGenericNoun);
        i += kp.words.size();
        return d;
      }
    }
    const std::string& w = toks[i];
    if (is_boundary(w)) return d;
    if (w != "and") d.unknown.push_back(w);
    ++i;
  }
  return d;
}

enum class State { none, base, target, constraint };

}  // namespace

std::string_view to_string(Action a) {
  switch (a) {
    case Action::put: return "put";
    case Action::sweep: return "sweep";
    case Action::restore_sequence: return "restore_sequence";
  }
  return "put";
}

std::string CanonicalDescriptor::str() const {
  std::string s = texture ? std::string(sim::texture_info(*texture).name) : "-";
  s += " ";
  s += kind.value_or("-");
  for (const auto& u : unknown) s += " ?" + u;
  return s;
}

ParsedInstruction parse_prompt(std::string_view text, const SynonymTable& table, bool normalize) {
  std::vector<std::string> toks = tokenize(text);
  if (normalize) toks = invert_synonyms(toks, table);

  ParsedInstruction out;
  bool restore = false;
  std::optional<Action> verb_action;

  // Sentences mentioning restoration are the fixed suffix; they carry no
  // descriptors beyond "its original container".
  std::vector<std::string> kept;
  {
    std::vector<std::string> sentence;
    auto flush = [&] {
      const bool has_restore = std::any_of(sentence.begin(), sentence.end(), [](const std::string& w) { return kRestoreVerbs.count(w) > 0; });
      if (has_restore)
        restore = true;
      else
        kept.insert(kept.end(), sentence.begin(), sentence.end());
      sentence.clear();
    };
    for (const auto& t : toks) {
      sentence.push_back(t);
      if (t == "." || t == "!" || t == "?") flush();
    }
    flush();
  }

  State state = State::none;
  std::vector<CanonicalDescriptor> pending;  // phrases seen before any verb
  auto add = [&](CanonicalDescriptor d) {
    if (!d.texture && !d.kind && d.unknown.empty()) return;
    switch (state) {
      case State::none: pending.push_back(std::move(d)); break;
      case State::base: out.base.push_back(std::move(d)); break;
      case State::target: out.target.push_back(std::move(d)); break;
      case State::constraint: out.constraint.push_back(std::move(d)); break;
    }
  };

  std::size_t i = 0;
  while (i < kept.size()) {
    const std::string& w = kept[i];
    if (!out.quantifier && (w == "any" || w == "one" || w == "two" || w == "three" || w == "all"))
      out.quantifier = sim::quantifier_from_string(w);
    if (kPutVerbs.count(w) || kSweepVerbs.count(w)) {
      if (!verb_action) verb_action = kSweepVerbs.count(w) ? Action::sweep : Action::put;
      state = State::base;
      if (out.base.empty()) {
        for (auto& d : pending) out.base.push_back(std::move(d));
        pending.clear();
      }
      ++i;
      continue;
    }
    if (kTargetWords.count(w)) {
      state = State::target;
      ++i;
      continue;
    }
    if (kConstraintWords.count(w)) {
      state = State::constraint;
      ++i;
      continue;
    }
    if (kDeterminers.count(w)) {
      ++i;
      add(read_np(kept, i));
      continue;
    }
    ++i;
  }

  if (!verb_action && !restore) throw ParseError("no recognizable action verb in: " + std::string(text));
  out.action = restore ? Action::restore_sequence : *verb_action;
  if (out.base.empty()) {
    for (auto& d : pending) out.base.push_back(std::move(d));
  }
  if (out.base.empty()) throw ParseError("no object to act on in: " + std::string(text));
  return out;
}

nlohmann::ordered_json to_json(const ParsedInstruction& p) {
  auto list = [](const std::vector<CanonicalDescriptor>& v) {
    nlohmann::ordered_json a = nlohmann::ordered_json::array();
    for (const auto& d : v) a.push_back(d.str());
    return a;
  };
  nlohmann::ordered_json j;
  j["action"] = to_string(p.action);
  j["base"] = list(p.base);
  j["target"] = list(p.target);
  j["constraint"] = list(p.constraint);
  j["quantifier"] = p.quantifier ? nlohmann::ordered_json(sim::to_string(*p.quantifier)) : nlohmann::ordered_json();
  return j;
}

}  // namespace ert::prompt
