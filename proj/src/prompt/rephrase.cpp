#include "ert/prompt/rephrase.hpp"

#include <algorithm>
#include <cctype>

#include "ert/common/error.hpp"
#include "ert/common/rng.hpp"

namespace ert::prompt {

namespace {

constexpr std::array<std::string_view, 4> kAttackNames{"simple", "extension", "adjective", "noun"};

const std::array<std::string_view, 8> kFillers{
    "ensuring smooth and careful handling throughout this entire simple procedure",
    "keeping motions slow and steady and deliberate from start until finish",
    "while maintaining careful attention throughout so that nothing gets disturbed",
    "making sure that everything remains neat and tidy throughout this whole task",
    "paying close attention so that nearby things remain exactly where they are",
    "using gentle and precise movements so that nothing else gets bumped",
    "with patience and care so that workspace order stays fully intact",
    "as smoothly and quietly as possible without rushing anything whatsoever",
};

std::vector<std::string> words_of(std::string_view s) {
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

std::string capitalize(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s;
}

struct Parts {
  std::vector<const Segment*> base, target, constraint;
  const Segment* scene = nullptr;
  std::string quantifier;  // sweep only
};

Parts split(const Prompt& p) {
  Parts parts;
  for (const auto& s : p.segments) {
    if (s.type == SegmentType::scene_ref) parts.scene = &s;
    if (s.type != SegmentType::object_ref) continue;
    switch (s.role) {
      case Role::base: parts.base.push_back(&s); break;
      case Role::target: parts.target.push_back(&s); break;
      case Role::constraint: parts.constraint.push_back(&s); break;
    }
  }
  if (parts.base.empty()) throw AttackNotApplicable("prompt has no object references to rewrite");
  if (p.task_kind == sim::TaskKind::sweep_without_exceeding) {
    const auto w = words_of(p.segments.front().text);
    if (w.size() < 2 || parts.target.empty() || parts.constraint.empty())
      throw AttackNotApplicable("sweep prompt lacks its quantifier, bounds or constraint");
    parts.quantifier = w[1];
  } else if (parts.target.empty()) {
    throw AttackNotApplicable("prompt has no destination reference");
  }
  return parts;
}

class Builder {
 public:
  Builder& text(std::string t) {
    if (!segs_.empty() && segs_.back().type == SegmentType::text)
      segs_.back().text += t;
    else
      segs_.push_back(Segment::plain(std::move(t)));
    return *this;
  }
  Builder& seg(const Segment& s) {
    segs_.push_back(s);
    return *this;
  }
  // "the A and the B" (+ " in this scene").
  Builder& base_list(const Parts& p, bool capital) {
    for (std::size_t i = 0; i < p.base.size(); ++i) {
      text(i == 0 ? (capital ? "The " : "the ") : " and the ");
      seg(*p.base[i]);
    }
    if (p.scene) {
      text(" in ");
      seg(*p.scene);
    }
    return *this;
  }
  // "the Y then the Z".
  Builder& target_list(const Parts& p) {
    for (std::size_t i = 0; i < p.target.size(); ++i) {
      text(i == 0 ? "the " : " then the ");
      seg(*p.target[i]);
    }
    return *this;
  }
  std::vector<Segment> take() { return std::move(segs_); }

 private:
  std::vector<Segment> segs_;
};

// Body without the final full stop; the caller closes the sentence.
std::vector<Segment> frame_body(const Prompt& p, const Parts& parts, int frame) {
  Builder b;
  if (p.task_kind == sim::TaskKind::sweep_without_exceeding) {
    const std::string& q = parts.quantifier;
    const Segment& x = *parts.base.front();
    const Segment& box = *parts.target.front();
    const Segment& line = *parts.constraint.front();
    switch (frame) {
      case 0: b.text("Push " + q + " ").seg(x).text(" into the ").seg(box).text(" without going past the ").seg(line); break;
      case 1: b.text(capitalize(q) + " ").seg(x).text(" should be swept into the ").seg(box).text(" without crossing the ").seg(line); break;
      case 2: b.text("Into the ").seg(box).text(", sweep " + q + " ").seg(x).text(" without crossing the ").seg(line); break;
      default: b.text("Wipe " + q + " ").seg(x).text(" into the ").seg(box).text(" while staying behind the ").seg(line); break;
    }
    return b.take();
  }
  const char* pronoun = parts.base.size() > 1 ? "them" : "it";
  switch (frame) {
    case 0: b.text("Place ").base_list(parts, false).text(" inside ").target_list(parts); break;
    case 1: b.base_list(parts, true).text(" should be put into ").target_list(parts); break;
    case 2: b.text("Into ").target_list(parts).text(", put ").base_list(parts, false); break;
    default: b.text("Take ").base_list(parts, false).text(std::string(" and drop ") + pronoun + " into ").target_list(parts); break;
  }
  return b.take();
}

void close(Prompt& out, std::string tail) {
  if (out.task_kind == sim::TaskKind::pick_order_restore) tail += std::string(" ") + kRestoreSuffix;
  if (!out.segments.empty() && out.segments.back().type == SegmentType::text)
    out.segments.back().text += tail;
  else
    out.segments.push_back(Segment::plain(std::move(tail)));
}

}  // namespace

std::string_view to_string(PromptAttackKind k) { return kAttackNames[static_cast<std::size_t>(k)]; }

std::optional<PromptAttackKind> prompt_attack_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kAttackNames.size(); ++i)
    if (kAttackNames[i] == s) return static_cast<PromptAttackKind>(i);
  return std::nullopt;
}

const std::array<std::string_view, 8>& filler_clauses() { return kFillers; }

EditScript EditScript::diff(std::string_view from, std::string_view to) {
  const auto a = words_of(from);
  const auto b = words_of(to);
  const std::size_t n = a.size(), m = b.size();
  std::vector<std::vector<int>> lcs(n + 1, std::vector<int>(m + 1, 0));
  for (std::size_t i = n; i-- > 0;)
    for (std::size_t j = m; j-- > 0;)
      lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);

  EditScript s;
  auto push = [&](EditOp::Kind k, const std::string& w) {
    if (!s.ops.empty() && s.ops.back().kind == k)
      s.ops.back().words.push_back(w);
    else
      s.ops.push_back({k, {w}});
  };
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && a[i] == b[j]) {
      push(EditOp::Kind::keep, a[i]);
      ++i;
      ++j;
    } else if (j < m && (i == n || lcs[i][j + 1] >= lcs[i + 1][j])) {
      push(EditOp::Kind::insert, b[j++]);
    } else {
      push(EditOp::Kind::remove, a[i++]);
    }
  }
  return s;
}

std::string EditScript::apply(std::string_view text) const {
  const auto words = words_of(text);
  std::vector<std::string> out;
  std::size_t i = 0;
  for (const auto& op : ops) {
    switch (op.kind) {
      case EditOp::Kind::keep:
      case EditOp::Kind::remove:
        for (const auto& w : op.words) {
          if (i >= words.size() || words[i] != w) throw Error("edit script does not match its input text");
          if (op.kind == EditOp::Kind::keep) out.push_back(w);
          ++i;
        }
        break;
      case EditOp::Kind::insert: out.insert(out.end(), op.words.begin(), op.words.end()); break;
    }
  }
  if (i != words.size()) throw Error("edit script does not cover its input text");
  std::string s;
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (k) s.push_back(' ');
    s += out[k];
  }
  return s;
}

Prompt apply_frame(const Prompt& prompt, int frame) {
  const Parts parts = split(prompt);
  Prompt out;
  out.task_kind = prompt.task_kind;
  out.segments = frame_body(prompt, parts, frame);
  close(out, ".");
  return out;
}

RephraseResult rule_rephrase(const Prompt& prompt, const PromptAttackSpec& spec, const SynonymTable& table) {
  if (spec.engine != Engine::rule_based) throw ConfigError("rule_rephrase needs the rule_based engine");
  Prompt out;
  switch (spec.kind) {
    case PromptAttackKind::simple: {
      Rng rng(seed_for(spec.seed, "simple"));
      out = apply_frame(prompt, rng.uniform_int(0, kFrameCount - 1));
      break;
    }
    case PromptAttackKind::extension: {
      Rng rng(seed_for(spec.seed, "extension"));
      const Parts parts = split(prompt);
      out.task_kind = prompt.task_kind;
      out.segments = frame_body(prompt, parts, rng.uniform_int(0, kFrameCount - 1));
      const int f1 = rng.uniform_int(0, static_cast<int>(kFillers.size()) - 1);
      int f2 = rng.uniform_int(0, static_cast<int>(kFillers.size()) - 2);
      if (f2 >= f1) ++f2;
      close(out, ", " + std::string(kFillers[static_cast<std::size_t>(f1)]) + ", and " +
                     std::string(kFillers[static_cast<std::size_t>(f2)]) + ".");
      break;
    }
    case PromptAttackKind::adjective:
    case PromptAttackKind::noun: {
      out = prompt;
      bool any = false;
      for (auto& s : out.segments) {
        if (s.type != SegmentType::object_ref) continue;
        any = true;
        const bool adj = spec.kind == PromptAttackKind::adjective;
        const std::string& word = adj ? s.desc.adjective : s.desc.noun;
        const auto syn = adj ? table.adjective_synonym(word) : table.noun_synonym(word);
        if (!syn) throw AttackNotApplicable("no synonym for '" + word + "'");
        (adj ? s.desc.adjective : s.desc.noun) = *syn;
      }
      if (!any) throw AttackNotApplicable("prompt has no object references to rewrite");
      break;
    }
  }
  RephraseResult r;
  r.inverse = EditScript::diff(out.text(), prompt.text());
  r.prompt = std::move(out);
  return r;
}

std::string_view external_prefix(PromptAttackKind k) {
  switch (k) {
    case PromptAttackKind::simple: return "Generate a paraphrase by keeping the meaning constant: ";
    case PromptAttackKind::extension:
      return "Generate a very lengthy paraphrase with over 50 words by keeping the meaning constant: ";
    case PromptAttackKind::adjective:
      return "Add much more redundant information or use long, extended synonyms to replace words describing colors or "
             "patterns without showing the initial words describing the colors or patterns, while keeping words "
             "describing objects the same: ";
    case PromptAttackKind::noun:
      return "Add much more redundant information or use long, extended synonyms to replace words describing objects "
             "without showing the initial words describing the objects while keeping words describing colors or "
             "patterns the same: ";
  }
  return "";
}

Prompt external_rephrase(const Prompt& prompt, const PromptAttackSpec& spec, LlmClient& client) {
  if (spec.engine != Engine::external) throw ConfigError("external_rephrase needs the external engine");
  std::string reply;
  try {
    reply = client.complete(std::string(external_prefix(spec.kind)) + prompt.text());
  } catch (const TransportError& e) {
    throw RephraseError(std::string("rephraser unreachable: ") + e.what());
  }
  const auto first = reply.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) throw RephraseError("rephraser returned an empty reply");
  const auto last = reply.find_last_not_of(" \t\r\n");
  return Prompt::from_text(reply.substr(first, last - first + 1), prompt.task_kind);
}

}  // namespace ert::prompt
