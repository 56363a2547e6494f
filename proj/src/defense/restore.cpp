#include "ert/defense/restore.hpp"

#include <cctype>
#include <regex>
#include <set>

#include "ert/common/error.hpp"
#include "ert/common/rng.hpp"
#include "ert/prompt/rephrase.hpp"
#include "ert/sim/generate.hpp"

namespace ert::defense {

namespace {

std::string lower_first(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[0])));
  return s;
}

std::string strip_fillers(std::string text) {
  for (const auto& f : prompt::filler_clauses()) {
    for (const std::string lead : {", and ", ", "}) {
      const std::string needle = lead + std::string(f);
      for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle)) text.erase(pos, needle.size());
    }
  }
  return text;
}

// Put-style body (no final full stop) back to "Put B into T".
std::string canonical_put(const std::string& body) {
  static const std::regex place("^Place (.+) inside (.+)$");
  static const std::regex passive("^(.+) should be put into (.+)$");
  static const std::regex fronted("^Into (.+), put (.+)$");
  static const std::regex take("^Take (.+) and drop (?:it|them) into (.+)$");
  std::smatch m;
  if (std::regex_match(body, m, place)) return "Put " + m[1].str() + " into " + m[2].str();
  if (std::regex_match(body, m, passive)) return "Put " + lower_first(m[1].str()) + " into " + m[2].str();
  if (std::regex_match(body, m, fronted)) return "Put " + m[2].str() + " into " + m[1].str();
  if (std::regex_match(body, m, take)) return "Put " + m[1].str() + " into " + m[2].str();
  return body;
}

std::string canonical_sweep(const std::string& body) {
  static const std::regex push("^Push (.+) into the (.+) without going past the (.+)$");
  static const std::regex passive("^(.+) should be swept into the (.+) without crossing the (.+)$");
  static const std::regex fronted("^Into the (.+), sweep (.+) without crossing the (.+)$");
  static const std::regex wipe("^Wipe (.+) into the (.+) while staying behind the (.+)$");
  std::smatch m;
  auto build = [](const std::string& x, const std::string& box, const std::string& line) {
    return "Sweep " + x + " into the " + box + " without exceeding the " + line;
  };
  if (std::regex_match(body, m, push)) return build(m[1], m[2], m[3]);
  if (std::regex_match(body, m, passive)) return build(lower_first(m[1]), m[2], m[3]);
  if (std::regex_match(body, m, fronted)) return build(m[2], m[1], m[3]);
  if (std::regex_match(body, m, wipe)) return build(m[1], m[2], m[3]);
  return body;
}

const std::set<std::string>& known_words() {
  static const std::set<std::string> words = [] {
    std::set<std::string> w{"put",     "the",  "and",       "into",     "in",     "this", "scene", "sweep",
                            "without", "exceeding", "then", "finally", "restore", "it",   "its",   "original",
                            "container", "object", "objects"};
    for (const auto& t : prompt::texture_phrases()) w.insert(t.words.begin(), t.words.end());
    for (const auto& k : prompt::kind_phrases()) w.insert(k.words.begin(), k.words.end());
    for (auto q : {sim::Quantifier::any, sim::Quantifier::one, sim::Quantifier::two, sim::Quantifier::three,
                   sim::Quantifier::all})
      w.insert(std::string(sim::to_string(q)));
    return w;
  }();
  return words;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

}  // namespace

Restoration restore_rule_based(const prompt::Prompt& attacked, const prompt::SynonymTable& table) {
  std::string text = prompt::invert_synonyms(attacked.text(), table);
  text = strip_fillers(text);

  const std::string suffix = std::string(". ") + prompt::kRestoreSuffix;
  std::string tail = ".";
  std::string body = text;
  if (body.size() > suffix.size() && body.compare(body.size() - suffix.size(), suffix.size(), suffix) == 0) {
    tail = suffix;
    body.resize(body.size() - suffix.size());
  } else if (!body.empty() && body.back() == '.') {
    body.pop_back();
  } else {
    tail.clear();
  }
  body = attacked.task_kind == sim::TaskKind::sweep_without_exceeding ? canonical_sweep(body) : canonical_put(body);

  Restoration r;
  r.prompt = prompt::Prompt::from_text(body + tail, attacked.task_kind);
  for (const auto& tok : prompt::tokenize(r.prompt.text())) {
    if (!std::isalpha(static_cast<unsigned char>(tok[0]))) continue;
    if (!known_words().count(tok)) r.unmapped.push_back(tok);
  }
  r.partial = !r.unmapped.empty();
  return r;
}

void RestorationContext::validate() const {
  if (examples.empty()) throw ConfigError("restoration context has no examples");
}

RestorationContext default_context(const sim::TaskSpec& task, int count, std::uint64_t seed) {
  RestorationContext ctx;
  const auto& table = prompt::SynonymTable::standard();
  for (int i = 0; i < count; ++i) {
    const std::uint64_t s = seed_for(seed, "restoration_examples", static_cast<std::uint64_t>(i));
    const auto sc = sim::generate_scenario(task, s);
    const auto p = prompt::generate_prompt(task, sc.goal, sc.scene);
    prompt::PromptAttackSpec spec;
    spec.kind = static_cast<prompt::PromptAttackKind>(i % 4);
    spec.seed = s;
    ctx.examples.push_back({p.text(), prompt::rule_rephrase(p, spec, table).prompt.text()});
  }
  return ctx;
}

nlohmann::ordered_json to_json(const RestorationContext& c) {
  nlohmann::ordered_json j;
  j["instruction"] = c.instruction;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& e : c.examples) arr.push_back({{"original", e.original}, {"adversarial", e.adversarial}});
  j["examples"] = arr;
  return j;
}

RestorationContext context_from_json(const nlohmann::json& j) {
  RestorationContext c;
  try {
    c.instruction = j.value("instruction", c.instruction);
    for (const auto& e : j.at("examples"))
      c.examples.push_back({e.at("original").get<std::string>(), e.at("adversarial").get<std::string>()});
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad restoration context: ") + e.what());
  }
  c.validate();
  return c;
}

std::string restore_request(const std::string& attacked, const RestorationContext& ctx) {
  std::string req = ctx.instruction + "\n";
  for (const auto& e : ctx.examples) req += "\nAdversarial: " + e.adversarial + "\nOriginal: " + e.original + "\n";
  req += "\nAdversarial: " + attacked + "\nOriginal:";
  return req;
}

prompt::Prompt restore_external(const prompt::Prompt& attacked, const RestorationContext& ctx, prompt::LlmClient& client) {
  ctx.validate();
  std::string reply;
  try {
    reply = client.complete(restore_request(attacked.text(), ctx));
  } catch (const TransportError& e) {
    throw DefenseUnavailable(std::string("restorer unreachable: ") + e.what());
  }
  reply = trim(reply);
  if (reply.empty()) throw DefenseUnavailable("restorer returned an empty reply");
  return prompt::Prompt::from_text(reply, attacked.task_kind);
}

std::string_view to_string(Restorer r) {
  switch (r) {
    case Restorer::none: return "none";
    case Restorer::rule_based: return "rule_based";
    case Restorer::external: return "external";
  }
  return "";
}

Restorer restorer_from_string(std::string_view s) {
  if (s == "none") return Restorer::none;
  if (s == "rule_based") return Restorer::rule_based;
  if (s == "external") return Restorer::external;
  throw ConfigError("unknown restorer: " + std::string(s));
}

DefenseConfig::DefenseConfig() { campaign.n_scenarios = kDefendedScenarios; }

orch::PromptFilter make_filter(const DefenseConfig& config, prompt::LlmClient* llm) {
  const sim::TaskKind kind = config.campaign.task.kind;
  switch (config.restorer) {
    case Restorer::none: return {};
    case Restorer::rule_based:
      return [kind](const std::string& attacked) {
        return restore_rule_based(prompt::Prompt::from_text(attacked, kind)).prompt.text();
      };
    case Restorer::external: {
      if (!llm) throw ConfigError("external restorer needs an LLM endpoint");
      auto ctx = config.context.examples.empty() ? default_context(config.campaign.task) : config.context;
      ctx.validate();
      return [kind, ctx, llm](const std::string& attacked) {
        return restore_external(prompt::Prompt::from_text(attacked, kind), ctx, *llm).text();
      };
    }
  }
  return {};
}

DefenseTable run_defended_campaign(const DefenseConfig& config, const orch::CampaignDeps& deps) {
  orch::CampaignDeps d = deps;
  d.defense = make_filter(config, deps.llm);
  const prompt::Engine engine =
      config.campaign.attack.family == orch::AttackFamily::prompt ? config.campaign.attack.prompt.engine : prompt::Engine::rule_based;
  DefenseTable table;
  for (const char* name : {"no_attack", "simple", "extension", "adjective", "noun"}) {
    orch::CampaignConfig c = config.campaign;
    c.attack = orch::attack_from_name(name, engine);
    auto res = orch::run_campaign(c, d);
    table.rows.push_back(res.summary);
    table.runs.push_back(std::move(res));
  }
  return table;
}

}  // namespace ert::defense
