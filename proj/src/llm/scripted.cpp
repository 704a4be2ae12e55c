#include "ace/llm/scripted.hpp"

#include <regex>

namespace ace::llm {

namespace {

const char* match_name(ScriptRule::Match m) {
  switch (m) {
    case ScriptRule::Match::Exact: return "exact";
    case ScriptRule::Match::Substring: return "substring";
    case ScriptRule::Match::Regex: return "regex";
  }
  return "?";
}

ScriptRule::Match match_from_name(const std::string& s) {
  if (s == "exact") return ScriptRule::Match::Exact;
  if (s == "substring") return ScriptRule::Match::Substring;
  if (s == "regex") return ScriptRule::Match::Regex;
  throw std::invalid_argument("unknown rule matcher: " + s);
}

bool rule_matches(const ScriptRule& r, const std::string& prompt) {
  switch (r.match) {
    case ScriptRule::Match::Exact: return hash_hex(prompt) == r.pattern;
    case ScriptRule::Match::Substring: return prompt.find(r.pattern) != std::string::npos;
    case ScriptRule::Match::Regex:
      return std::regex_search(prompt, std::regex(r.pattern));
  }
  return false;
}

std::string prompt_head(const std::string& prompt) {
  std::string head = prompt.substr(0, 120);
  for (char& c : head)
    if (c == '\n') c = ' ';
  if (prompt.size() > 120) head += "...";
  return head;
}

}  // namespace

json rule_to_json(const ScriptRule& r) {
  json j;
  j["match"] = match_name(r.match);
  j["pattern"] = r.pattern;
  j["reply"] = r.reply;
  if (r.max_uses >= 0) j["max_uses"] = r.max_uses;
  return j;
}

ScriptRule rule_from_json(const json& j) {
  ScriptRule r;
  try {
    r.match = match_from_name(j.at("match").get<std::string>());
    r.pattern = j.at("pattern").get<std::string>();
    r.reply = j.at("reply").get<std::string>();
    r.max_uses = j.value("max_uses", -1);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad script rule: ") + e.what());
  }
  if (r.match == ScriptRule::Match::Regex) {
    try {
      std::regex probe(r.pattern);  // validate at load time
    } catch (const std::regex_error& e) {
      throw std::invalid_argument("bad rule regex '" + r.pattern + "': " + e.what());
    }
  }
  return r;
}

ScriptedBackend::ScriptedBackend(std::vector<ScriptRule> rules)
    : rules_(std::move(rules)), used_(rules_.size(), 0) {}

ScriptedBackend ScriptedBackend::from_json(const json& j) {
  std::vector<ScriptRule> rules;
  for (const auto& jr : j.at("rules")) rules.push_back(rule_from_json(jr));
  return ScriptedBackend(std::move(rules));
}

ScriptedBackend ScriptedBackend::load(const std::string& path) {
  return from_json(json::parse(read_file(path)));
}

json ScriptedBackend::to_json() const {
  json arr = json::array();
  for (const auto& r : rules_) arr.push_back(rule_to_json(r));
  return json{{"rules", arr}};
}

int ScriptedBackend::remaining(size_t i) const {
  std::lock_guard<std::mutex> lock(mu_);
  if (rules_[i].max_uses < 0) return -1;
  return rules_[i].max_uses - used_[i];
}

std::string ScriptedBackend::do_complete(const std::string& prompt) {
  std::lock_guard<std::mutex> lock(mu_);
  for (size_t i = 0; i < rules_.size(); ++i) {
    const ScriptRule& r = rules_[i];
    if (r.max_uses >= 0 && used_[i] >= r.max_uses) continue;
    if (!rule_matches(r, prompt)) continue;
    ++used_[i];
    return r.reply;
  }
  throw NoRuleError("no script rule matches prompt: " + prompt_head(prompt));
}

}  // namespace ace::llm
