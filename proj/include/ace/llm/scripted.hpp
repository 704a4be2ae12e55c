#pragma once

#include <memory>
#include <optional>

#include "ace/llm/backend.hpp"

namespace ace::llm {

struct NoRuleError : BackendError {
  using BackendError::BackendError;
};

// Deterministic prompt -> reply rule. Matchers:
//   exact     pattern is the hex FNV-1a hash of the whole prompt
//   substring pattern occurs anywhere in the prompt
//   regex     std::regex (ECMAScript) searches the prompt
// First matching rule wins; max_uses < 0 means unlimited.
struct ScriptRule {
  enum class Match { Exact, Substring, Regex };
  Match match = Match::Substring;
  std::string pattern;
  std::string reply;
  int max_uses = -1;

  bool operator==(const ScriptRule&) const = default;
};

json rule_to_json(const ScriptRule& r);
ScriptRule rule_from_json(const json& j);  // throws std::invalid_argument

// Test double for a live model: a rule table that must be exhaustive for
// the prompts a run produces. Unmatched or exhausted prompts raise
// NoRuleError (the prompt head is embedded for debugging).
class ScriptedBackend : public Backend {
 public:
  explicit ScriptedBackend(std::vector<ScriptRule> rules);

  static ScriptedBackend from_json(const json& j);
  static ScriptedBackend load(const std::string& path);
  json to_json() const;

  std::string name() const override { return "scripted"; }
  bool deterministic() const override { return true; }

  // remaining uses for rule i (-1 = unlimited); exposed for tests
  int remaining(size_t i) const;

 protected:
  std::string do_complete(const std::string& prompt) override;

 private:
  mutable std::mutex mu_;
  std::vector<ScriptRule> rules_;
  std::vector<int> used_;
};

}  // namespace ace::llm
