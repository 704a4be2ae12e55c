#pragma once

// Shared episode fixtures: a minimal prompt set carrying the rule-matching
// markers, and a one-click Wi-Fi task with the scripted replies to solve it.
// Used by the eval tests and again by the bridge transparency tests, which
// must drive the identical episode over TCP.

#include "ace/actor/actor.hpp"
#include "ace/critic/critic.hpp"
#include "ace/eval/task.hpp"
#include "ace/llm/scripted.hpp"
#include "ace/plan/planner.hpp"
#include "generators.hpp"

namespace ace::testgen {

inline llm::ScriptRule sub_rule(std::string pattern, std::string reply, int max_uses = -1) {
  llm::ScriptRule r;
  r.match = llm::ScriptRule::Match::Substring;
  r.pattern = std::move(pattern);
  r.reply = std::move(reply);
  r.max_uses = max_uses;
  return r;
}

inline PromptSet full_prompts() {
  PromptSet ps;
  ps.add(plan::kExtractTemplate, "## PLAN FROM TRANSCRIPT\n{{transcript}}");
  ps.add(plan::kRefineTemplate, "## REFINE PLAN\n{{plan}}\n\nInstruction: {{query}}");
  ps.add(plan::kQueryOnlyTemplate, "## QUERY-ONLY PLAN\n{{query}}");
  ps.add(plan::kFormatReminderTemplate, "Numbered outline only.");
  ps.add(critic::kAssessTemplate,
         "## CRITIC\nSubtask: {{subtask}}\nAction:\n{{action}}\nChanges:\n{{diff}}{{hint}}");
  ps.add(critic::kCriticReminderTemplate,
         "success=<bool>; finished=<bool>; <note>; <note>");
  ps.add(actor::kNextActionTemplate,
         "Screen {{width}}x{{height}}:\n{{doc}}\nMilestone: {{milestone}}\n"
         "Subtask: {{subtask}}\nPrev: {{prev_action}}\nCritique: {{critique}}\n"
         "History:\n{{history}}\n## NEXT ACTION");
  ps.add(actor::kRepairTemplate, "Parse error: {{error}}. Plain action lines only.");
  return ps;
}

inline eval::TaskSpec wifi_task() {
  eval::TaskSpec t;
  t.id = "sysset/wifi_off";
  t.category = eval::Category::SysSet;
  t.query = "Turn off Wi-Fi";
  t.transcript =
      "Open the Main window.\nFind the Wi-Fi checkbox.\nClick it to turn Wi-Fi off.";
  t.initial_state = demo_state();
  t.goal.kind = eval::GoalChecker::Kind::Predicate;
  t.goal.assertions.push_back(
      {eval::GoalAssert::Kind::SettingEquals, "wifi", Scalar{false}});
  return t;
}

inline std::vector<llm::ScriptRule> wifi_rules() {
  const std::string outline = "1. Turn off Wi-Fi\n  a. click the Wi-Fi checkbox";
  return {sub_rule("## PLAN FROM TRANSCRIPT", outline),
          sub_rule("## REFINE PLAN", outline),
          sub_rule("## CRITIC",
                   "success=true; finished=true; checkbox is off now; subtask complete"),
          sub_rule("## NEXT ACTION", "click(20, 44)")};
}

}  // namespace ace::testgen
