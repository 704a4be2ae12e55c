#include "ace/actor/actor.hpp"

namespace ace::actor {

namespace {

// Single-line action rendering for history lines.
std::string render_inline(const actions::ActionScript& script) {
  if (script.actions.empty()) return "(none)";
  std::string out;
  for (const auto& a : script.actions) {
    if (!out.empty()) out += "; ";
    out += actions::render(a);
  }
  return out;
}

std::string render_history(const std::vector<HistoryItem>& history) {
  if (history.empty()) return "(none)";
  std::string out;
  for (const auto& h : history) {
    if (!out.empty()) out += '\n';
    out += "- subtask: " + h.subtask + " | action: " + render_inline(h.action) +
           " | critique: " + critic::render_critique(h.critique);
  }
  return out;
}

}  // namespace

void trim_history(std::vector<HistoryItem>& history, size_t window) {
  if (history.size() > window)
    history.erase(history.begin(), history.end() - static_cast<ptrdiff_t>(window));
}

plan::PlanCursor advance_subtask(const plan::PlanCursor& cursor,
                                 const critic::Critique& critique,
                                 const plan::PlanTree& tree) {
  if (cursor.done) throw plan::AlreadyDone();
  if (!critique.finished) return cursor;
  return plan::next_leaf(tree, cursor);
}

actions::ActionScript next_action(const AgentStep& step, llm::Backend& backend,
                                  const PromptSet& prompts) {
  std::string prompt = prompts.render(
      kNextActionTemplate,
      {{"doc", gui::serialize(step.obs_doc)},
       {"subtask", step.subtask},
       {"milestone", step.milestone},
       {"critique", critic::render_critique(step.critique)},
       {"prev_action",
        step.prev_action.actions.empty() ? "(none)" : actions::render(step.prev_action)},
       {"history", render_history(step.history)},
       {"width", std::to_string(step.screen_w)},
       {"height", std::to_string(step.screen_h)}});

  actions::ActionScript script;
  try {
    script = actions::parse(backend.complete(prompt));
  } catch (const actions::ParseError& first) {
    prompt += "\n\n## REPAIR\n" +
              prompts.render(kRepairTemplate, {{"error", first.what()}});
    try {
      script = actions::parse(backend.complete(prompt));
    } catch (const actions::ParseError& second) {
      throw ActionFormatError(std::string("reply unparsable after repair attempt: ") +
                              second.what());
    }
  }

  // unbalanced holds are allowed to span scripts; only reject hard errors
  std::string msg;
  for (const auto& v : actions::validate(script, step.screen_w, step.screen_h)) {
    if (v.kind == actions::Violation::Kind::OutOfBounds)
      msg += "\n  action " + std::to_string(v.action_index) + " targets a point outside the " +
             std::to_string(step.screen_w) + "x" + std::to_string(step.screen_h) + " screen";
    else if (v.kind == actions::Violation::Kind::UnknownKey)
      msg += "\n  action " + std::to_string(v.action_index) + " uses unknown key '" + v.key + "'";
  }
  if (!msg.empty()) throw BoundsError("script failed validation:" + msg);
  return script;
}

}  // namespace ace::actor
