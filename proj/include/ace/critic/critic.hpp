#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ace/actions.hpp"
#include "ace/gui/document.hpp"
#include "ace/llm/backend.hpp"
#include "ace/util.hpp"

namespace ace::critic {

struct CritiqueFormatError : std::runtime_error {
  using runtime_error::runtime_error;
};

// The Critic's verdict on the last action: did it work, and is the current
// subtask finished. Notes are mandatory whenever the matching flag is
// false. first_step marks the synthetic verdict emitted before any action
// has run (no backend call involved).
struct Critique {
  bool success = true;
  std::string success_note;
  bool finished = false;
  std::string finish_note;
  bool first_step = false;

  bool operator==(const Critique&) const = default;

  static Critique initial();
};

// Reply wire grammar, one line:
//   success=<true|false>; finished=<true|false>; <success note>; <finish note>
// "-" stands for an empty note; notes must not contain the "; " separator.
Critique parse_critique(const std::string& reply);  // throws CritiqueFormatError
std::string render_critique(const Critique& c);

json critique_to_json(const Critique& c);
Critique critique_from_json(const json& j);

// One atomic difference between two documents. Panel-level entries have an
// empty element key and field "panel" (add/remove), "bbox" or "unclaimed".
// Element-level entries key the element as "role@(x,y,w,h)" (plus "#n" for
// duplicates) with field "element" (add/remove), "text", "icon" or
// "confidence". Values hold enough to reconstruct: whole serialized panels
// or element lines for add/remove, raw old/new field values for changes.
struct DiffEntry {
  std::string panel;
  std::string element;
  std::string field;
  std::string old_value;
  std::string new_value;

  bool operator==(const DiffEntry&) const = default;
};

struct DocDiff {
  std::vector<DiffEntry> added;
  std::vector<DiffEntry> removed;
  std::vector<DiffEntry> changed;

  bool operator==(const DocDiff&) const = default;
  bool empty() const { return added.empty() && removed.empty() && changed.empty(); }
  size_t size() const { return added.size() + removed.size() + changed.size(); }
};

// Structural diff over canonicalized documents, keyed by panel name and
// element role@bbox. patch(old, diff(old, new)) == new up to canonical
// ordering; diff is empty iff canonicalize(old) == canonicalize(new).
DocDiff diff(const gui::UIDocument& old_doc, const gui::UIDocument& new_doc);
gui::UIDocument patch(const gui::UIDocument& old_doc,
                      const DocDiff& d);  // throws std::invalid_argument

// Prompt-facing rendering: one "+/-/~" line per entry, "(no changes)" when
// empty.
std::string diff_to_string(const DocDiff& d);
json diff_to_json(const DocDiff& d);
DocDiff diff_from_json(const json& j);

// True for actions expected to alter the visible UI (everything except
// pure cursor moves and button/key releases).
bool state_changing(const actions::ActionScript& script);

// Prompts the backend with the serialized diff, subtask and rendered
// action; an empty diff after a state-changing action injects a hint
// biasing toward success=false. One format-reminder reprompt, then
// CritiqueFormatError.
Critique assess(const gui::UIDocument& before, const gui::UIDocument& after,
                const actions::ActionScript& last_action, const std::string& subtask,
                llm::Backend& backend, const PromptSet& prompts);

inline constexpr const char* kAssessTemplate = "critic_assess_v1";
inline constexpr const char* kCriticReminderTemplate = "critic_format_reminder_v1";

}  // namespace ace::critic
