#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ace/llm/backend.hpp"
#include "ace/util.hpp"

namespace ace::plan {

struct PlanFormatError : std::runtime_error {
  using runtime_error::runtime_error;
};
struct AlreadyDone : std::logic_error {
  AlreadyDone() : logic_error("plan traversal already finished") {}
};

struct Milestone {
  std::string text;                   // p_i
  std::vector<std::string> subtasks;  // s^i_j

  bool operator==(const Milestone&) const = default;
};

// Two-level task tree. Valid trees have >= 1 milestone, every milestone
// >= 1 subtask, and single-line non-empty texts.
struct PlanTree {
  std::vector<Milestone> milestones;

  bool operator==(const PlanTree&) const = default;

  size_t leaf_count() const;
  void validate() const;  // throws std::invalid_argument
};

// Leaf traversal position; done means past the last leaf (indices then
// stay at the last visited leaf).
struct PlanCursor {
  size_t milestone_idx = 0;
  size_t subtask_idx = 0;
  bool done = false;

  bool operator==(const PlanCursor&) const = default;
};

// Strict outline text form:
//   1. First milestone
//     a. first subtask
//     b. second subtask
//   2. ...
// Milestone numbers and subtask letters must run sequentially from 1/a.
// A milestone without subtasks gains one synthetic subtask equal to its
// own text. Code fences are stripped before parsing.
PlanTree parse_outline(const std::string& text);  // throws PlanFormatError
std::string render_outline(const PlanTree& tree);

json tree_to_json(const PlanTree& tree);
PlanTree tree_from_json(const json& j);
json cursor_to_json(const PlanCursor& c);
PlanCursor cursor_from_json(const json& j);

PlanCursor first_leaf(const PlanTree& tree);
PlanCursor next_leaf(const PlanTree& tree, PlanCursor c);      // throws AlreadyDone
std::string parent_text(const PlanTree&, const PlanCursor&);   // milestone of cursor
std::string subtask_text(const PlanTree&, const PlanCursor&);  // leaf at cursor

// Backend-driven builds. Each prompts with a versioned template, parses the
// reply as an outline and, on a malformed reply, reprompts once with a
// format reminder before giving up with PlanFormatError.
PlanTree extract_raw_plan(const std::string& transcript, llm::Backend& backend,
                          const PromptSet& prompts);
PlanTree refine_plan(const PlanTree& raw, const std::string& query, llm::Backend& backend,
                     const PromptSet& prompts);
// Plans from the query alone (the transcript-ablated configuration).
PlanTree plan_from_query(const std::string& query, llm::Backend& backend,
                         const PromptSet& prompts);

// Template ids used by the builders; recorded in traces.
inline constexpr const char* kExtractTemplate = "planner_extract_v1";
inline constexpr const char* kRefineTemplate = "planner_refine_v1";
inline constexpr const char* kQueryOnlyTemplate = "planner_query_only_v1";
inline constexpr const char* kFormatReminderTemplate = "plan_format_reminder_v1";

}  // namespace ace::plan
