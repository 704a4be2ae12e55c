#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "ace/actions.hpp"
#include "ace/critic/critic.hpp"
#include "ace/gui/document.hpp"
#include "ace/llm/backend.hpp"
#include "ace/plan/planner.hpp"
#include "ace/util.hpp"

namespace ace::actor {

struct ActionFormatError : std::runtime_error {
  using runtime_error::runtime_error;
};
// Raised when a parsed script fails validation: out-of-bounds points or
// unknown keys (unbalanced holds may legitimately span scripts and pass).
struct BoundsError : std::runtime_error {
  using runtime_error::runtime_error;
};

struct HistoryItem {
  std::string subtask;
  actions::ActionScript action;
  critic::Critique critique;

  bool operator==(const HistoryItem&) const = default;
};

// Everything the next-action prompt conditions on, one agent step.
struct AgentStep {
  actions::ActionScript prev_action;   // a_{t-1}; empty on the first step
  gui::UIDocument obs_doc;             // o_t
  std::string subtask;                 // s_t
  std::string milestone;               // p_t
  critic::Critique critique;           // c_t
  std::vector<HistoryItem> history;    // most recent last, <= window
  int screen_w = 800;
  int screen_h = 480;
};

inline constexpr int kDefaultHistoryWindow = 8;
inline constexpr int kDefaultSubtaskCap = 6;
inline constexpr int kDefaultEpisodeCap = 60;

// Keeps the most recent `window` items.
void trim_history(std::vector<HistoryItem>& history, size_t window);

// Stay on the current subtask while the critique says unfinished; advance
// to the next leaf otherwise.
plan::PlanCursor advance_subtask(const plan::PlanCursor& cursor,
                                 const critic::Critique& critique,
                                 const plan::PlanTree& tree);

// One backend call, plus at most one repair reprompt embedding the parse
// error. The returned script always parses and validates against the
// screen bounds.
actions::ActionScript next_action(const AgentStep& step, llm::Backend& backend,
                                  const PromptSet& prompts);

inline constexpr const char* kNextActionTemplate = "actor_next_v1";
inline constexpr const char* kRepairTemplate = "actor_repair_v1";

}  // namespace ace::actor
