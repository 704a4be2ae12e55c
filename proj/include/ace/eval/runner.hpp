#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "ace/actor/actor.hpp"
#include "ace/eval/env.hpp"
#include "ace/eval/task.hpp"
#include "ace/llm/backend.hpp"
#include "ace/plan/planner.hpp"
#include "ace/util.hpp"

namespace ace::eval {

struct RunConfig {
  uint64_t seed = 0;
  int history_window = actor::kDefaultHistoryWindow;
  int subtask_cap = actor::kDefaultSubtaskCap;
  bool no_planner = false;     // whole transcript fed to the Actor, one leaf
  bool no_critic = false;      // finished decided by a fixed step count
  bool no_transcript = false;  // plan built from the query alone
  int critic_steps_per_subtask = 1;  // used when no_critic
  gui::ParserConfig parser;          // parser.seed is set from seed by the runner

  std::string ablation_name() const;
};

// One structured record per line: a header (the only record carrying a
// timestamp), a plan snapshot, one record per step, and an outcome.
struct EpisodeTrace {
  std::vector<json> records;

  std::string to_jsonl() const;
  static EpisodeTrace from_jsonl(const std::string& text);

  const json* find(const std::string& type) const;  // first record of type
};

// Zeroes the header timestamp; two runs of the same episode compare equal
// after this scrub.
EpisodeTrace scrub_timestamps(EpisodeTrace trace);

struct EpisodeResult {
  bool success = false;
  std::string reason;       // "goal", "cap", "subtask_cap" or "error: ..."
  std::string goal_detail;
  int steps = 0;            // executed action scripts
  EpisodeTrace trace;
};

EpisodeResult run_episode(const TaskSpec& spec, llm::Backend& backend, Env& env,
                          const RunConfig& config, const PromptSet& prompts,
                          const gui::IconTemplateSet& templates);

// Re-executes the trace's recorded action scripts on a fresh environment
// and verifies every recorded post-action state hash.
std::pair<bool, std::string> replay_trace(const TaskSpec& spec, const EpisodeTrace& trace);

struct MetricsReport {
  struct Row {
    int total = 0;
    int passed = 0;
    double rate() const { return total == 0 ? 0.0 : 100.0 * passed / total; }
  };
  std::map<Category, Row> per_category;
  Row overall;

  // Aligned text table: five category columns plus Overall.
  std::string to_table() const;
  json to_json() const;
};

struct SuiteResult {
  MetricsReport report;
  std::vector<EpisodeResult> episodes;  // in pack task order
};

using BackendFactory =
    std::function<std::unique_ptr<llm::Backend>(const TaskSpec& task)>;

// Runs every task with an isolated environment + backend; one task's
// failure never disturbs the others. jobs > 1 runs tasks on a worker pool.
SuiteResult run_suite(const TaskPack& pack, const BackendFactory& make_backend,
                      const RunConfig& config, const PromptSet& prompts, int jobs = 1);

}  // namespace ace::eval
