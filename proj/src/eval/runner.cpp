#include "ace/eval/runner.hpp"

#include <atomic>
#include <ctime>
#include <thread>

#include "ace/critic/critic.hpp"

namespace ace::eval {

namespace {

std::string now_iso() {
  std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

std::string single_line(const std::string& s) {
  std::string out = s;
  size_t pos;
  while ((pos = out.find('\n')) != std::string::npos) out.replace(pos, 1, " / ");
  return trim(out);
}

plan::PlanTree build_plan(const TaskSpec& spec, llm::Backend& backend,
                          const PromptSet& prompts, const RunConfig& config) {
  if (config.no_planner) {
    // one leaf carrying the whole transcript; the Actor gets no structure
    plan::PlanTree tree;
    plan::Milestone m;
    m.text = single_line(spec.query);
    m.subtasks.push_back(single_line(spec.query) +
                         " -- full instructions: " + single_line(spec.transcript));
    tree.milestones.push_back(std::move(m));
    tree.validate();
    return tree;
  }
  if (config.no_transcript) return plan::plan_from_query(spec.query, backend, prompts);
  return plan::refine_plan(plan::extract_raw_plan(spec.transcript, backend, prompts),
                           spec.query, backend, prompts);
}

// Backend calls made since `from`, as trace json.
json calls_since(llm::Backend& backend, size_t from) {
  json arr = json::array();
  auto log = backend.log();
  for (size_t i = from; i < log.size(); ++i) {
    json c;
    c["index"] = log[i].index;
    c["prompt"] = log[i].prompt;
    c["reply"] = log[i].reply;
    c["ok"] = log[i].ok;
    if (!log[i].ok) c["error"] = log[i].error;
    arr.push_back(std::move(c));
  }
  return arr;
}

}  // namespace

std::string RunConfig::ablation_name() const {
  if (no_planner) return "no_planner";
  if (no_critic) return "no_critic";
  if (no_transcript) return "no_transcript";
  return "none";
}

std::string EpisodeTrace::to_jsonl() const {
  std::string out;
  for (const auto& r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

EpisodeTrace EpisodeTrace::from_jsonl(const std::string& text) {
  EpisodeTrace trace;
  for (const auto& line : split_lines(text)) {
    if (trim(line).empty()) continue;
    trace.records.push_back(json::parse(line));
  }
  return trace;
}

const json* EpisodeTrace::find(const std::string& type) const {
  for (const auto& r : records)
    if (r.value("type", "") == type) return &r;
  return nullptr;
}

EpisodeTrace scrub_timestamps(EpisodeTrace trace) {
  for (auto& r : trace.records)
    if (r.contains("timestamp")) r["timestamp"] = "0";
  return trace;
}

EpisodeResult run_episode(const TaskSpec& spec, llm::Backend& backend, Env& env,
                          const RunConfig& config, const PromptSet& prompts,
                          const gui::IconTemplateSet& templates) {
  EpisodeResult result;
  gui::ParserConfig parser_cfg = config.parser;
  parser_cfg.seed = config.seed;

  result.trace.records.push_back(
      json{{"type", "header"},
           {"task", spec.id},
           {"seed", config.seed},
           {"backend", backend.name()},
           {"ablation", config.ablation_name()},
           {"templates",
            json::array({plan::kExtractTemplate, plan::kRefineTemplate,
                         plan::kQueryOnlyTemplate, plan::kFormatReminderTemplate,
                         critic::kAssessTemplate, critic::kCriticReminderTemplate,
                         actor::kNextActionTemplate, actor::kRepairTemplate})},
           {"timestamp", now_iso()}});

  size_t calls_seen = backend.log().size();
  std::string fail_reason;
  try {
    plan::PlanTree tree = build_plan(spec, backend, prompts, config);
    {
      json plan_rec{{"type", "plan"},
                    {"outline", plan::render_outline(tree)},
                    {"leaves", tree.leaf_count()},
                    {"calls", calls_since(backend, calls_seen)}};
      calls_seen = backend.log().size();
      result.trace.records.push_back(std::move(plan_rec));
    }

    plan::PlanCursor cursor = plan::first_leaf(tree);
    gui::UIDocument prev_doc;
    actions::ActionScript prev_action;
    std::vector<actor::HistoryItem> history;
    int steps_on_subtask = 0;

    while (true) {
      sim::Observation obs = env.observe();
      gui::UIDocument doc = gui::parse_gui(obs, templates, parser_cfg);

      critic::Critique critique;
      if (result.steps == 0) {
        critique = critic::Critique::initial();
      } else if (config.no_critic) {
        critique.success = true;
        critique.success_note = "critic disabled";
        critique.finished = steps_on_subtask >= config.critic_steps_per_subtask;
        critique.finish_note = critique.finished ? "fixed step count reached"
                                                 : "fixed step count not reached";
      } else {
        critique = critic::assess(prev_doc, doc, prev_action,
                                  plan::subtask_text(tree, cursor), backend, prompts);
      }

      plan::PlanCursor next = actor::advance_subtask(cursor, critique, tree);
      if (next != cursor) steps_on_subtask = 0;
      cursor = next;

      json step_rec{{"type", "step"},
                    {"index", result.steps},
                    {"cursor", plan::cursor_to_json(cursor)},
                    {"critique", critic::critique_to_json(critique)},
                    {"state_hash", env.state_hash()},
                    {"raster_hash", sim::raster_hash(obs.raster)}};

      if (cursor.done) {
        step_rec["calls"] = calls_since(backend, calls_seen);
        calls_seen = backend.log().size();
        result.trace.records.push_back(std::move(step_rec));
        break;  // plan finished; the goal check decides success
      }
      if (result.steps >= spec.step_cap) {
        fail_reason = "cap";
        break;
      }
      if (steps_on_subtask >= config.subtask_cap) {
        fail_reason = "subtask_cap";
        break;
      }

      actor::AgentStep step;
      step.prev_action = prev_action;
      step.obs_doc = doc;
      step.subtask = plan::subtask_text(tree, cursor);
      step.milestone = plan::parent_text(tree, cursor);
      step.critique = critique;
      step.history = history;
      step.screen_w = spec.initial_state.screen_w;
      step.screen_h = spec.initial_state.screen_h;

      actions::ActionScript action = actor::next_action(step, backend, prompts);
      sim::ExecReport report = env.execute(action);

      step_rec["subtask"] = step.subtask;
      step_rec["milestone"] = step.milestone;
      step_rec["action"] = actions::render(action);
      step_rec["exec"] = sim::report_to_json(report);
      step_rec["state_hash_after"] = env.state_hash();
      step_rec["calls"] = calls_since(backend, calls_seen);
      calls_seen = backend.log().size();
      result.trace.records.push_back(std::move(step_rec));

      history.push_back({step.subtask, action, critique});
      actor::trim_history(history, static_cast<size_t>(config.history_window));
      prev_doc = std::move(doc);
      prev_action = std::move(action);
      ++result.steps;
      ++steps_on_subtask;
    }
  } catch (const std::exception& e) {
    fail_reason = std::string("error: ") + e.what();
    json err_rec{{"type", "error"},
                 {"detail", e.what()},
                 {"calls", calls_since(backend, calls_seen)}};
    result.trace.records.push_back(std::move(err_rec));
  }

  auto [goal_ok, detail] = check_goal(env.final_state(), spec);
  result.goal_detail = detail;
  if (fail_reason.empty()) {
    result.success = goal_ok;
    result.reason = "goal";
  } else {
    result.success = false;  // caps and errors always fail the episode
    result.reason = fail_reason;
  }
  result.trace.records.push_back(json{{"type", "outcome"},
                                      {"success", result.success},
                                      {"reason", result.reason},
                                      {"goal_detail", result.goal_detail},
                                      {"steps", result.steps}});
  return result;
}

std::pair<bool, std::string> replay_trace(const TaskSpec& spec, const EpisodeTrace& trace) {
  LocalEnv env(spec.initial_state);
  int replayed = 0;
  for (const auto& r : trace.records) {
    if (r.value("type", "") != "step" || !r.contains("action")) continue;
    actions::ActionScript script = actions::parse(r.at("action").get<std::string>());
    env.execute(script);
    ++replayed;
    std::string expect = r.at("state_hash_after").get<std::string>();
    if (env.state_hash() != expect)
      return {false, "state hash mismatch after step " +
                         std::to_string(r.at("index").get<int>())};
  }
  return {true, "replayed " + std::to_string(replayed) + " actions"};
}

std::string MetricsReport::to_table() const {
  std::vector<std::pair<std::string, Row>> cols;
  for (Category c : all_categories()) {
    Row r;
    auto it = per_category.find(c);
    if (it != per_category.end()) r = it->second;
    cols.push_back({category_display(c), r});
  }
  cols.push_back({"Overall", overall});

  auto pct = [](const Row& r) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.1f", r.rate());
    return std::string(buf);
  };
  auto frac = [](const Row& r) {
    return std::to_string(r.passed) + "/" + std::to_string(r.total);
  };

  std::string line1 = "Category ", line2 = "Success %", line3 = "Tasks    ";
  for (const auto& [name, row] : cols) {
    size_t w = std::max({name.size(), pct(row).size(), frac(row).size()}) + 2;
    auto pad = [&](std::string s) { return std::string(w - s.size(), ' ') + s; };
    line1 += pad(name);
    line2 += pad(pct(row));
    line3 += pad(frac(row));
  }
  return line1 + "\n" + line2 + "\n" + line3 + "\n";
}

json MetricsReport::to_json() const {
  json cats;
  for (const auto& [c, row] : per_category)
    cats[category_to_string(c)] =
        json{{"total", row.total}, {"passed", row.passed}, {"rate", row.rate()}};
  return json{{"categories", cats},
              {"overall", json{{"total", overall.total},
                               {"passed", overall.passed},
                               {"rate", overall.rate()}}}};
}

SuiteResult run_suite(const TaskPack& pack, const BackendFactory& make_backend,
                      const RunConfig& config, const PromptSet& prompts, int jobs) {
  SuiteResult suite;
  size_t n = pack.tasks.size();
  suite.episodes.resize(n);

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      size_t i = next.fetch_add(1);
      if (i >= n) break;
      const TaskSpec& task = pack.tasks[i];
      try {
        auto backend = make_backend(task);
        LocalEnv env(task.initial_state);
        suite.episodes[i] =
            run_episode(task, *backend, env, config, prompts, pack.templates);
      } catch (const std::exception& e) {
        suite.episodes[i].success = false;
        suite.episodes[i].reason = std::string("error: ") + e.what();
      }
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (size_t i = 0; i < n; ++i) {
    auto& row = suite.report.per_category[pack.tasks[i].category];
    ++row.total;
    ++suite.report.overall.total;
    if (suite.episodes[i].success) {
      ++row.passed;
      ++suite.report.overall.passed;
    }
  }
  return suite;
}

}  // namespace ace::eval
