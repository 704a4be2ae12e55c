#include "ace/plan/planner.hpp"

#include <cctype>

namespace ace::plan {

namespace {

void check_text(const std::string& text, const char* what) {
  if (trim(text).empty())
    throw std::invalid_argument(std::string(what) + " text is empty");
  if (text.find('\n') != std::string::npos)
    throw std::invalid_argument(std::string(what) + " text spans multiple lines");
}

}  // namespace

size_t PlanTree::leaf_count() const {
  size_t n = 0;
  for (const auto& m : milestones) n += m.subtasks.size();
  return n;
}

void PlanTree::validate() const {
  if (milestones.empty()) throw std::invalid_argument("plan has no milestones");
  for (const auto& m : milestones) {
    check_text(m.text, "milestone");
    if (m.subtasks.empty())
      throw std::invalid_argument("milestone '" + m.text + "' has no subtasks");
    if (m.subtasks.size() > 26)
      throw std::invalid_argument("milestone '" + m.text + "' exceeds 26 subtasks");
    for (const auto& s : m.subtasks) check_text(s, "subtask");
  }
}

PlanTree parse_outline(const std::string& text) {
  PlanTree tree;
  for (const std::string& raw : split_lines(strip_code_fences(text))) {
    std::string line = trim(raw);
    if (line.empty()) continue;
    bool indented = raw[0] == ' ' || raw[0] == '\t';

    if (!indented && std::isdigit(static_cast<unsigned char>(line[0]))) {
      size_t i = 0;
      while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
      if (line.compare(i, 2, ". ") != 0)
        throw PlanFormatError("bad milestone line: " + line);
      size_t number = std::stoul(line.substr(0, i));
      if (number != tree.milestones.size() + 1)
        throw PlanFormatError("milestone numbered " + std::to_string(number) +
                              ", expected " + std::to_string(tree.milestones.size() + 1));
      std::string body = trim(line.substr(i + 2));
      if (body.empty()) throw PlanFormatError("empty milestone text: " + line);
      tree.milestones.push_back(Milestone{body, {}});
      continue;
    }

    if (indented && line.size() >= 3 && line[0] >= 'a' && line[0] <= 'z' &&
        line.compare(1, 2, ". ") == 0) {
      if (tree.milestones.empty())
        throw PlanFormatError("subtask before any milestone: " + line);
      auto& subtasks = tree.milestones.back().subtasks;
      char expected = static_cast<char>('a' + subtasks.size());
      if (line[0] != expected)
        throw PlanFormatError(std::string("subtask lettered '") + line[0] +
                              "', expected '" + expected + "'");
      std::string body = trim(line.substr(3));
      if (body.empty()) throw PlanFormatError("empty subtask text: " + line);
      subtasks.push_back(body);
      continue;
    }

    throw PlanFormatError("unrecognized outline line: " + line);
  }
  if (tree.milestones.empty()) throw PlanFormatError("no milestones in reply");
  for (auto& m : tree.milestones)
    if (m.subtasks.empty()) m.subtasks.push_back(m.text);  // synthetic leaf
  return tree;
}

std::string render_outline(const PlanTree& tree) {
  tree.validate();
  std::string out;
  for (size_t i = 0; i < tree.milestones.size(); ++i) {
    if (i) out += '\n';
    out += std::to_string(i + 1) + ". " + tree.milestones[i].text;
    for (size_t j = 0; j < tree.milestones[i].subtasks.size(); ++j)
      out += "\n  " + std::string(1, static_cast<char>('a' + j)) + ". " +
             tree.milestones[i].subtasks[j];
  }
  return out;
}

json tree_to_json(const PlanTree& tree) {
  json arr = json::array();
  for (const auto& m : tree.milestones)
    arr.push_back(json{{"text", m.text}, {"subtasks", m.subtasks}});
  return json{{"milestones", arr}};
}

PlanTree tree_from_json(const json& j) {
  PlanTree tree;
  for (const auto& jm : j.at("milestones")) {
    Milestone m;
    m.text = jm.at("text").get<std::string>();
    m.subtasks = jm.at("subtasks").get<std::vector<std::string>>();
    tree.milestones.push_back(std::move(m));
  }
  tree.validate();
  return tree;
}

json cursor_to_json(const PlanCursor& c) {
  return json{{"milestone", c.milestone_idx}, {"subtask", c.subtask_idx}, {"done", c.done}};
}

PlanCursor cursor_from_json(const json& j) {
  PlanCursor c;
  c.milestone_idx = j.at("milestone").get<size_t>();
  c.subtask_idx = j.at("subtask").get<size_t>();
  c.done = j.at("done").get<bool>();
  return c;
}

PlanCursor first_leaf(const PlanTree& tree) {
  tree.validate();
  return PlanCursor{};
}

PlanCursor next_leaf(const PlanTree& tree, PlanCursor c) {
  if (c.done) throw AlreadyDone();
  if (c.subtask_idx + 1 < tree.milestones[c.milestone_idx].subtasks.size()) {
    ++c.subtask_idx;
  } else if (c.milestone_idx + 1 < tree.milestones.size()) {
    ++c.milestone_idx;
    c.subtask_idx = 0;
  } else {
    c.done = true;  // indices stay at the last visited leaf
  }
  return c;
}

std::string parent_text(const PlanTree& tree, const PlanCursor& c) {
  if (c.done) throw AlreadyDone();
  return tree.milestones[c.milestone_idx].text;
}

std::string subtask_text(const PlanTree& tree, const PlanCursor& c) {
  if (c.done) throw AlreadyDone();
  return tree.milestones[c.milestone_idx].subtasks[c.subtask_idx];
}

namespace {

PlanTree plan_via(llm::Backend& backend, const PromptSet& prompts, std::string prompt) {
  try {
    return parse_outline(backend.complete(prompt));
  } catch (const PlanFormatError&) {
    prompt += "\n\n## FORMAT REMINDER\n" + prompts.body(kFormatReminderTemplate);
    try {
      return parse_outline(backend.complete(prompt));
    } catch (const PlanFormatError& e) {
      throw PlanFormatError(std::string("reply malformed after format reminder: ") +
                            e.what());
    }
  }
}

}  // namespace

PlanTree extract_raw_plan(const std::string& transcript, llm::Backend& backend,
                          const PromptSet& prompts) {
  if (trim(transcript).empty()) throw std::invalid_argument("transcript is empty");
  return plan_via(backend, prompts,
                  prompts.render(kExtractTemplate, {{"transcript", transcript}}));
}

PlanTree refine_plan(const PlanTree& raw, const std::string& query, llm::Backend& backend,
                     const PromptSet& prompts) {
  raw.validate();
  return plan_via(backend, prompts,
                  prompts.render(kRefineTemplate,
                                 {{"plan", render_outline(raw)}, {"query", query}}));
}

PlanTree plan_from_query(const std::string& query, llm::Backend& backend,
                         const PromptSet& prompts) {
  if (trim(query).empty()) throw std::invalid_argument("query is empty");
  return plan_via(backend, prompts, prompts.render(kQueryOnlyTemplate, {{"query", query}}));
}

}  // namespace ace::plan
