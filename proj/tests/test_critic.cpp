#include <algorithm>
#include <random>

#include <doctest.h>

#include "ace/critic/critic.hpp"
#include "ace/llm/scripted.hpp"
#include "ace/sim/desktop.hpp"
#include "generators.hpp"

using namespace ace;
using namespace ace::critic;

namespace {

llm::ScriptRule sub_rule(std::string pattern, std::string reply, int max_uses = -1) {
  llm::ScriptRule r;
  r.match = llm::ScriptRule::Match::Substring;
  r.pattern = std::move(pattern);
  r.reply = std::move(reply);
  r.max_uses = max_uses;
  return r;
}

PromptSet critic_prompts() {
  PromptSet ps;
  ps.add(kAssessTemplate,
         "## CRITIC\nSubtask: {{subtask}}\nLast action:\n{{action}}\n"
         "Screen changes:\n{{diff}}{{hint}}\nReply on one line.");
  ps.add(kCriticReminderTemplate,
         "Reply exactly: success=<true|false>; finished=<true|false>; "
         "<success note>; <finish note> ('-' for an empty note).");
  return ps;
}

// Applies a few random in-place edits so diffs exercise the changed/added/
// removed paths against structurally related documents.
gui::UIDocument mutate_document(gui::UIDocument doc, std::mt19937_64& rng) {
  using testgen::pick_int;
  int edits = pick_int(rng, 1, 4);
  for (int e = 0; e < edits; ++e) {
    int op = pick_int(rng, 0, 6);
    if (doc.panels.empty() || op == 0) {
      gui::Panel p;
      p.name = "Added " + std::to_string(pick_int(rng, 1, 99));
      p.bbox = Rect{pick_int(rng, 0, 100), pick_int(rng, 0, 100), 50, 40};
      p.elements.push_back(testgen::random_element(rng));
      doc.panels.push_back(std::move(p));
      continue;
    }
    gui::Panel& p =
        doc.panels[static_cast<size_t>(pick_int(rng, 0, static_cast<int>(doc.panels.size()) - 1))];
    switch (op) {
      case 1: p.unclaimed = pick_int(rng, 0, 30); break;
      case 2: p.bbox.x = pick_int(rng, 0, 300); break;
      case 3: p.elements.push_back(testgen::random_element(rng)); break;
      case 4:
        if (!p.elements.empty()) p.elements.pop_back();
        break;
      case 5:
        if (!p.elements.empty())
          p.elements[static_cast<size_t>(
                         pick_int(rng, 0, static_cast<int>(p.elements.size()) - 1))]
              .text = testgen::random_text(rng, 6);
        break;
      default:
        doc.panels.erase(doc.panels.begin() + pick_int(rng, 0, static_cast<int>(doc.panels.size()) - 1));
        break;
    }
  }
  return doc;
}

}  // namespace

TEST_CASE("critique: render/parse round-trip and initial verdict") {
  Critique all_true{true, "looks right", true, "subtask complete", false};
  CHECK(parse_critique(render_critique(all_true)) == all_true);

  Critique flagged{false, "click missed the button", false, "field still empty", false};
  CHECK(parse_critique(render_critique(flagged)) == flagged);

  Critique bare{true, "", true, "", false};
  CHECK(render_critique(bare) == "success=true; finished=true; -; -");
  CHECK(parse_critique("success=true; finished=true; -; -") == bare);

  Critique init = Critique::initial();
  CHECK(init.success);
  CHECK_FALSE(init.finished);
  CHECK(init.first_step);
  CHECK_FALSE(init.finish_note.empty());

  CHECK(critique_from_json(critique_to_json(init)) == init);
  CHECK(critique_from_json(critique_to_json(flagged)) == flagged);
}

TEST_CASE("critique: fenced single-line replies are accepted") {
  Critique c = parse_critique("```\nsuccess=true; finished=false; -; still typing\n```");
  CHECK(c.success);
  CHECK_FALSE(c.finished);
  CHECK(c.finish_note == "still typing");
}

TEST_CASE("critique: grammar rejections") {
  CHECK_THROWS_AS(parse_critique(""), CritiqueFormatError);
  CHECK_THROWS_AS(parse_critique("success=true; finished=true; -"), CritiqueFormatError);
  CHECK_THROWS_AS(parse_critique("success=true; finished=true; -; -; extra"),
                  CritiqueFormatError);
  CHECK_THROWS_AS(parse_critique("ok=true; finished=true; -; -"), CritiqueFormatError);
  CHECK_THROWS_AS(parse_critique("success=yes; finished=true; -; -"), CritiqueFormatError);
  CHECK_THROWS_AS(parse_critique("success=true; finished=true; ; -"), CritiqueFormatError);
  CHECK_THROWS_AS(parse_critique("line one\nline two"), CritiqueFormatError);
  // a false flag demands an explanation
  CHECK_THROWS_AS(parse_critique("success=false; finished=true; -; -"), CritiqueFormatError);
  CHECK_THROWS_AS(parse_critique("success=true; finished=false; -; -"), CritiqueFormatError);
}

TEST_CASE("diff: identity is empty and order-insensitive") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 50; ++i) {
    gui::UIDocument doc = testgen::random_document(rng);
    CHECK(diff(doc, doc).empty());

    gui::UIDocument shuffled = doc;
    std::shuffle(shuffled.panels.begin(), shuffled.panels.end(), rng);
    for (auto& p : shuffled.panels)
      std::shuffle(p.elements.begin(), p.elements.end(), rng);
    CHECK(diff(doc, shuffled).empty());
    CHECK(diff(shuffled, doc).empty());
  }
}

TEST_CASE("diff: field-level entries are precise") {
  gui::UIDocument a;
  gui::Panel p;
  p.name = "Win";
  p.bbox = Rect{0, 0, 100, 100};
  gui::Element e;
  e.role = gui::kRoleButton;
  e.text = "OK";
  e.bbox = Rect{10, 10, 30, 12};
  p.elements.push_back(e);
  a.panels.push_back(p);

  gui::UIDocument b = a;
  b.panels[0].elements[0].text = "Done";
  DocDiff d = diff(a, b);
  REQUIRE(d.changed.size() == 1);
  CHECK(d.added.empty());
  CHECK(d.removed.empty());
  CHECK(d.changed[0].panel == "Win");
  CHECK(d.changed[0].element == "button@(10,10,30,12)");
  CHECK(d.changed[0].field == "text");
  CHECK(d.changed[0].old_value == "OK");
  CHECK(d.changed[0].new_value == "Done");

  b = a;
  b.panels[0].elements[0].icon_name = "gear";
  d = diff(a, b);
  REQUIRE(d.changed.size() == 1);
  CHECK(d.changed[0].field == "icon");

  b = a;
  b.panels[0].elements[0].confidence = 0.5;
  d = diff(a, b);
  REQUIRE(d.changed.size() == 1);
  CHECK(d.changed[0].field == "confidence");
  CHECK(d.changed[0].new_value == "0.5");

  // bbox is part of the element key: moving an element reads as remove+add
  b = a;
  b.panels[0].elements[0].bbox.x = 50;
  d = diff(a, b);
  CHECK(d.changed.empty());
  REQUIRE(d.removed.size() == 1);
  REQUIRE(d.added.size() == 1);
  CHECK(d.removed[0].element == "button@(10,10,30,12)");
  CHECK(d.added[0].element == "button@(50,10,30,12)");

  b = a;
  b.panels[0].unclaimed = 9;
  d = diff(a, b);
  REQUIRE(d.changed.size() == 1);
  CHECK(d.changed[0].element.empty());
  CHECK(d.changed[0].field == "unclaimed");

  b = a;
  b.panels[0].bbox = Rect{5, 5, 100, 100};
  d = diff(a, b);
  REQUIRE(d.changed.size() == 1);
  CHECK(d.changed[0].field == "bbox");

  b = a;
  b.panels.clear();
  d = diff(a, b);
  REQUIRE(d.removed.size() == 1);
  CHECK(d.removed[0].field == "panel");
  CHECK(d.removed[0].old_value == gui::serialize(gui::canonicalize(a)));
}

TEST_CASE("1,000 document pairs: patch(old, diff(old, new)) reconstructs new") {
  std::mt19937_64 rng(1234);
  for (int t = 0; t < 1000; ++t) {
    gui::UIDocument old_doc = testgen::random_document(rng);
    // half unrelated pairs, half structural mutations of old
    gui::UIDocument new_doc =
        (t % 2 == 0) ? testgen::random_document(rng) : mutate_document(old_doc, rng);

    DocDiff d = diff(old_doc, new_doc);
    gui::UIDocument rebuilt = patch(old_doc, d);
    CHECK(rebuilt == gui::canonicalize(new_doc));
    CHECK(d.empty() == (gui::canonicalize(old_doc) == gui::canonicalize(new_doc)));

    // and the serialized diff survives json
    CHECK(diff_from_json(diff_to_json(d)) == d);
  }
}

TEST_CASE("patch: unknown targets are rejected") {
  gui::UIDocument doc;
  gui::Panel p;
  p.name = "A";
  p.bbox = Rect{0, 0, 10, 10};
  doc.panels.push_back(p);

  DocDiff bad;
  bad.changed.push_back({"Nope", "", "unclaimed", "0", "1"});
  CHECK_THROWS_AS(patch(doc, bad), std::invalid_argument);

  DocDiff bad_el;
  bad_el.changed.push_back({"A", "button@(1,1,1,1)", "text", "x", "y"});
  CHECK_THROWS_AS(patch(doc, bad_el), std::invalid_argument);

  DocDiff bad_field;
  bad_field.changed.push_back({"A", "", "name", "A", "B"});
  CHECK_THROWS_AS(patch(doc, bad_field), std::invalid_argument);
}

TEST_CASE("diff_to_string: prompt-facing shape") {
  gui::UIDocument a, b;
  CHECK(diff_to_string(diff(a, b)) == "(no changes)");

  gui::Panel p;
  p.name = "Win";
  p.bbox = Rect{0, 0, 100, 100};
  gui::Element e;
  e.role = gui::kRoleText;
  e.text = "hello";
  e.bbox = Rect{4, 4, 40, 8};
  p.elements.push_back(e);
  a.panels.push_back(p);
  b = a;
  b.panels[0].elements[0].text = "bye";
  b.panels[0].elements.push_back([] {
    gui::Element x;
    x.role = gui::kRoleButton;
    x.text = "Go";
    x.bbox = Rect{4, 20, 20, 10};
    return x;
  }());

  std::string s = diff_to_string(diff(a, b));
  CHECK(s.find("~ [Win] text@(4,4,40,8) text: 'hello' -> 'bye'") != std::string::npos);
  CHECK(s.find("+ [Win] ") != std::string::npos);
  for (const auto& line : split_lines(s))
    CHECK((line[0] == '+' || line[0] == '-' || line[0] == '~'));
}

TEST_CASE("state_changing: passive actions are moves and releases") {
  using namespace actions;
  auto script = [](Action a) {
    ActionScript s;
    s.actions.push_back(std::move(a));
    return s;
  };
  CHECK_FALSE(state_changing(ActionScript{}));
  CHECK_FALSE(state_changing(script(MoveTo{10, 10})));
  CHECK_FALSE(state_changing(script(MouseUp{})));
  CHECK_FALSE(state_changing(script(KeyUp{"shift"})));
  CHECK(state_changing(script(Click{10, 10})));
  CHECK(state_changing(script(Write{"hi"})));
  CHECK(state_changing(script(Scroll{-100})));
  CHECK(state_changing(script(MouseDown{})));
  ActionScript mixed;
  mixed.actions.push_back(MoveTo{1, 1});
  mixed.actions.push_back(Click{1, 1});
  CHECK(state_changing(mixed));
}

TEST_CASE("assess: prompts with diff, subtask and action; parses the verdict") {
  PromptSet ps = critic_prompts();
  llm::ScriptedBackend backend(
      {sub_rule("## CRITIC", "success=true; finished=true; typed the title; field filled")});

  gui::UIDocument before, after;
  gui::Panel p;
  p.name = "Editor";
  p.bbox = Rect{0, 0, 200, 100};
  gui::Element e;
  e.role = gui::kRoleText;
  e.text = "draft";
  e.bbox = Rect{8, 8, 40, 8};
  p.elements.push_back(e);
  before.panels.push_back(p);
  after = before;
  after.panels[0].elements[0].text = "Quarterly Report";

  actions::ActionScript act = actions::parse("write('Quarterly Report')");
  Critique c = assess(before, after, act, "type the title", backend, ps);
  CHECK(c.success);
  CHECK(c.finished);
  CHECK(c.success_note == "typed the title");

  std::string prompt = backend.log()[0].prompt;
  CHECK(prompt.find("type the title") != std::string::npos);
  CHECK(prompt.find("write('Quarterly Report')") != std::string::npos);
  CHECK(prompt.find("'draft' -> 'Quarterly Report'") != std::string::npos);
  CHECK(prompt.find("## HINT") == std::string::npos);
}

TEST_CASE("assess: unchanged screen after a state-changing action injects the hint") {
  PromptSet ps = critic_prompts();
  llm::ScriptedBackend backend(
      {sub_rule("## HINT", "success=false; finished=false; nothing changed; still pending"),
       sub_rule("## CRITIC", "success=true; finished=false; -; cursor moved only")});

  gui::UIDocument doc;
  gui::Panel p;
  p.name = "Win";
  p.bbox = Rect{0, 0, 100, 100};
  doc.panels.push_back(p);

  Critique c = assess(doc, doc, actions::parse("click(10, 10)"), "press the button",
                      backend, ps);
  CHECK_FALSE(c.success);
  CHECK(backend.log()[0].prompt.find("## HINT") != std::string::npos);
  CHECK(backend.log()[0].prompt.find("(no changes)") != std::string::npos);

  // a passive action on an unchanged screen carries no hint
  Critique c2 = assess(doc, doc, actions::parse("moveTo(5, 5)"), "inspect", backend, ps);
  CHECK(c2.success);
  CHECK(backend.log()[1].prompt.find("## HINT") == std::string::npos);
}

TEST_CASE("assess: one format reminder, then CritiqueFormatError") {
  PromptSet ps = critic_prompts();
  gui::UIDocument doc;

  llm::ScriptedBackend recovers(
      {sub_rule("## FORMAT REMINDER", "success=true; finished=true; -; -"),
       sub_rule("## CRITIC", "Sounds good, the subtask went great!")});
  Critique c = assess(doc, doc, {}, "s", recovers, ps);
  CHECK(c.success);
  REQUIRE(recovers.call_count() == 2);
  CHECK(recovers.log()[1].prompt.find(ps.body(kCriticReminderTemplate)) !=
        std::string::npos);

  llm::ScriptedBackend hopeless({sub_rule("", "still not the format")});
  CHECK_THROWS_AS(assess(doc, doc, {}, "s", hopeless, ps), CritiqueFormatError);
  CHECK(hopeless.call_count() == 2);
}

TEST_CASE("end-to-end: toggling a checkbox diffs as a single icon change") {
  sim::EnvState state = testgen::demo_state();
  gui::IconTemplateSet templates = testgen::demo_templates();

  gui::UIDocument before = gui::parse_gui(sim::observe(state), templates);
  auto [after_state, report] = sim::execute(state, actions::parse("click(20, 44)"));
  gui::UIDocument after = gui::parse_gui(sim::observe(after_state), templates);

  DocDiff d = diff(before, after);
  REQUIRE(d.changed.size() == 1);
  CHECK(d.added.empty());
  CHECK(d.removed.empty());
  CHECK(d.changed[0].panel == "Main");
  CHECK(d.changed[0].field == "icon");
  CHECK(d.changed[0].old_value == "cb_on");
  CHECK(d.changed[0].new_value == "cb_off");
  CHECK(patch(before, d) == gui::canonicalize(after));
}
