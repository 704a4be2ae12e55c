#include <filesystem>
#include <random>

#include <doctest.h>

#include "ace/eval/runner.hpp"
#include "ace/llm/scripted.hpp"
#include "fixtures.hpp"

using namespace ace;
using namespace ace::eval;
using testgen::full_prompts;
using testgen::sub_rule;
using testgen::wifi_rules;
using testgen::wifi_task;

namespace {

sim::SymbolicRaster random_raster(std::mt19937_64& rng, int w, int h) {
  sim::SymbolicRaster r;
  r.width = w;
  r.height = h;
  r.cells.resize(static_cast<size_t>(w) * h);
  static const char* values[] = {"a", "b", "c"};
  for (auto& c : r.cells) c.value = values[testgen::pick_int(rng, 0, 2)];
  return r;
}

}  // namespace

TEST_CASE("similarity: brute-force oracle, symmetry, regions") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 60; ++t) {
    int w = testgen::pick_int(rng, 1, 20), h = testgen::pick_int(rng, 1, 15);
    sim::SymbolicRaster a = random_raster(rng, w, h);
    sim::SymbolicRaster b = random_raster(rng, w, h);

    int equal = 0;
    for (int i = 0; i < w * h; ++i) equal += a.cells[static_cast<size_t>(i)] ==
                                             b.cells[static_cast<size_t>(i)];
    CHECK(similarity(a, b) == doctest::Approx(double(equal) / (w * h)));
    CHECK(similarity(a, b) == similarity(b, a));
    CHECK(similarity(a, a) == 1.0);

    Rect region{testgen::pick_int(rng, -2, w), testgen::pick_int(rng, -2, h),
                testgen::pick_int(rng, 1, w + 4), testgen::pick_int(rng, 1, h + 4)};
    int req = 0, rtot = 0;
    for (int y = std::max(0, region.y); y < std::min(h, region.y + region.h); ++y)
      for (int x = std::max(0, region.x); x < std::min(w, region.x + region.w); ++x) {
        ++rtot;
        req += a.at(x, y) == b.at(x, y);
      }
    double expect = rtot == 0 ? 1.0 : double(req) / rtot;
    CHECK(similarity(a, b, region) == doctest::Approx(expect));
  }

  sim::SymbolicRaster a = random_raster(rng, 4, 4), b = random_raster(rng, 5, 4);
  CHECK_THROWS_AS(similarity(a, b), std::invalid_argument);
  CHECK(similarity(a, a, Rect{10, 10, 3, 3}) == 1.0);  // empty clamped region
}

TEST_CASE("check_goal: predicate assertions over settings and files") {
  TaskSpec t = wifi_task();
  sim::EnvState s = testgen::demo_state();

  auto [ok0, d0] = check_goal(s, t);  // wifi still on
  CHECK_FALSE(ok0);
  CHECK(d0.find("wifi") != std::string::npos);
  CHECK(d0.find("expected") != std::string::npos);

  auto [off, rep] = sim::execute(s, actions::parse("click(20, 44)"));
  auto [ok1, d1] = check_goal(off, t);
  CHECK(ok1);
  CHECK(d1.find("assertions hold") != std::string::npos);

  TaskSpec files = wifi_task();
  files.goal.assertions = {{GoalAssert::Kind::FileExists, "/docs/a.txt", Scalar{}},
                           {GoalAssert::Kind::FileMissing, "/docs/zzz.txt", Scalar{}}};
  CHECK(check_goal(s, files).first);

  files.goal.assertions = {{GoalAssert::Kind::FileExists, "/docs/zzz.txt", Scalar{}}};
  auto [ok2, d2] = check_goal(s, files);
  CHECK_FALSE(ok2);
  CHECK(d2.find("/docs/zzz.txt") != std::string::npos);

  files.goal.assertions = {{GoalAssert::Kind::FileMissing, "/docs/a.txt", Scalar{}}};
  CHECK_FALSE(check_goal(s, files).first);

  files.goal.assertions = {
      {GoalAssert::Kind::SettingEquals, "volume", Scalar{int64_t{40}}}};
  CHECK(check_goal(s, files).first);
}

TEST_CASE("check_goal: pixel similarity against a golden raster") {
  sim::EnvState s = testgen::demo_state();
  sim::SymbolicRaster golden = sim::render(s);

  TaskSpec t;
  t.id = "design/pix";
  t.category = Category::Design;
  t.initial_state = s;
  t.goal.kind = GoalChecker::Kind::PixelSim;
  t.goal.golden = golden;
  t.threshold = 0.95;
  CHECK(check_goal(s, t).first);
  CHECK(check_goal(s, t).second.find("similarity") != std::string::npos);

  // corrupt 10% of the cells: similarity 0.9 passes only thresholds <= 0.9
  sim::SymbolicRaster corrupted = golden;
  size_t n = corrupted.cells.size();
  for (size_t i = 0; i < n / 10; ++i)
    corrupted.cells[i * 10].value = "corrupt";
  t.goal.golden = corrupted;

  std::vector<bool> passes;
  for (double th : {0.5, 0.8, 0.95, 1.0}) {
    t.threshold = th;
    passes.push_back(check_goal(s, t).first);
  }
  CHECK(passes == std::vector<bool>{true, true, false, false});
  for (size_t i = 1; i < passes.size(); ++i)  // monotone in the threshold
    CHECK(passes[i] <= passes[i - 1]);

  // a region confines the comparison
  t.goal.golden = golden;
  t.goal.golden.at(70, 50).value = "corrupt";  // outside the Main window
  t.threshold = 1.0;
  CHECK_FALSE(check_goal(s, t).first);
  t.goal.region = Rect{0, 0, 480, 320};  // px region covering only the window
  CHECK(check_goal(s, t).first);
}

TEST_CASE("check_goal: region equality via the first metadata panel") {
  sim::EnvState s = testgen::demo_state();
  auto [clicked, rep] = sim::execute(s, actions::parse("click(20, 44)"));

  TaskSpec t;
  t.id = "office/eq";
  t.category = Category::Office;
  t.threshold = 0.95;
  t.initial_state = s;
  t.goal.kind = GoalChecker::Kind::RegionEq;
  t.goal.use_metadata_region = true;
  t.goal.golden = sim::render(clicked);

  CHECK(check_goal(clicked, t).first);
  CHECK_FALSE(check_goal(s, t).first);  // checkbox cell differs inside the window

  // differences outside the first panel's bbox are ignored
  t.goal.golden.at(70, 50).value = "corrupt";
  CHECK(check_goal(clicked, t).first);
  t.goal.use_metadata_region = false;  // whole screen: the corruption now counts
  CHECK_FALSE(check_goal(clicked, t).first);
}

TEST_CASE("task json: round-trip and category threshold rules") {
  TaskSpec t = wifi_task();
  json j = task_to_json(t);
  TaskSpec back = task_from_json(j, "");
  CHECK(back.id == t.id);
  CHECK(back.category == t.category);
  CHECK(back.query == t.query);
  CHECK(back.transcript == t.transcript);
  CHECK(back.goal.assertions == t.goal.assertions);
  CHECK(back.step_cap == t.step_cap);
  CHECK(sim::state_hash(back.initial_state) == sim::state_hash(t.initial_state));

  // pixel goals carry golden raster and region inline
  TaskSpec px;
  px.id = "design/banner";
  px.category = Category::Design;
  px.initial_state = testgen::demo_state();
  px.goal.kind = GoalChecker::Kind::PixelSim;
  px.goal.golden = sim::render(px.initial_state);
  px.goal.region = Rect{16, 96, 160, 80};
  px.threshold = 0.9;
  TaskSpec px_back = task_from_json(task_to_json(px), "");
  CHECK(px_back.goal.golden == px.goal.golden);
  CHECK(px_back.goal.region == px.goal.region);
  CHECK(px_back.threshold == 0.9);

  // Design and Office demand an explicit threshold; others default
  json design = j;
  design["id"] = "design/x";
  design["category"] = "Design";
  design.erase("threshold");
  CHECK_THROWS_AS(task_from_json(design, ""), std::invalid_argument);
  design["threshold"] = 0.9;
  CHECK(task_from_json(design, "").threshold == 0.9);

  json widget = j;
  widget["category"] = "Widget";
  widget.erase("threshold");
  CHECK(task_from_json(widget, "").threshold == 0.95);

  CHECK(sanitize_task_id("sysset/wifi_off") == "sysset__wifi_off");
  CHECK(category_from_string("FileMani") == Category::FileMani);
  CHECK_THROWS_AS(category_from_string("Nope"), std::invalid_argument);
  CHECK(category_display(Category::SysSet) == "Sys. Set.");
  CHECK(category_display(Category::FileMani) == "File Mani.");
}

TEST_CASE("task pack: loads the on-disk layout") {
  std::string dir = "/tmp/ace_eval_pack";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir + "/tasks");

  TaskSpec t = wifi_task();
  write_file(dir + "/tasks/sysset__wifi_off.json", task_to_json(t).dump(2));
  write_file(dir + "/templates.json", testgen::demo_templates().to_json().dump(2));
  write_file(dir + "/pack.json",
             json{{"name", "mini"}, {"tasks", {"tasks/sysset__wifi_off.json"}}}.dump(2));

  TaskPack pack = TaskPack::load(dir);
  CHECK(pack.name == "mini");
  REQUIRE(pack.tasks.size() == 1);
  CHECK(pack.tasks[0].id == "sysset/wifi_off");
  CHECK(pack.find("sysset/wifi_off") != nullptr);
  CHECK(pack.find("nope") == nullptr);
  CHECK(pack.templates == testgen::demo_templates());
}

TEST_CASE("run_episode: scripted wifi episode succeeds and traces everything") {
  TaskSpec spec = wifi_task();
  PromptSet ps = full_prompts();
  RunConfig config;
  config.seed = 5;

  llm::ScriptedBackend backend(wifi_rules());
  LocalEnv env(spec.initial_state);
  EpisodeResult r =
      run_episode(spec, backend, env, config, ps, testgen::demo_templates());

  CHECK(r.success);
  CHECK(r.reason == "goal");
  CHECK(r.steps == 1);
  CHECK(r.goal_detail.find("assertions hold") != std::string::npos);
  CHECK(std::get<bool>(env.final_state().settings.at("wifi")) == false);
  CHECK(backend.call_count() == 4);  // extract, refine, actor, critic

  const json* header = r.trace.find("header");
  REQUIRE(header != nullptr);
  CHECK(header->at("task") == "sysset/wifi_off");
  CHECK(header->at("ablation") == "none");
  CHECK(header->at("seed") == 5);

  const json* plan_rec = r.trace.find("plan");
  REQUIRE(plan_rec != nullptr);
  CHECK(plan_rec->at("leaves") == 1);
  CHECK(plan_rec->at("outline").get<std::string>().find("Turn off Wi-Fi") !=
        std::string::npos);
  CHECK(plan_rec->at("calls").size() == 2);

  int step_records = 0, with_action = 0;
  for (const auto& rec : r.trace.records)
    if (rec.value("type", "") == "step") {
      ++step_records;
      if (rec.contains("action")) {
        ++with_action;
        CHECK(rec.at("action") == "click(20, 44)");
        CHECK(rec.contains("state_hash_after"));
      }
    }
  CHECK(step_records == 2);  // one acted step + the closing done step
  CHECK(with_action == 1);

  const json* outcome = r.trace.find("outcome");
  REQUIRE(outcome != nullptr);
  CHECK(outcome->at("success") == true);
  CHECK(outcome->at("reason") == "goal");

  // only the header carries a timestamp
  int stamped = 0;
  for (const auto& rec : r.trace.records) stamped += rec.contains("timestamp");
  CHECK(stamped == 1);
}

TEST_CASE("run_episode: identical runs produce byte-identical scrubbed traces") {
  TaskSpec spec = wifi_task();
  PromptSet ps = full_prompts();
  RunConfig config;
  config.seed = 7;

  auto run_once = [&] {
    llm::ScriptedBackend backend(wifi_rules());
    LocalEnv env(spec.initial_state);
    return run_episode(spec, backend, env, config, ps, testgen::demo_templates());
  };
  EpisodeResult a = run_once(), b = run_once();
  CHECK(scrub_timestamps(a.trace).to_jsonl() == scrub_timestamps(b.trace).to_jsonl());

  EpisodeTrace parsed = EpisodeTrace::from_jsonl(a.trace.to_jsonl());
  CHECK(parsed.records == a.trace.records);
}

TEST_CASE("replay_trace: recorded actions rebuild every state hash") {
  TaskSpec spec = wifi_task();
  PromptSet ps = full_prompts();
  RunConfig config;
  llm::ScriptedBackend backend(wifi_rules());
  LocalEnv env(spec.initial_state);
  EpisodeResult r =
      run_episode(spec, backend, env, config, ps, testgen::demo_templates());

  auto [ok, detail] = replay_trace(spec, r.trace);
  CHECK(ok);
  CHECK(detail.find("1 action") != std::string::npos);

  // tampering with the recorded hash is caught
  EpisodeTrace bad = r.trace;
  for (auto& rec : bad.records)
    if (rec.value("type", "") == "step" && rec.contains("state_hash_after"))
      rec["state_hash_after"] = "bogus";
  CHECK_FALSE(replay_trace(spec, bad).first);
}

TEST_CASE("run_episode: the step cap fails the episode even when the goal holds") {
  TaskSpec spec = wifi_task();
  spec.step_cap = 1;
  PromptSet ps = full_prompts();
  RunConfig config;

  const std::string outline = "1. Turn off Wi-Fi\n  a. click the Wi-Fi checkbox";
  llm::ScriptedBackend backend(
      {sub_rule("## PLAN FROM TRANSCRIPT", outline), sub_rule("## REFINE PLAN", outline),
       sub_rule("## CRITIC", "success=true; finished=false; -; still checking"),
       sub_rule("## NEXT ACTION", "click(20, 44)")});
  LocalEnv env(spec.initial_state);
  EpisodeResult r =
      run_episode(spec, backend, env, config, ps, testgen::demo_templates());

  CHECK_FALSE(r.success);
  CHECK(r.reason == "cap");
  CHECK(r.steps == 1);
  // the click did land; only the cap failed the run
  CHECK(std::get<bool>(env.final_state().settings.at("wifi")) == false);
  CHECK(r.goal_detail.find("assertions hold") != std::string::npos);
}

TEST_CASE("run_episode: a subtask that never finishes hits the subtask cap") {
  TaskSpec spec = wifi_task();
  PromptSet ps = full_prompts();
  RunConfig config;
  config.subtask_cap = 2;

  const std::string outline = "1. Turn off Wi-Fi\n  a. click the Wi-Fi checkbox";
  llm::ScriptedBackend backend(
      {sub_rule("## PLAN FROM TRANSCRIPT", outline), sub_rule("## REFINE PLAN", outline),
       sub_rule("## CRITIC", "success=false; finished=false; missed; still on"),
       sub_rule("## NEXT ACTION", "moveTo(5, 5)")});
  LocalEnv env(spec.initial_state);
  EpisodeResult r =
      run_episode(spec, backend, env, config, ps, testgen::demo_templates());

  CHECK_FALSE(r.success);
  CHECK(r.reason == "subtask_cap");
  CHECK(r.steps == 2);
}

TEST_CASE("run_episode: backend errors are caught and reported") {
  TaskSpec spec = wifi_task();
  PromptSet ps = full_prompts();
  RunConfig config;
  llm::ScriptedBackend backend(std::vector<llm::ScriptRule>{});
  LocalEnv env(spec.initial_state);
  EpisodeResult r =
      run_episode(spec, backend, env, config, ps, testgen::demo_templates());

  CHECK_FALSE(r.success);
  CHECK(r.reason.rfind("error: ", 0) == 0);
  CHECK(r.trace.find("error") != nullptr);
  CHECK(r.trace.find("outcome") != nullptr);
}

TEST_CASE("no_critic ablation: fixed step count, no critic prompts") {
  TaskSpec spec = wifi_task();
  PromptSet ps = full_prompts();
  RunConfig config;
  config.no_critic = true;
  config.critic_steps_per_subtask = 1;

  const std::string outline =
      "1. Turn off Wi-Fi\n  a. focus the window\n  b. click the Wi-Fi checkbox";
  llm::ScriptedBackend backend(
      {sub_rule("## PLAN FROM TRANSCRIPT", outline), sub_rule("## REFINE PLAN", outline),
       sub_rule("## NEXT ACTION", "moveTo(8, 8)", 1),
       sub_rule("## NEXT ACTION", "click(20, 44)", 1)});
  LocalEnv env(spec.initial_state);
  EpisodeResult r =
      run_episode(spec, backend, env, config, ps, testgen::demo_templates());

  CHECK(r.success);
  CHECK(r.steps == 2);  // exactly one action per leaf
  for (const auto& rec : backend.log())
    CHECK(rec.prompt.find("## CRITIC") == std::string::npos);

  const json* header = r.trace.find("header");
  CHECK(header->at("ablation") == "no_critic");
}

TEST_CASE("no_planner ablation: one leaf built from query and transcript") {
  TaskSpec spec = wifi_task();
  PromptSet ps = full_prompts();
  RunConfig config;
  config.no_planner = true;

  llm::ScriptedBackend backend(
      {sub_rule("## CRITIC", "success=true; finished=true; off; done"),
       sub_rule("## NEXT ACTION", "click(20, 44)")});
  LocalEnv env(spec.initial_state);
  EpisodeResult r =
      run_episode(spec, backend, env, config, ps, testgen::demo_templates());

  CHECK(r.success);
  CHECK(r.steps == 1);
  CHECK(backend.call_count() == 2);  // no planning calls at all

  const json* plan_rec = r.trace.find("plan");
  REQUIRE(plan_rec != nullptr);
  CHECK(plan_rec->at("leaves") == 1);
  std::string outline = plan_rec->at("outline").get<std::string>();
  CHECK(outline.find("full instructions") != std::string::npos);
  CHECK(outline.find("Find the Wi-Fi checkbox. / Click it") != std::string::npos);
  CHECK(r.trace.find("header")->at("ablation") == "no_planner");
}

TEST_CASE("no_transcript ablation: plans from the query alone") {
  TaskSpec spec = wifi_task();
  PromptSet ps = full_prompts();
  RunConfig config;
  config.no_transcript = true;

  llm::ScriptedBackend backend(
      {sub_rule("## QUERY-ONLY PLAN", "1. Turn off Wi-Fi\n  a. click the checkbox"),
       sub_rule("## CRITIC", "success=true; finished=true; off; done"),
       sub_rule("## NEXT ACTION", "click(20, 44)")});
  LocalEnv env(spec.initial_state);
  EpisodeResult r =
      run_episode(spec, backend, env, config, ps, testgen::demo_templates());

  CHECK(r.success);
  CHECK(backend.log()[0].prompt.find("## QUERY-ONLY PLAN") != std::string::npos);
  CHECK(backend.log()[0].prompt.find("Find the Wi-Fi checkbox") == std::string::npos);
}

TEST_CASE("run_suite: per-category report, isolation, and parallel equivalence") {
  TaskPack pack;
  pack.name = "mini";
  pack.templates = testgen::demo_templates();
  pack.tasks.push_back(wifi_task());
  TaskSpec broken = wifi_task();
  broken.id = "office/broken";
  broken.category = Category::Office;
  broken.threshold = 0.95;
  pack.tasks.push_back(broken);

  PromptSet ps = full_prompts();
  RunConfig config;
  BackendFactory factory = [](const TaskSpec& task) -> std::unique_ptr<llm::Backend> {
    if (task.id == "sysset/wifi_off")
      return std::make_unique<llm::ScriptedBackend>(wifi_rules());
    return std::make_unique<llm::ScriptedBackend>(std::vector<llm::ScriptRule>{});
  };

  SuiteResult suite = run_suite(pack, factory, config, ps, 1);
  REQUIRE(suite.episodes.size() == 2);
  CHECK(suite.episodes[0].success);
  CHECK_FALSE(suite.episodes[1].success);  // its failure never touched task 0
  CHECK(suite.report.overall.total == 2);
  CHECK(suite.report.overall.passed == 1);
  CHECK(suite.report.per_category.at(Category::SysSet).passed == 1);
  CHECK(suite.report.per_category.at(Category::Office).passed == 0);
  CHECK(suite.report.overall.rate() == doctest::Approx(50.0));

  std::string table = suite.report.to_table();
  CHECK(table.find("Sys. Set.") != std::string::npos);
  CHECK(table.find("Overall") != std::string::npos);
  CHECK(table.find("50.0") != std::string::npos);
  CHECK(table.find("1/2") != std::string::npos);

  json rj = suite.report.to_json();
  CHECK(rj["overall"]["passed"] == 1);
  CHECK(rj["categories"]["SysSet"]["rate"] == doctest::Approx(100.0));

  // a worker pool must not change any episode outcome or trace
  SuiteResult parallel = run_suite(pack, factory, config, ps, 2);
  REQUIRE(parallel.episodes.size() == suite.episodes.size());
  for (size_t i = 0; i < suite.episodes.size(); ++i) {
    CHECK(parallel.episodes[i].success == suite.episodes[i].success);
    CHECK(scrub_timestamps(parallel.episodes[i].trace).to_jsonl() ==
          scrub_timestamps(suite.episodes[i].trace).to_jsonl());
  }
}
