// Operator entry point: run episodes and suites, serve environments over
// TCP, replay and aggregate traces, and canonicalize action scripts.

#include <atomic>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <iterator>
#include <thread>

#include <CLI11.hpp>

#include "ace/bridge/client.hpp"
#include "ace/bridge/server.hpp"
#include "ace/eval/runner.hpp"
#include "ace/llm/http.hpp"
#include "ace/llm/scripted.hpp"

namespace fs = std::filesystem;
using namespace ace;

namespace {

std::atomic<bool> g_shutdown{false};
void request_shutdown(int) { g_shutdown.store(true); }

struct HostPort {
  std::string host = "127.0.0.1";
  int port = bridge::kDefaultPort;
};

HostPort parse_hostport(const std::string& s) {
  HostPort hp;
  if (s.empty()) return hp;
  auto pos = s.rfind(':');
  if (pos == std::string::npos) {
    hp.host = s;
    return hp;
  }
  hp.host = pos == 0 ? "127.0.0.1" : s.substr(0, pos);
  try {
    hp.port = std::stoi(s.substr(pos + 1));
  } catch (const std::exception&) {
    throw std::runtime_error("bad port in '" + s + "'");
  }
  if (hp.port < 0 || hp.port > 65535)
    throw std::runtime_error("port out of range in '" + s + "'");
  return hp;
}

// --backend grammar:
//   scripted:<dir>    per-task rule files <dir>/<id with '/'->'__'>.json
//   scripted:<file>   one rule table shared by every task
//   scripted:golden   shorthand for <pack>/backends
//   http[:<model>]    live chat-completions endpoint (ACE_API_KEY / ACE_API_BASE)
eval::BackendFactory make_backend_factory(const std::string& spec,
                                          const std::string& pack_root) {
  auto load_rules = [](const std::string& file) {
    json j = json::parse(read_file(file));
    std::vector<llm::ScriptRule> rules;
    for (const auto& jr : j.at("rules")) rules.push_back(llm::rule_from_json(jr));
    return std::make_unique<llm::ScriptedBackend>(std::move(rules));
  };

  if (spec == "http" || spec.rfind("http:", 0) == 0) {
    llm::HttpConfig hc;
    if (spec.size() > 5) hc.model = spec.substr(5);
    return [hc](const eval::TaskSpec&) { return std::make_unique<llm::HttpBackend>(hc); };
  }
  if (spec.rfind("scripted:", 0) == 0) {
    std::string path = spec.substr(9);
    if (path.empty())
      throw std::runtime_error("--backend scripted: needs a rules file or directory");
    if (path == "golden") path = pack_root + "/backends";
    if (fs::is_directory(path)) {
      return [path, load_rules](const eval::TaskSpec& t) {
        std::string file = path + "/" + eval::sanitize_task_id(t.id) + ".json";
        if (!fs::exists(file))
          throw std::runtime_error("no scripted rules for '" + t.id + "' (expected " +
                                   file + ")");
        return load_rules(file);
      };
    }
    if (fs::exists(path))
      return [path, load_rules](const eval::TaskSpec&) { return load_rules(path); };
    throw std::runtime_error("scripted rules path '" + path + "' does not exist");
  }
  throw std::runtime_error("unknown --backend '" + spec +
                           "' (use scripted:<path> or http[:<model>])");
}

eval::RunConfig make_run_config(uint64_t seed, const std::string& ablate) {
  eval::RunConfig c;
  c.seed = seed;
  c.no_planner = ablate == "no_planner";
  c.no_critic = ablate == "no_critic";
  c.no_transcript = ablate == "no_transcript";
  return c;
}

std::string trace_path(const std::string& out_dir, const std::string& task_id) {
  return out_dir + "/" + eval::sanitize_task_id(task_id) + ".trace.jsonl";
}

void print_episode_line(const eval::TaskSpec& task, const eval::EpisodeResult& res) {
  std::cerr << (res.success ? "PASS" : "FAIL") << " " << task.id << ": " << res.reason
            << " (" << res.goal_detail << "; " << res.steps << " steps)\n";
}

int cmd_run(const std::string& assets, const std::string& pack_dir,
            const std::string& task_id, const std::string& backend_spec,
            const std::string& ablate, uint64_t seed, const std::string& out_dir,
            const std::string& connect) {
  eval::TaskPack pack = eval::TaskPack::load(pack_dir);
  const eval::TaskSpec* task = pack.find(task_id);
  if (!task) {
    std::cerr << "error: no task '" << task_id << "' in pack '" << pack.name << "'\n";
    return 2;
  }
  auto backend = make_backend_factory(backend_spec, pack.root)(*task);
  PromptSet prompts = PromptSet::load(assets + "/prompts");
  eval::RunConfig config = make_run_config(seed, ablate);

  std::unique_ptr<bridge::BridgeClient> client;
  std::unique_ptr<eval::Env> env;
  if (!connect.empty()) {
    HostPort hp = parse_hostport(connect);
    bridge::ClientConfig cc;
    cc.host = hp.host;
    cc.port = hp.port;
    client = std::make_unique<bridge::BridgeClient>(cc);
    env = std::make_unique<bridge::RemoteEnv>(*client, task->id, task->initial_state);
  } else {
    env = std::make_unique<eval::LocalEnv>(task->initial_state);
  }

  eval::EpisodeResult res =
      eval::run_episode(*task, *backend, *env, config, prompts, pack.templates);
  std::string jsonl = res.trace.to_jsonl();
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    write_file(trace_path(out_dir, task->id), jsonl);
  } else {
    std::cout << jsonl;
  }
  print_episode_line(*task, res);
  return res.success ? 0 : 1;
}

int cmd_suite(const std::string& assets, const std::string& pack_dir,
              const std::string& backend_spec, const std::string& ablate, uint64_t seed,
              int jobs, const std::string& out_dir) {
  eval::TaskPack pack = eval::TaskPack::load(pack_dir);
  eval::BackendFactory factory = make_backend_factory(backend_spec, pack.root);
  PromptSet prompts = PromptSet::load(assets + "/prompts");
  eval::RunConfig config = make_run_config(seed, ablate);

  eval::SuiteResult sr = eval::run_suite(pack, factory, config, prompts, jobs);
  for (size_t i = 0; i < pack.tasks.size(); ++i)
    print_episode_line(pack.tasks[i], sr.episodes[i]);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    for (size_t i = 0; i < pack.tasks.size(); ++i)
      write_file(trace_path(out_dir, pack.tasks[i].id), sr.episodes[i].trace.to_jsonl());
    json summary = {{"pack", pack.name},
                    {"seed", seed},
                    {"ablation", config.ablation_name()},
                    {"report", sr.report.to_json()}};
    write_file(out_dir + "/report.json", summary.dump(2) + "\n");
  }
  std::cout << sr.report.to_table() << "\n";
  return sr.report.overall.passed == sr.report.overall.total ? 0 : 1;
}

int cmd_serve(const std::string& pack_dir, const std::string& listen) {
  eval::TaskPack pack = eval::TaskPack::load(pack_dir);
  HostPort hp = parse_hostport(listen);
  bridge::ServerConfig sc;
  sc.host = hp.host;
  sc.port = hp.port;
  auto shared = std::make_shared<eval::TaskPack>(std::move(pack));
  bridge::BridgeServer server(
      [shared](const std::string& id) {
        const eval::TaskSpec* t = shared->find(id);
        if (!t) throw std::runtime_error("unknown task '" + id + "'");
        return t->initial_state;
      },
      sc);
  server.start();
  std::cerr << "serving pack '" << shared->name << "' (" << shared->tasks.size()
            << " tasks) on " << sc.host << ":" << server.port() << "\n";
  std::signal(SIGINT, request_shutdown);
  std::signal(SIGTERM, request_shutdown);
  while (!g_shutdown.load()) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  std::cerr << "shutting down\n";
  server.stop();
  return 0;
}

int cmd_replay(const std::string& pack_dir, const std::string& trace_file) {
  eval::TaskPack pack = eval::TaskPack::load(pack_dir);
  eval::EpisodeTrace trace = eval::EpisodeTrace::from_jsonl(read_file(trace_file));
  const json* header = trace.find("header");
  if (!header) {
    std::cerr << "error: " << trace_file << " has no header record\n";
    return 2;
  }
  std::string id = header->at("task").get<std::string>();
  const eval::TaskSpec* task = pack.find(id);
  if (!task) {
    std::cerr << "error: trace task '" << id << "' is not in pack '" << pack.name << "'\n";
    return 2;
  }
  auto [ok, detail] = eval::replay_trace(*task, trace);
  std::cout << (ok ? "ok" : "mismatch") << ": " << detail << "\n";
  return ok ? 0 : 1;
}

int cmd_report(const std::string& pack_dir, const std::vector<std::string>& trace_files) {
  eval::TaskPack pack = eval::TaskPack::load(pack_dir);
  eval::MetricsReport report;
  for (const auto& file : trace_files) {
    eval::EpisodeTrace trace = eval::EpisodeTrace::from_jsonl(read_file(file));
    const json* header = trace.find("header");
    const json* outcome = trace.find("outcome");
    if (!header || !outcome) {
      std::cerr << "error: " << file << " lacks header or outcome records\n";
      return 2;
    }
    std::string id = header->at("task").get<std::string>();
    const eval::TaskSpec* task = pack.find(id);
    if (!task) {
      std::cerr << "error: trace task '" << id << "' is not in pack '" << pack.name
                << "'\n";
      return 2;
    }
    bool success = outcome->at("success").get<bool>();
    auto& row = report.per_category[task->category];
    ++row.total;
    row.passed += success;
    ++report.overall.total;
    report.overall.passed += success;
  }
  std::cout << report.to_table() << "\n";
  return 0;
}

int cmd_parse_actions() {
  std::string text((std::istreambuf_iterator<char>(std::cin)),
                   std::istreambuf_iterator<char>());
  try {
    actions::ActionScript script = actions::parse(text);
    std::string canonical = actions::render(script);
    if (!canonical.empty()) std::cout << canonical << "\n";
    return 0;
  } catch (const actions::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int cmd_list_tasks(const std::string& pack_dir) {
  eval::TaskPack pack = eval::TaskPack::load(pack_dir);
  for (const auto& t : pack.tasks)
    std::cout << t.id << "\t" << eval::category_display(t.category) << "\t" << t.query
              << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale GUI agent harness: actor-critic episodes over a simulated desktop"};
  app.require_subcommand(1);

  std::string assets = default_assets_dir();
  app.add_option("--assets", assets, "Assets directory (prompts + default pack)")
      ->envname("ACE_ASSETS");

  // shared option storage; each subcommand binds the flags it supports
  std::string pack_dir, task_id, backend_spec = "scripted:golden", ablate, out_dir;
  std::string connect, listen = "127.0.0.1:" + std::to_string(bridge::kDefaultPort);
  std::string trace_file;
  std::vector<std::string> trace_files;
  uint64_t seed = 0;
  int jobs = 1;

  const std::string ablations[] = {"no_planner", "no_critic", "no_transcript"};
  auto add_pack = [&](CLI::App* cmd) {
    cmd->add_option("--pack", pack_dir, "Task pack directory");
  };
  auto add_episode_opts = [&](CLI::App* cmd) {
    add_pack(cmd);
    cmd->add_option("--backend", backend_spec,
                    "scripted:<dir|file>, scripted:golden, or http[:<model>]");
    cmd->add_option("--ablate", ablate, "Lesion one component")
        ->check(CLI::IsMember({ablations[0], ablations[1], ablations[2]}));
    cmd->add_option("--seed", seed, "Run seed (default 0)");
    cmd->add_option("--out", out_dir, "Directory for traces and reports");
  };

  CLI::App* run = app.add_subcommand("run", "Run one task episode");
  run->add_option("--task", task_id, "Task id, e.g. widget/volume_set")->required();
  add_episode_opts(run);
  run->add_option("--connect", connect, "host[:port] of a bridge server to run against");

  CLI::App* suite = app.add_subcommand("suite", "Run every task in the pack");
  add_episode_opts(suite);
  suite->add_option("--jobs", jobs, "Worker pool size")->check(CLI::PositiveNumber);

  CLI::App* serve = app.add_subcommand("serve", "Host the pack's environments over TCP");
  add_pack(serve);
  serve->add_option("--listen", listen, "host[:port] to listen on (port 0 = ephemeral)");

  CLI::App* replay = app.add_subcommand("replay", "Re-execute a trace and verify hashes");
  replay->add_option("trace", trace_file, "Episode trace (.jsonl)")->required();
  add_pack(replay);

  CLI::App* report = app.add_subcommand("report", "Aggregate traces into a metrics table");
  report->add_option("traces", trace_files, "Episode traces (.jsonl)")->required();
  add_pack(report);

  app.add_subcommand("parse-actions", "Canonicalize an action script read from stdin");

  CLI::App* list_tasks = app.add_subcommand("list-tasks", "List the pack's tasks");
  add_pack(list_tasks);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // help/version are clean exits; the rest is usage
  }

  if (pack_dir.empty()) pack_dir = assets + "/packs/default";

  try {
    if (run->parsed())
      return cmd_run(assets, pack_dir, task_id, backend_spec, ablate, seed, out_dir,
                     connect);
    if (suite->parsed())
      return cmd_suite(assets, pack_dir, backend_spec, ablate, seed, jobs, out_dir);
    if (serve->parsed()) return cmd_serve(pack_dir, listen);
    if (replay->parsed()) return cmd_replay(pack_dir, trace_file);
    if (report->parsed()) return cmd_report(pack_dir, trace_files);
    if (app.get_subcommand("parse-actions")->parsed()) return cmd_parse_actions();
    if (list_tasks->parsed()) return cmd_list_tasks(pack_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;  // unreachable: require_subcommand(1)
}
