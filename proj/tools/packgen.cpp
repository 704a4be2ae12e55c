// Pack maintenance: bakes golden rasters by running each task's golden
// action script through the simulator, then verifies the finished pack
// (every task loads, has backend rules, and is actually solved by its
// golden script).
//
// goldens.json at the pack root maps task id -> golden action script.

#include <filesystem>
#include <iostream>

#include "ace/actions.hpp"
#include "ace/eval/task.hpp"
#include "ace/sim/desktop.hpp"

namespace fs = std::filesystem;
using namespace ace;

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: ace_packgen <pack-dir>\n";
    return 2;
  }
  std::string root = argv[1];
  try {
    json pack_doc = json::parse(read_file(root + "/pack.json"));
    json goldens = json::parse(read_file(root + "/goldens.json"));

    // bake: final-screen rasters for tasks whose goal references a golden file
    for (const auto& rel : pack_doc.at("tasks")) {
      json doc = json::parse(read_file(root + "/" + rel.get<std::string>()));
      std::string id = doc.at("id").get<std::string>();
      const json& jg = doc.at("goal");
      if (!jg.contains("golden") || jg.at("kind") == "predicate") continue;
      if (!goldens.contains(id)) {
        std::cerr << "FAIL " << id << ": golden raster wanted but no golden script\n";
        return 1;
      }
      sim::EnvState state = sim::load_task(doc);
      actions::ActionScript script = actions::parse(goldens.at(id).get<std::string>());
      auto [final_state, report] = sim::execute(state, script);
      (void)report;
      std::string rel_golden = jg.at("golden").get<std::string>();
      fs::create_directories(fs::path(root + "/" + rel_golden).parent_path());
      write_file(root + "/" + rel_golden,
                 sim::raster_to_json(sim::render(final_state)).dump() + "\n");
      std::cerr << "baked " << rel_golden << " for " << id << "\n";
    }

    // verify: the finished pack loads and every golden script reaches its goal
    eval::TaskPack pack = eval::TaskPack::load(root);
    bool all_ok = true;
    for (const auto& task : pack.tasks) {
      std::string backend_file =
          root + "/backends/" + eval::sanitize_task_id(task.id) + ".json";
      if (!fs::exists(backend_file)) {
        std::cerr << "FAIL " << task.id << ": missing " << backend_file << "\n";
        all_ok = false;
      }
      if (!goldens.contains(task.id)) {
        std::cerr << "FAIL " << task.id << ": no golden script\n";
        all_ok = false;
        continue;
      }
      actions::ActionScript script =
          actions::parse(goldens.at(task.id).get<std::string>());
      auto [final_state, report] = sim::execute(task.initial_state, script);
      (void)report;
      auto [ok, detail] = eval::check_goal(final_state, task);
      std::cerr << (ok ? "ok   " : "FAIL ") << task.id << ": " << detail << " ("
                << script.actions.size() << " golden actions)\n";
      all_ok = all_ok && ok;
    }
    std::cerr << "pack '" << pack.name << "': " << pack.tasks.size() << " tasks\n";
    return all_ok ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
