#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ace/gui/parser.hpp"
#include "ace/sim/desktop.hpp"
#include "ace/util.hpp"

namespace ace::eval {

enum class Category { Design, Office, Widget, SysSet, FileMani };

std::string category_to_string(Category c);        // "Design" ... "FileMani"
Category category_from_string(const std::string&);  // throws std::invalid_argument
std::string category_display(Category c);          // report column: "Sys. Set." etc.
std::vector<Category> all_categories();

// One assertion over the final environment state.
struct GoalAssert {
  enum class Kind { SettingEquals, FileExists, FileMissing };
  Kind kind = Kind::SettingEquals;
  std::string key;   // setting name or vfs path
  Scalar value;      // SettingEquals only

  bool operator==(const GoalAssert&) const = default;
};

// How a task decides success from the final state:
//   PixelSim   similarity(final raster, golden, region) >= task threshold
//   RegionEq   exact cell equality; region = first metadata panel's bbox
//              when use_metadata_region, else the whole screen
//   Predicate  all assertions hold over settings / vfs
struct GoalChecker {
  enum class Kind { PixelSim, RegionEq, Predicate };
  Kind kind = Kind::Predicate;
  sim::SymbolicRaster golden;
  std::optional<Rect> region;  // px; PixelSim only
  bool use_metadata_region = false;
  std::vector<GoalAssert> assertions;
};

struct TaskSpec {
  std::string id;  // "category/name", also the task file stem with '/'->'__'
  Category category = Category::Widget;
  std::string query;       // q
  std::string transcript;  // v
  sim::EnvState initial_state;
  GoalChecker goal;
  double threshold = 0.95;
  int step_cap = 60;
};

// Fraction of equal cells within the region (cell units; whole grid when
// absent). Dimensions must match.
double similarity(const sim::SymbolicRaster& a, const sim::SymbolicRaster& b,
                  const std::optional<Rect>& region_cells = std::nullopt);

std::pair<bool, std::string> check_goal(const sim::EnvState& final_state,
                                        const TaskSpec& spec);

// Pack layout under a directory:
//   pack.json       {"name": ..., "tasks": ["tasks/foo.json", ...]}
//   templates.json  icon templates
//   tasks/*.json    task specs (golden rasters referenced relative to root)
//   backends/*.json scripted rule tables, one per task (id with '/'->'__')
struct TaskPack {
  std::string root;
  std::string name;
  std::vector<TaskSpec> tasks;
  gui::IconTemplateSet templates;

  static TaskPack load(const std::string& dir);
  const TaskSpec* find(const std::string& id) const;
};

json task_to_json(const TaskSpec& spec);  // golden raster inline
TaskSpec task_from_json(const json& j, const std::string& pack_root);

std::string sanitize_task_id(const std::string& id);  // '/' -> "__"

}  // namespace ace::eval
