#include "ace/eval/task.hpp"

#include <cmath>

namespace ace::eval {

std::string category_to_string(Category c) {
  switch (c) {
    case Category::Design: return "Design";
    case Category::Office: return "Office";
    case Category::Widget: return "Widget";
    case Category::SysSet: return "SysSet";
    case Category::FileMani: return "FileMani";
  }
  return "?";
}

Category category_from_string(const std::string& s) {
  for (Category c : all_categories())
    if (category_to_string(c) == s) return c;
  throw std::invalid_argument("unknown task category: " + s);
}

std::string category_display(Category c) {
  switch (c) {
    case Category::SysSet: return "Sys. Set.";
    case Category::FileMani: return "File Mani.";
    default: return category_to_string(c);
  }
}

std::vector<Category> all_categories() {
  return {Category::Design, Category::Office, Category::Widget, Category::SysSet,
          Category::FileMani};
}

double similarity(const sim::SymbolicRaster& a, const sim::SymbolicRaster& b,
                  const std::optional<Rect>& region_cells) {
  if (a.width != b.width || a.height != b.height)
    throw std::invalid_argument("similarity: raster dimensions differ");
  int x0 = 0, y0 = 0, x1 = a.width, y1 = a.height;
  if (region_cells) {
    x0 = std::max(0, region_cells->x);
    y0 = std::max(0, region_cells->y);
    x1 = std::min(a.width, region_cells->x + region_cells->w);
    y1 = std::min(a.height, region_cells->y + region_cells->h);
  }
  long total = 0, equal = 0;
  for (int y = y0; y < y1; ++y)
    for (int x = x0; x < x1; ++x) {
      ++total;
      if (a.at(x, y) == b.at(x, y)) ++equal;
    }
  if (total == 0) return 1.0;
  return static_cast<double>(equal) / static_cast<double>(total);
}

namespace {

std::optional<Rect> px_region_to_cells(const Rect& px, int cell_px) {
  Rect r;
  r.x = px.x / cell_px;
  r.y = px.y / cell_px;
  r.w = (px.x + px.w + cell_px - 1) / cell_px - r.x;  // cover partially-touched cells
  r.h = (px.y + px.h + cell_px - 1) / cell_px - r.y;
  return r;
}

std::string scalar_desc(const Scalar& v) { return scalar_to_string(v); }

}  // namespace

std::pair<bool, std::string> check_goal(const sim::EnvState& final_state,
                                        const TaskSpec& spec) {
  const GoalChecker& goal = spec.goal;
  if (goal.kind == GoalChecker::Kind::Predicate) {
    for (const auto& a : goal.assertions) {
      switch (a.kind) {
        case GoalAssert::Kind::SettingEquals: {
          auto it = final_state.settings.find(a.key);
          if (it == final_state.settings.end())
            return {false, "setting '" + a.key + "' missing"};
          if (!scalar_eq(it->second, a.value))
            return {false, "setting '" + a.key + "' is " + scalar_desc(it->second) +
                               ", expected " + scalar_desc(a.value)};
          break;
        }
        case GoalAssert::Kind::FileExists:
          if (!final_state.vfs.file_exists(a.key))
            return {false, "file '" + a.key + "' missing"};
          break;
        case GoalAssert::Kind::FileMissing:
          if (final_state.vfs.file_exists(a.key))
            return {false, "file '" + a.key + "' still present"};
          break;
      }
    }
    return {true, "all " + std::to_string(goal.assertions.size()) + " assertions hold"};
  }

  sim::SymbolicRaster final_raster = sim::render(final_state);
  if (goal.kind == GoalChecker::Kind::PixelSim) {
    std::optional<Rect> region;
    if (goal.region) region = px_region_to_cells(*goal.region, final_state.cell_px);
    double s = similarity(final_raster, goal.golden, region);
    bool pass = s >= spec.threshold;
    return {pass, "similarity " + format_double(s) + " vs threshold " +
                      format_double(spec.threshold)};
  }

  // RegionEq
  std::optional<Rect> region;
  if (goal.use_metadata_region) {
    auto obs = sim::observe(final_state);
    if (!obs.metadata.empty())
      region = px_region_to_cells(obs.metadata.front().bbox, final_state.cell_px);
  }
  double s = similarity(final_raster, goal.golden, region);
  bool pass = s == 1.0;
  std::string where = region ? "metadata region " + rect_to_string(*region) +
                                   " (cells)"
                             : std::string("full screen");
  return {pass, (pass ? "exact match on " : "mismatch on ") + where +
                    (pass ? "" : " (similarity " + format_double(s) + ")")};
}

// ---------------------------------------------------------------------------

namespace {

GoalAssert assert_from_json(const json& j) {
  GoalAssert a;
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "setting_equals") {
    a.kind = GoalAssert::Kind::SettingEquals;
    a.key = j.at("key").get<std::string>();
    a.value = scalar_from_json(j.at("value"));
  } else if (kind == "file_exists") {
    a.kind = GoalAssert::Kind::FileExists;
    a.key = j.at("path").get<std::string>();
  } else if (kind == "file_missing") {
    a.kind = GoalAssert::Kind::FileMissing;
    a.key = j.at("path").get<std::string>();
  } else {
    throw std::invalid_argument("unknown goal assertion kind: " + kind);
  }
  return a;
}

json assert_to_json(const GoalAssert& a) {
  switch (a.kind) {
    case GoalAssert::Kind::SettingEquals:
      return json{{"kind", "setting_equals"}, {"key", a.key}, {"value", scalar_to_json(a.value)}};
    case GoalAssert::Kind::FileExists:
      return json{{"kind", "file_exists"}, {"path", a.key}};
    case GoalAssert::Kind::FileMissing:
      return json{{"kind", "file_missing"}, {"path", a.key}};
  }
  throw std::logic_error("bad assertion kind");
}

}  // namespace

TaskSpec task_from_json(const json& j, const std::string& pack_root) {
  TaskSpec spec;
  spec.id = j.at("id").get<std::string>();
  spec.category = category_from_string(j.at("category").get<std::string>());
  spec.query = j.at("query").get<std::string>();
  spec.transcript = j.at("transcript").get<std::string>();
  spec.initial_state = sim::state_from_json(j.at("initial_state"));
  spec.threshold = j.value("threshold", 0.95);
  spec.step_cap = j.value("step_cap", 60);
  if ((spec.category == Category::Design || spec.category == Category::Office) &&
      !j.contains("threshold"))
    throw std::invalid_argument("task " + spec.id +
                                ": Design/Office tasks must carry a threshold");

  const json& jg = j.at("goal");
  std::string kind = jg.at("kind").get<std::string>();
  if (kind == "pixel_sim") {
    spec.goal.kind = GoalChecker::Kind::PixelSim;
  } else if (kind == "region_eq") {
    spec.goal.kind = GoalChecker::Kind::RegionEq;
    spec.goal.use_metadata_region = jg.value("use_metadata_region", false);
  } else if (kind == "predicate") {
    spec.goal.kind = GoalChecker::Kind::Predicate;
    for (const auto& ja : jg.at("assertions"))
      spec.goal.assertions.push_back(assert_from_json(ja));
  } else {
    throw std::invalid_argument("unknown goal kind: " + kind);
  }
  if (spec.goal.kind != GoalChecker::Kind::Predicate) {
    if (jg.contains("golden_raster")) {
      spec.goal.golden = sim::raster_from_json(jg.at("golden_raster"));
    } else {
      std::string rel = jg.at("golden").get<std::string>();
      spec.goal.golden =
          sim::raster_from_json(json::parse(read_file(pack_root + "/" + rel)));
    }
    if (jg.contains("region")) spec.goal.region = rect_from_json(jg.at("region"));
  }
  return spec;
}

json task_to_json(const TaskSpec& spec) {
  json j;
  j["id"] = spec.id;
  j["category"] = category_to_string(spec.category);
  j["query"] = spec.query;
  j["transcript"] = spec.transcript;
  j["initial_state"] = sim::state_to_json(spec.initial_state);
  j["threshold"] = spec.threshold;
  j["step_cap"] = spec.step_cap;
  json jg;
  switch (spec.goal.kind) {
    case GoalChecker::Kind::PixelSim: jg["kind"] = "pixel_sim"; break;
    case GoalChecker::Kind::RegionEq:
      jg["kind"] = "region_eq";
      jg["use_metadata_region"] = spec.goal.use_metadata_region;
      break;
    case GoalChecker::Kind::Predicate: {
      jg["kind"] = "predicate";
      json arr = json::array();
      for (const auto& a : spec.goal.assertions) arr.push_back(assert_to_json(a));
      jg["assertions"] = arr;
      break;
    }
  }
  if (spec.goal.kind != GoalChecker::Kind::Predicate) {
    jg["golden_raster"] = sim::raster_to_json(spec.goal.golden);
    if (spec.goal.region) jg["region"] = rect_to_json(*spec.goal.region);
  }
  j["goal"] = jg;
  return j;
}

std::string sanitize_task_id(const std::string& id) {
  std::string out = id;
  size_t pos;
  while ((pos = out.find('/')) != std::string::npos) out.replace(pos, 1, "__");
  return out;
}

TaskPack TaskPack::load(const std::string& dir) {
  TaskPack pack;
  pack.root = dir;
  json manifest = json::parse(read_file(dir + "/pack.json"));
  pack.name = manifest.at("name").get<std::string>();
  pack.templates =
      gui::IconTemplateSet::from_json(json::parse(read_file(dir + "/templates.json")));
  for (const auto& rel : manifest.at("tasks")) {
    std::string path = dir + "/" + rel.get<std::string>();
    pack.tasks.push_back(task_from_json(json::parse(read_file(path)), dir));
  }
  return pack;
}

const TaskSpec* TaskPack::find(const std::string& id) const {
  for (const auto& t : tasks)
    if (t.id == id) return &t;
  return nullptr;
}

}  // namespace ace::eval
