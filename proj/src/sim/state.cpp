#include "ace/sim/state.hpp"

#include <algorithm>
#include <sstream>

namespace ace::sim {

std::string kind_to_string(WidgetKind k) {
  switch (k) {
    case WidgetKind::Button: return "button";
    case WidgetKind::TextField: return "text_field";
    case WidgetKind::Checkbox: return "checkbox";
    case WidgetKind::MenuItem: return "menu_item";
    case WidgetKind::ScrollArea: return "scroll_area";
    case WidgetKind::Icon: return "icon";
    case WidgetKind::Label: return "label";
    case WidgetKind::Canvas: return "canvas";
  }
  return "label";
}

WidgetKind kind_from_string(const std::string& s) {
  if (s == "button") return WidgetKind::Button;
  if (s == "text_field") return WidgetKind::TextField;
  if (s == "checkbox") return WidgetKind::Checkbox;
  if (s == "menu_item") return WidgetKind::MenuItem;
  if (s == "scroll_area") return WidgetKind::ScrollArea;
  if (s == "icon") return WidgetKind::Icon;
  if (s == "label") return WidgetKind::Label;
  if (s == "canvas") return WidgetKind::Canvas;
  throw SchemaError("kind", "unknown widget kind '" + s + "'");
}

std::string trigger_to_string(Trigger t) {
  switch (t) {
    case Trigger::Click: return "click";
    case Trigger::DoubleClick: return "double_click";
    case Trigger::RightClick: return "right_click";
    case Trigger::Toggle: return "toggle";
    case Trigger::TextCommit: return "text_commit";
    case Trigger::DragDrop: return "drag_drop";
  }
  return "click";
}

Trigger trigger_from_string(const std::string& s) {
  if (s == "click") return Trigger::Click;
  if (s == "double_click") return Trigger::DoubleClick;
  if (s == "right_click") return Trigger::RightClick;
  if (s == "toggle") return Trigger::Toggle;
  if (s == "text_commit") return Trigger::TextCommit;
  if (s == "drag_drop") return Trigger::DragDrop;
  throw SchemaError("trigger", "unknown trigger '" + s + "'");
}

bool Widget::visible() const {
  auto it = state.find("visible");
  if (it == state.end()) return true;
  return !std::holds_alternative<bool>(it->second) || std::get<bool>(it->second);
}

bool Widget::checked() const {
  auto it = state.find("checked");
  return it != state.end() && std::holds_alternative<bool>(it->second) &&
         std::get<bool>(it->second);
}

int64_t Widget::state_int(const std::string& key, int64_t fallback) const {
  auto it = state.find(key);
  if (it == state.end()) return fallback;
  if (std::holds_alternative<int64_t>(it->second)) return std::get<int64_t>(it->second);
  if (std::holds_alternative<double>(it->second))
    return static_cast<int64_t>(std::get<double>(it->second));
  return fallback;
}

// ---------------------------------------------------------------------------
// Vfs

namespace {

std::vector<std::string> path_segments(const std::string& path) {
  std::vector<std::string> segs;
  for (auto& s : split(path, '/'))
    if (!s.empty()) segs.push_back(s);
  return segs;
}

VfsDir* walk_dir(VfsDir& root, const std::vector<std::string>& segs, size_t count) {
  VfsDir* cur = &root;
  for (size_t i = 0; i < count; ++i) {
    auto it = std::find_if(cur->dirs.begin(), cur->dirs.end(),
                           [&](const VfsDir& d) { return d.name == segs[i]; });
    if (it == cur->dirs.end()) return nullptr;
    cur = &*it;
  }
  return cur;
}

}  // namespace

bool Vfs::file_exists(const std::string& path) const {
  auto segs = path_segments(path);
  if (segs.empty()) return false;
  auto* dir = walk_dir(const_cast<VfsDir&>(root), segs, segs.size() - 1);
  if (!dir) return false;
  return std::find(dir->files.begin(), dir->files.end(), segs.back()) !=
         dir->files.end();
}

bool Vfs::dir_exists(const std::string& path) const {
  auto segs = path_segments(path);
  return walk_dir(const_cast<VfsDir&>(root), segs, segs.size()) != nullptr;
}

std::string Vfs::move_file(const std::string& src, const std::string& dst) {
  auto ssegs = path_segments(src);
  auto dsegs = path_segments(dst);
  if (ssegs.empty()) return "bad source path '" + src + "'";
  if (dsegs.empty()) return "bad destination path '" + dst + "'";
  VfsDir* sdir = walk_dir(root, ssegs, ssegs.size() - 1);
  if (!sdir) return "source folder missing for '" + src + "'";
  auto it = std::find(sdir->files.begin(), sdir->files.end(), ssegs.back());
  if (it == sdir->files.end()) return "file not found: '" + src + "'";
  VfsDir* ddir = walk_dir(root, dsegs, dsegs.size() - 1);
  if (!ddir) return "destination folder missing for '" + dst + "'";
  if (std::find(ddir->files.begin(), ddir->files.end(), dsegs.back()) !=
      ddir->files.end())
    return "destination exists: '" + dst + "'";
  sdir->files.erase(it);
  ddir->files.insert(
      std::upper_bound(ddir->files.begin(), ddir->files.end(), dsegs.back()),
      dsegs.back());
  return "";
}

// ---------------------------------------------------------------------------
// Widget lookup

namespace {

Widget* find_in(std::vector<Widget>& widgets, const std::string& id) {
  for (auto& w : widgets) {
    if (w.id == id) return &w;
    if (Widget* found = find_in(w.children, id)) return found;
  }
  return nullptr;
}

}  // namespace

Widget* EnvState::find_widget(const std::string& id) { return find_in(windows, id); }

const Widget* EnvState::find_widget(const std::string& id) const {
  return find_in(const_cast<std::vector<Widget>&>(windows), id);
}

// ---------------------------------------------------------------------------
// JSON serialization (canonical: nlohmann objects dump with sorted keys)

namespace {

json mutation_to_json(const Mutation& m) {
  json j;
  switch (m.op) {
    case Mutation::Op::SetSetting:
      j["op"] = "set_setting";
      j["key"] = m.key;
      j["value"] = scalar_to_json(m.value);
      break;
    case Mutation::Op::AdjustSetting:
      j["op"] = "adjust_setting";
      j["key"] = m.key;
      j["delta"] = m.delta;
      j["min"] = m.min;
      j["max"] = m.max;
      break;
    case Mutation::Op::ToggleSetting:
      j["op"] = "toggle_setting";
      j["key"] = m.key;
      break;
    case Mutation::Op::OpenWindow:
      j["op"] = "open_window";
      j["widget"] = m.widget;
      break;
    case Mutation::Op::CloseWindow:
      j["op"] = "close_window";
      j["widget"] = m.widget;
      break;
    case Mutation::Op::MoveFile:
      j["op"] = "move_file";
      j["src"] = m.src;
      j["dst"] = m.dst;
      break;
    case Mutation::Op::SetWidgetText:
      j["op"] = "set_widget_text";
      j["widget"] = m.widget;
      j["text"] = m.text;
      break;
    case Mutation::Op::SetWidgetState:
      j["op"] = "set_widget_state";
      j["widget"] = m.widget;
      j["key"] = m.key;
      j["value"] = scalar_to_json(m.value);
      break;
  }
  return j;
}

Mutation mutation_from_json(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("op"))
    throw SchemaError(path, "mutation needs an 'op' field");
  Mutation m;
  std::string op = j["op"].get<std::string>();
  auto need = [&](const char* field) -> const json& {
    if (!j.contains(field))
      throw SchemaError(path, "mutation '" + op + "' needs field '" + field + "'");
    return j[field];
  };
  try {
    if (op == "set_setting") {
      m.op = Mutation::Op::SetSetting;
      m.key = need("key").get<std::string>();
      m.value = scalar_from_json(need("value"));
    } else if (op == "adjust_setting") {
      m.op = Mutation::Op::AdjustSetting;
      m.key = need("key").get<std::string>();
      m.delta = need("delta").get<double>();
      m.min = need("min").get<double>();
      m.max = need("max").get<double>();
    } else if (op == "toggle_setting") {
      m.op = Mutation::Op::ToggleSetting;
      m.key = need("key").get<std::string>();
    } else if (op == "open_window") {
      m.op = Mutation::Op::OpenWindow;
      m.widget = need("widget").get<std::string>();
    } else if (op == "close_window") {
      m.op = Mutation::Op::CloseWindow;
      m.widget = need("widget").get<std::string>();
    } else if (op == "move_file") {
      m.op = Mutation::Op::MoveFile;
      m.src = need("src").get<std::string>();
      m.dst = need("dst").get<std::string>();
    } else if (op == "set_widget_text") {
      m.op = Mutation::Op::SetWidgetText;
      m.widget = need("widget").get<std::string>();
      m.text = need("text").get<std::string>();
    } else if (op == "set_widget_state") {
      m.op = Mutation::Op::SetWidgetState;
      m.widget = need("widget").get<std::string>();
      m.key = need("key").get<std::string>();
      m.value = scalar_from_json(need("value"));
    } else {
      throw SchemaError(path, "unknown mutation op '" + op + "'");
    }
  } catch (const json::exception& e) {
    throw SchemaError(path, e.what());
  }
  return m;
}

json vfs_dir_to_json(const VfsDir& d) {
  json j;
  j["name"] = d.name;
  json dirs = json::array();
  for (const auto& sub : d.dirs) dirs.push_back(vfs_dir_to_json(sub));
  j["dirs"] = dirs;
  j["files"] = d.files;
  return j;
}

VfsDir vfs_dir_from_json(const json& j, const std::string& path) {
  VfsDir d;
  try {
    d.name = j.value("name", std::string("/"));
    if (j.contains("files")) d.files = j["files"].get<std::vector<std::string>>();
    std::sort(d.files.begin(), d.files.end());
    if (j.contains("dirs")) {
      int i = 0;
      for (const auto& sub : j["dirs"])
        d.dirs.push_back(vfs_dir_from_json(sub, path + ".dirs[" + std::to_string(i++) + "]"));
      std::sort(d.dirs.begin(), d.dirs.end(),
                [](const VfsDir& a, const VfsDir& b) { return a.name < b.name; });
    }
  } catch (const json::exception& e) {
    throw SchemaError(path, e.what());
  }
  return d;
}

}  // namespace

json widget_to_json(const Widget& w) {
  json j;
  j["id"] = w.id;
  j["kind"] = kind_to_string(w.kind);
  j["bbox"] = rect_to_json(w.bbox);
  j["text"] = w.text;
  j["icon_id"] = w.icon_id;
  json st = json::object();
  for (const auto& [k, v] : w.state) st[k] = scalar_to_json(v);
  j["state"] = st;
  json effects = json::array();
  for (const auto& e : w.effects) {
    json je;
    je["trigger"] = trigger_to_string(e.trigger);
    je["mutation"] = mutation_to_json(e.mutation);
    effects.push_back(je);
  }
  j["effects"] = effects;
  json children = json::array();
  for (const auto& c : w.children) children.push_back(widget_to_json(c));
  j["children"] = children;
  return j;
}

Widget widget_from_json(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "widget must be an object");
  Widget w;
  try {
    if (!j.contains("id")) throw SchemaError(path + ".id", "missing widget id");
    w.id = j["id"].get<std::string>();
    w.kind = kind_from_string(j.value("kind", std::string("label")));
    if (!j.contains("bbox")) throw SchemaError(path + ".bbox", "missing bbox");
    w.bbox = rect_from_json(j["bbox"]);
    w.text = j.value("text", std::string());
    w.icon_id = j.value("icon_id", std::string());
    if (j.contains("state"))
      for (const auto& [k, v] : j["state"].items())
        w.state[k] = scalar_from_json(v);
    if (j.contains("effects")) {
      int i = 0;
      for (const auto& je : j["effects"]) {
        Effect e;
        std::string epath = path + ".effects[" + std::to_string(i++) + "]";
        if (!je.contains("trigger") || !je.contains("mutation"))
          throw SchemaError(epath, "effect needs trigger and mutation");
        e.trigger = trigger_from_string(je["trigger"].get<std::string>());
        e.mutation = mutation_from_json(je["mutation"], epath + ".mutation");
        w.effects.push_back(e);
      }
    }
    if (j.contains("children")) {
      int i = 0;
      for (const auto& jc : j["children"])
        w.children.push_back(
            widget_from_json(jc, path + ".children[" + std::to_string(i++) + "]"));
    }
  } catch (const json::exception& e) {
    throw SchemaError(path, e.what());
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path, e.what());
  }
  return w;
}

json state_to_json(const EnvState& s) {
  json j;
  j["screen"] = json{{"w", s.screen_w}, {"h", s.screen_h}};
  j["cell_px"] = s.cell_px;
  j["tick_ms"] = s.tick_ms;
  j["double_click_ms"] = s.double_click_ms;
  j["clock"] = s.clock;
  j["cursor"] = json{{"x", s.cursor_x}, {"y", s.cursor_y}};
  j["focus"] = s.focus;
  j["mouse_down"] = s.mouse_down;
  j["drag_source"] = s.drag_source;
  j["last_click"] = json{{"tick", s.last_click_tick}, {"widget", s.last_click_widget}};
  j["pressed_keys"] = std::vector<std::string>(s.pressed_keys.begin(), s.pressed_keys.end());
  json settings = json::object();
  for (const auto& [k, v] : s.settings) settings[k] = scalar_to_json(v);
  j["settings"] = settings;
  json bindings = json::array();
  for (const auto& b : s.bindings) {
    json jb;
    jb["combo"] = b.combo;
    json muts = json::array();
    for (const auto& m : b.mutations) muts.push_back(mutation_to_json(m));
    jb["mutations"] = muts;
    bindings.push_back(jb);
  }
  j["bindings"] = bindings;
  j["vfs"] = vfs_dir_to_json(s.vfs.root);
  json windows = json::array();
  for (const auto& w : s.windows) windows.push_back(widget_to_json(w));
  j["windows"] = windows;
  return j;
}

EnvState state_from_json(const json& j) {
  if (!j.is_object()) throw SchemaError("initial_state", "must be an object");
  EnvState s;
  try {
    if (j.contains("screen")) {
      s.screen_w = j["screen"].value("w", 800);
      s.screen_h = j["screen"].value("h", 480);
    }
    s.cell_px = j.value("cell_px", 8);
    s.tick_ms = j.value("tick_ms", 100);
    s.double_click_ms = j.value("double_click_ms", 500);
    s.clock = j.value("clock", 0);
    if (j.contains("cursor")) {
      s.cursor_x = j["cursor"].value("x", 0);
      s.cursor_y = j["cursor"].value("y", 0);
    }
    s.focus = j.value("focus", std::string());
    s.mouse_down = j.value("mouse_down", false);
    s.drag_source = j.value("drag_source", std::string());
    if (j.contains("last_click")) {
      s.last_click_tick = j["last_click"].value("tick", int64_t{-1000000});
      s.last_click_widget = j["last_click"].value("widget", std::string());
    }
    if (j.contains("pressed_keys"))
      for (const auto& k : j["pressed_keys"]) s.pressed_keys.insert(k.get<std::string>());
    if (j.contains("settings"))
      for (const auto& [k, v] : j["settings"].items())
        s.settings[k] = scalar_from_json(v);
    if (j.contains("bindings")) {
      int i = 0;
      for (const auto& jb : j["bindings"]) {
        std::string bpath = "bindings[" + std::to_string(i++) + "]";
        KeyBinding b;
        if (!jb.contains("combo")) throw SchemaError(bpath, "binding needs 'combo'");
        b.combo = jb["combo"].get<std::string>();
        if (jb.contains("mutations")) {
          int mi = 0;
          for (const auto& jm : jb["mutations"])
            b.mutations.push_back(
                mutation_from_json(jm, bpath + ".mutations[" + std::to_string(mi++) + "]"));
        }
        s.bindings.push_back(b);
      }
    }
    if (j.contains("vfs")) s.vfs.root = vfs_dir_from_json(j["vfs"], "vfs");
    if (j.contains("windows")) {
      int i = 0;
      for (const auto& jw : j["windows"])
        s.windows.push_back(widget_from_json(jw, "windows[" + std::to_string(i++) + "]"));
    }
  } catch (const json::exception& e) {
    throw SchemaError("initial_state", e.what());
  }
  return s;
}

std::string state_hash(const EnvState& s) { return hash_hex(state_to_json(s).dump()); }

// ---------------------------------------------------------------------------
// Validation

namespace {

void check_widget(const Widget& w, const Widget* parent, const EnvState& s,
                  std::set<std::string>& ids, const std::string& path) {
  if (w.id.empty()) throw SchemaError(path + ".id", "empty widget id");
  if (!ids.insert(w.id).second)
    throw SchemaError(path + ".id", "duplicate widget id '" + w.id + "'");
  if (w.bbox.w <= 0 || w.bbox.h <= 0)
    throw SchemaError(path + ".bbox", "non-positive size");
  auto aligned = [&](int v) { return v % s.cell_px == 0; };
  if (!aligned(w.bbox.x) || !aligned(w.bbox.y) || !aligned(w.bbox.w) || !aligned(w.bbox.h))
    throw SchemaError(path + ".bbox",
                      "not aligned to the " + std::to_string(s.cell_px) + "px cell grid");
  if (parent) {
    // scroll areas hold overflowing content: children may extend below the
    // viewport by up to max_offset, which scrolling brings into view
    Rect limit = parent->bbox;
    if (parent->kind == WidgetKind::ScrollArea)
      limit.h += static_cast<int>(parent->state_int("max_offset", 0));
    if (!limit.contains(w.bbox))
      throw SchemaError(path + ".bbox", "child bbox outside parent '" + parent->id + "'");
  }
  if (w.kind == WidgetKind::Icon && w.icon_id.empty())
    throw SchemaError(path + ".icon_id", "icon widget without icon_id");
  if (w.kind == WidgetKind::ScrollArea) {
    int64_t off = w.state_int("scroll_offset", 0);
    int64_t max = w.state_int("max_offset", 0);
    if (off < 0 || off > max)
      throw SchemaError(path + ".state.scroll_offset",
                        "outside [0, max_offset=" + std::to_string(max) + "]");
  }
  for (size_t i = 0; i < w.children.size(); ++i)
    check_widget(w.children[i], &w, s, ids, path + ".children[" + std::to_string(i) + "]");
}

void check_mutation(const Mutation& m, const EnvState& s, const std::set<std::string>& ids,
                    const std::string& path) {
  switch (m.op) {
    case Mutation::Op::SetSetting:
      // create-on-write: set_setting may introduce new keys
      break;
    case Mutation::Op::AdjustSetting:
    case Mutation::Op::ToggleSetting:
      if (!s.settings.count(m.key))
        throw SchemaError(path, "mutation references unknown setting '" + m.key + "'");
      break;
    case Mutation::Op::OpenWindow:
    case Mutation::Op::CloseWindow:
    case Mutation::Op::SetWidgetText:
    case Mutation::Op::SetWidgetState:
      if (!ids.count(m.widget))
        throw SchemaError(path, "mutation references unknown widget '" + m.widget + "'");
      break;
    case Mutation::Op::MoveFile:
      // file paths are checked when the effect fires; folders move at runtime
      break;
  }
}

void check_mutations(const Widget& w, const EnvState& s, const std::set<std::string>& ids,
                     const std::string& path) {
  for (size_t i = 0; i < w.effects.size(); ++i)
    check_mutation(w.effects[i].mutation, s, ids,
                   path + ".effects[" + std::to_string(i) + "]");
  for (size_t i = 0; i < w.children.size(); ++i)
    check_mutations(w.children[i], s, ids, path + ".children[" + std::to_string(i) + "]");
}

}  // namespace

void validate_state(const EnvState& s) {
  if (s.screen_w <= 0 || s.screen_h <= 0)
    throw SchemaError("screen", "non-positive screen size");
  if (s.cell_px <= 0) throw SchemaError("cell_px", "must be positive");
  if (s.screen_w % s.cell_px != 0 || s.screen_h % s.cell_px != 0)
    throw SchemaError("screen", "screen size must be a multiple of cell_px");
  if (s.cursor_x < 0 || s.cursor_y < 0 || s.cursor_x >= s.screen_w ||
      s.cursor_y >= s.screen_h)
    throw SchemaError("cursor", "cursor outside screen");
  std::set<std::string> ids;
  for (size_t i = 0; i < s.windows.size(); ++i)
    check_widget(s.windows[i], nullptr, s, ids, "windows[" + std::to_string(i) + "]");
  if (!s.focus.empty() && !ids.count(s.focus))
    throw SchemaError("focus", "focused widget '" + s.focus + "' does not exist");
  for (size_t i = 0; i < s.windows.size(); ++i)
    check_mutations(s.windows[i], s, ids, "windows[" + std::to_string(i) + "]");
  for (size_t i = 0; i < s.bindings.size(); ++i)
    for (size_t m = 0; m < s.bindings[i].mutations.size(); ++m)
      check_mutation(s.bindings[i].mutations[m], s, ids,
                     "bindings[" + std::to_string(i) + "].mutations[" + std::to_string(m) + "]");
}

}  // namespace ace::sim
