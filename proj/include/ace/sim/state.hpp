#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ace/util.hpp"

namespace ace::sim {

enum class WidgetKind {
  Button,
  TextField,
  Checkbox,
  MenuItem,
  ScrollArea,
  Icon,
  Label,
  Canvas,
};

std::string kind_to_string(WidgetKind k);
WidgetKind kind_from_string(const std::string& s);

enum class Trigger { Click, DoubleClick, RightClick, Toggle, TextCommit, DragDrop };

std::string trigger_to_string(Trigger t);
Trigger trigger_from_string(const std::string& s);

// Declarative state mutations fired by widget effects and key bindings.
struct Mutation {
  enum class Op {
    SetSetting,      // key, value; create=true allows introducing the key
    AdjustSetting,   // key, delta clamped to [min,max]
    ToggleSetting,   // key (bool)
    OpenWindow,      // widget: window root id; raises to top
    CloseWindow,     // widget: window root id
    MoveFile,        // src -> dst, absolute vfs paths
    SetWidgetText,   // widget, text
    SetWidgetState,  // widget, key, value
  };
  Op op = Op::SetSetting;
  std::string key;
  Scalar value = false;
  double delta = 0.0, min = 0.0, max = 0.0;
  std::string widget;
  std::string text;
  std::string src, dst;

  bool operator==(const Mutation&) const = default;

  static Mutation set_setting(std::string key, Scalar value) {
    Mutation m;
    m.op = Op::SetSetting;
    m.key = std::move(key);
    m.value = std::move(value);
    return m;
  }
  static Mutation adjust_setting(std::string key, double delta, double min, double max) {
    Mutation m;
    m.op = Op::AdjustSetting;
    m.key = std::move(key);
    m.delta = delta;
    m.min = min;
    m.max = max;
    return m;
  }
  static Mutation toggle_setting(std::string key) {
    Mutation m;
    m.op = Op::ToggleSetting;
    m.key = std::move(key);
    return m;
  }
  static Mutation open_window(std::string widget) {
    Mutation m;
    m.op = Op::OpenWindow;
    m.widget = std::move(widget);
    return m;
  }
  static Mutation close_window(std::string widget) {
    Mutation m;
    m.op = Op::CloseWindow;
    m.widget = std::move(widget);
    return m;
  }
  static Mutation move_file(std::string src, std::string dst) {
    Mutation m;
    m.op = Op::MoveFile;
    m.src = std::move(src);
    m.dst = std::move(dst);
    return m;
  }
  static Mutation set_widget_text(std::string widget, std::string text) {
    Mutation m;
    m.op = Op::SetWidgetText;
    m.widget = std::move(widget);
    m.text = std::move(text);
    return m;
  }
  static Mutation set_widget_state(std::string widget, std::string key, Scalar value) {
    Mutation m;
    m.op = Op::SetWidgetState;
    m.widget = std::move(widget);
    m.key = std::move(key);
    m.value = std::move(value);
    return m;
  }
};

struct Effect {
  Trigger trigger = Trigger::Click;
  Mutation mutation;
  bool operator==(const Effect&) const = default;
};

struct Widget {
  std::string id;
  WidgetKind kind = WidgetKind::Label;
  Rect bbox;  // absolute pixels, cell-aligned
  std::string text;
  std::string icon_id;
  std::map<std::string, Scalar> state;
  std::vector<Effect> effects;
  std::vector<Widget> children;

  bool operator==(const Widget&) const = default;

  bool visible() const;
  bool checked() const;
  int64_t state_int(const std::string& key, int64_t fallback = 0) const;
};

struct KeyBinding {
  std::string combo;  // keys joined with '+', e.g. "ctrl+s" or "f5"
  std::vector<Mutation> mutations;
  bool operator==(const KeyBinding&) const = default;
};

// Virtual file system: directories and plain file names.
struct VfsDir {
  std::string name;
  std::vector<VfsDir> dirs;    // kept sorted by name
  std::vector<std::string> files;  // kept sorted
  bool operator==(const VfsDir&) const = default;
};

struct Vfs {
  VfsDir root{"/", {}, {}};
  bool operator==(const Vfs&) const = default;

  bool file_exists(const std::string& path) const;
  bool dir_exists(const std::string& path) const;
  // Moves a file to an absolute destination path; returns an error string on
  // failure, empty on success.
  std::string move_file(const std::string& src, const std::string& dst);
};

struct EnvState {
  int screen_w = 800, screen_h = 480;
  int cell_px = 8;
  int tick_ms = 100;            // logical time per action
  int double_click_ms = 500;
  int64_t clock = 0;            // ticks elapsed
  int cursor_x = 0, cursor_y = 0;
  std::string focus;            // widget id, empty = none
  bool mouse_down = false;
  std::string drag_source;      // widget under cursor at mouseDown
  int64_t last_click_tick = -1000000;
  std::string last_click_widget;
  std::set<std::string> pressed_keys;
  std::map<std::string, Scalar> settings;
  std::vector<KeyBinding> bindings;
  Vfs vfs;
  std::vector<Widget> windows;  // z-order, first = bottom

  bool operator==(const EnvState&) const = default;

  Widget* find_widget(const std::string& id);
  const Widget* find_widget(const std::string& id) const;
};

class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& path, const std::string& detail)
      : std::runtime_error(path + ": " + detail), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

// Canonical serialization: object keys sorted, vfs entries sorted by name.
// Equal states serialize to equal bytes; state_hash hashes that form.
json state_to_json(const EnvState& s);
EnvState state_from_json(const json& j);  // throws SchemaError
std::string state_hash(const EnvState& s);

json widget_to_json(const Widget& w);
Widget widget_from_json(const json& j, const std::string& path);

// Structural checks behind load_task: unique ids, child bboxes inside the
// parent, cell alignment, focus/cursor validity, mutation references.
void validate_state(const EnvState& s);  // throws SchemaError

}  // namespace ace::sim
