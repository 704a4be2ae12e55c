#include "ace/sim/desktop.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ace::sim {

namespace {

// All geometry below works in raster cells; widget bboxes are validated to be
// cell-aligned, and scroll offsets are snapped to the cell grid on mutation.

struct CellRect {
  int x0, y0, x1, y1;  // half-open
  bool empty() const { return x1 <= x0 || y1 <= y0; }
};

CellRect to_cells(const Rect& r, int cell_px, int dy_px) {
  return CellRect{r.x / cell_px, (r.y + dy_px) / cell_px, (r.x + r.w) / cell_px,
                  (r.y + r.h + dy_px) / cell_px};
}

CellRect intersect(const CellRect& a, const CellRect& b) {
  return CellRect{std::max(a.x0, b.x0), std::max(a.y0, b.y0), std::min(a.x1, b.x1),
                  std::min(a.y1, b.y1)};
}

void fill_rect(SymbolicRaster& r, const CellRect& c, const Cell& cell) {
  for (int y = std::max(0, c.y0); y < std::min(r.height, c.y1); ++y)
    for (int x = std::max(0, c.x0); x < std::min(r.width, c.x1); ++x)
      r.at(x, y) = cell;
}

void draw_text(SymbolicRaster& r, const CellRect& clip, int cx, int cy,
               const std::string& text) {
  if (cy < clip.y0 || cy >= clip.y1 || cy < 0 || cy >= r.height) return;
  int x = cx;
  for (char ch : text) {
    if (x >= clip.x1 || x >= r.width) break;
    if (x >= clip.x0 && x >= 0) r.at(x, cy) = Cell{CellKind::Glyph, std::string(1, ch)};
    ++x;
  }
}

int scroll_shift_px(const Widget& w) {
  return w.kind == WidgetKind::ScrollArea
             ? -static_cast<int>(w.state_int("scroll_offset", 0))
             : 0;
}

void render_widget(SymbolicRaster& r, const EnvState& s, const Widget& w,
                   const CellRect& clip, int dy_px, bool is_root) {
  if (!w.visible()) return;
  CellRect box = intersect(to_cells(w.bbox, s.cell_px, dy_px), clip);
  if (box.empty()) return;
  int cy = (w.bbox.y + dy_px) / s.cell_px;
  int cx = w.bbox.x / s.cell_px;
  if (is_root) fill_rect(r, box, Cell{CellKind::Fill, "window"});
  switch (w.kind) {
    case WidgetKind::Button:
      fill_rect(r, box, Cell{CellKind::Fill, "button"});
      draw_text(r, box, cx, cy, w.text);
      break;
    case WidgetKind::TextField: {
      fill_rect(r, box, Cell{CellKind::Fill, "field"});
      std::string shown = w.text;
      if (s.focus == w.id) shown += '_';
      draw_text(r, box, cx, cy, shown);
      break;
    }
    case WidgetKind::Checkbox:
      if (cy >= box.y0 && cy < box.y1 && cx >= box.x0 && cx < box.x1)
        r.at(cx, cy) = Cell{CellKind::Icon, w.checked() ? "cb_on" : "cb_off"};
      draw_text(r, box, cx + 2, cy, w.text);
      break;
    case WidgetKind::MenuItem:
      fill_rect(r, box, Cell{CellKind::Fill, "menu"});
      draw_text(r, box, cx, cy, w.text);
      break;
    case WidgetKind::ScrollArea:
      fill_rect(r, box, Cell{CellKind::Fill, "panel"});
      break;
    case WidgetKind::Icon:
      // no caption glyphs: the icon block must stay a clean template match
      fill_rect(r, box, Cell{CellKind::Icon, w.icon_id});
      break;
    case WidgetKind::Label:
      draw_text(r, box, cx, cy, w.text);
      break;
    case WidgetKind::Canvas: {
      fill_rect(r, box, Cell{CellKind::Fill, "canvas"});
      auto rows = split(w.text, '\n');
      for (size_t row = 0; row < rows.size(); ++row) {
        int y = cy + static_cast<int>(row);
        if (y < box.y0 || y >= box.y1) continue;
        for (size_t col = 0; col < rows[row].size(); ++col) {
          int x = cx + static_cast<int>(col);
          if (x < box.x0 || x >= box.x1) continue;
          char ch = rows[row][col];
          if (ch != '.') r.at(x, y) = Cell{CellKind::Fill, std::string(1, ch)};
        }
      }
      break;
    }
  }
  if (is_root) {
    fill_rect(r, intersect(CellRect{box.x0, cy, box.x1, cy + 1}, box),
              Cell{CellKind::Fill, "titlebar"});
    draw_text(r, box, cx, cy, w.text.empty() ? w.id : w.text);
  }
  int child_dy = dy_px + scroll_shift_px(w);
  for (const auto& c : w.children) render_widget(r, s, c, box, child_dy, false);
  if (w.kind == WidgetKind::ScrollArea)
    fill_rect(r, intersect(CellRect{box.x1 - 1, box.y0, box.x1, box.y1}, box),
              Cell{CellKind::Fill, "scrollbar"});
}

// Collects ids root-first along the deepest hit chain under (px, py).
bool hit_widget(const EnvState& s, const Widget& w, int px, int py, int dy_px,
                std::vector<std::string>& path) {
  if (!w.visible()) return false;
  Rect eff{w.bbox.x, w.bbox.y + dy_px, w.bbox.w, w.bbox.h};
  if (!eff.contains(px, py)) return false;
  path.push_back(w.id);
  int child_dy = dy_px + scroll_shift_px(w);
  for (auto it = w.children.rbegin(); it != w.children.rend(); ++it)
    if (hit_widget(s, *it, px, py, child_dy, path)) return true;
  return true;
}

std::vector<std::string> hit_path(const EnvState& s, int x, int y) {
  std::vector<std::string> path;
  for (auto it = s.windows.rbegin(); it != s.windows.rend(); ++it)
    if (hit_widget(s, *it, x, y, 0, path)) return path;
  return {};
}

// ---------------------------------------------------------------------------
// Windows-level helpers for execute

Widget* find_window_root(EnvState& s, const std::string& id) {
  auto contains_id = [](const Widget& w, const std::string& target) {
    std::vector<const Widget*> stack{&w};
    while (!stack.empty()) {
      const Widget* cur = stack.back();
      stack.pop_back();
      if (cur->id == target) return true;
      for (const auto& c : cur->children) stack.push_back(&c);
    }
    return false;
  };
  for (auto& w : s.windows)
    if (contains_id(w, id)) return &w;
  return nullptr;
}

int snap_down(int v, int cell_px) { return v - v % cell_px; }

std::string scalar_brief(const Scalar& v) { return scalar_to_string(v); }

// Applies one mutation; returns "" on success, an error message otherwise.
// `note` receives a short human-readable description of what changed.
std::string apply_mutation(EnvState& s, const Mutation& m, std::string& note) {
  switch (m.op) {
    case Mutation::Op::SetSetting:
      s.settings[m.key] = m.value;
      note = "set " + m.key + "=" + scalar_brief(m.value);
      return "";
    case Mutation::Op::AdjustSetting: {
      auto it = s.settings.find(m.key);
      if (it == s.settings.end()) return "unknown setting '" + m.key + "'";
      double cur = 0;
      if (std::holds_alternative<int64_t>(it->second))
        cur = static_cast<double>(std::get<int64_t>(it->second));
      else if (std::holds_alternative<double>(it->second))
        cur = std::get<double>(it->second);
      else
        return "setting '" + m.key + "' is not numeric";
      double next = std::clamp(cur + m.delta, m.min, m.max);
      if (std::holds_alternative<int64_t>(it->second))
        it->second = static_cast<int64_t>(std::llround(next));
      else
        it->second = next;
      note = "adjust " + m.key + " -> " + scalar_brief(it->second);
      return "";
    }
    case Mutation::Op::ToggleSetting: {
      auto it = s.settings.find(m.key);
      if (it == s.settings.end()) return "unknown setting '" + m.key + "'";
      if (!std::holds_alternative<bool>(it->second))
        return "setting '" + m.key + "' is not boolean";
      it->second = !std::get<bool>(it->second);
      note = "toggle " + m.key + "=" + scalar_brief(it->second);
      return "";
    }
    case Mutation::Op::OpenWindow: {
      Widget* root = find_window_root(s, m.widget);
      if (!root) return "unknown window '" + m.widget + "'";
      root->state["visible"] = true;
      // raise to top of the z-order
      size_t idx = static_cast<size_t>(root - s.windows.data());
      std::rotate(s.windows.begin() + idx, s.windows.begin() + idx + 1, s.windows.end());
      note = "open " + m.widget;
      return "";
    }
    case Mutation::Op::CloseWindow: {
      Widget* root = find_window_root(s, m.widget);
      if (!root) return "unknown window '" + m.widget + "'";
      root->state["visible"] = false;
      if (!s.focus.empty()) {
        std::vector<const Widget*> stack{root};
        while (!stack.empty()) {
          const Widget* cur = stack.back();
          stack.pop_back();
          if (cur->id == s.focus) {
            s.focus.clear();
            break;
          }
          for (const auto& c : cur->children) stack.push_back(&c);
        }
      }
      note = "close " + m.widget;
      return "";
    }
    case Mutation::Op::MoveFile: {
      std::string err = s.vfs.move_file(m.src, m.dst);
      if (!err.empty()) return err;
      note = "move " + m.src + " -> " + m.dst;
      return "";
    }
    case Mutation::Op::SetWidgetText: {
      Widget* w = s.find_widget(m.widget);
      if (!w) return "unknown widget '" + m.widget + "'";
      w->text = m.text;
      note = "text " + m.widget;
      return "";
    }
    case Mutation::Op::SetWidgetState: {
      Widget* w = s.find_widget(m.widget);
      if (!w) return "unknown widget '" + m.widget + "'";
      w->state[m.key] = m.value;
      if (w->kind == WidgetKind::ScrollArea && m.key == "scroll_offset") {
        int64_t max = w->state_int("max_offset", 0);
        int64_t off = std::clamp(w->state_int("scroll_offset", 0), int64_t{0}, max);
        w->state["scroll_offset"] =
            static_cast<int64_t>(snap_down(static_cast<int>(off), s.cell_px));
      }
      note = "state " + m.widget + "." + m.key;
      return "";
    }
  }
  return "unhandled mutation";
}

struct Executor {
  EnvState st;
  ExecReport report;
  DispatchResult* cur = nullptr;

  void append_detail(const std::string& d) {
    if (d.empty()) return;
    if (!cur->detail.empty()) cur->detail += "; ";
    cur->detail += d;
  }

  void apply(const Mutation& m) {
    std::string note;
    std::string err = apply_mutation(st, m, note);
    append_detail(err.empty() ? note : "error: " + err);
  }

  // Effects are copied before firing: a mutation may reorder or edit the
  // widget tree and invalidate the pointer we fetched them through.
  void fire(const std::string& widget_id, Trigger trigger) {
    const Widget* w = st.find_widget(widget_id);
    if (!w) return;
    std::vector<Mutation> muts;
    for (const auto& e : w->effects)
      if (e.trigger == trigger) muts.push_back(e.mutation);
    for (const auto& m : muts) apply(m);
  }

  void set_focus(const std::string& id) {
    if (st.focus == id) return;
    std::string old = st.focus;
    st.focus = id;
    if (!old.empty()) {
      const Widget* prev = st.find_widget(old);
      if (prev && prev->kind == WidgetKind::TextField) fire(old, Trigger::TextCommit);
    }
  }

  std::string hit(int x, int y) {
    auto path = hit_path(st, x, y);
    return path.empty() ? std::string() : path.back();
  }

  static bool has_trigger(const Widget* w, Trigger t) {
    if (!w) return false;
    for (const auto& e : w->effects)
      if (e.trigger == t) return true;
    return false;
  }

  void do_click(int x, int y) {
    st.cursor_x = x;
    st.cursor_y = y;
    std::string id = hit(x, y);
    cur->target = id;
    // Click pairing applies only where a double-click means something;
    // plain buttons fire on every click, however fast.
    bool dbl = !id.empty() && id == st.last_click_widget &&
               has_trigger(st.find_widget(id), Trigger::DoubleClick) &&
               (st.clock - st.last_click_tick) * st.tick_ms <= st.double_click_ms;
    if (dbl) {
      st.last_click_tick = -1000000;
      st.last_click_widget.clear();
    } else {
      st.last_click_tick = st.clock;
      st.last_click_widget = id;
    }
    if (id.empty()) {
      set_focus("");
      cur->outcome = "no_target";
      return;
    }
    const Widget* w = st.find_widget(id);
    set_focus(w && w->kind == WidgetKind::TextField ? id : "");
    if (w && w->kind == WidgetKind::Checkbox) {
      Widget* mut = st.find_widget(id);
      mut->state["checked"] = !mut->checked();
      append_detail("checked=" + std::string(mut->checked() ? "true" : "false"));
      fire(id, Trigger::Toggle);
    }
    fire(id, dbl ? Trigger::DoubleClick : Trigger::Click);
    cur->outcome = dbl ? "double_click" : "click";
  }

  void operator()(const actions::MoveTo& a) {
    st.cursor_x = a.x;
    st.cursor_y = a.y;
    cur->outcome = "move";
  }

  void operator()(const actions::Click& a) { do_click(a.x, a.y); }

  void operator()(const actions::DoubleClick& a) {
    // behaves exactly like two clicks landing inside the double-click window
    do_click(a.x, a.y);
    std::string first = cur->outcome;
    do_click(a.x, a.y);
    if (cur->outcome == "click") cur->outcome = first;  // keep "no_target" visible
  }

  void operator()(const actions::RightClick& a) {
    st.cursor_x = a.x;
    st.cursor_y = a.y;
    std::string id = hit(a.x, a.y);
    cur->target = id;
    if (id.empty()) {
      cur->outcome = "no_target";
      return;
    }
    fire(id, Trigger::RightClick);
    cur->outcome = "right_click";
  }

  void operator()(const actions::Write& a) {
    if (st.focus.empty()) {
      cur->outcome = "no_target";
      return;
    }
    Widget* w = st.find_widget(st.focus);
    if (!w || w->kind != WidgetKind::TextField) {
      cur->outcome = "no_target";
      return;
    }
    cur->target = st.focus;
    w->text += a.text;
    cur->outcome = "write";
  }

  bool run_binding(const std::string& combo) {
    for (const auto& b : st.bindings)
      if (b.combo == combo) {
        for (const auto& m : b.mutations) apply(m);
        return true;
      }
    return false;
  }

  void operator()(const actions::Hotkey& a) {
    std::string combo;
    for (const auto& k : a.keys) {
      if (!combo.empty()) combo += '+';
      combo += k;
    }
    cur->target = combo;
    cur->outcome = run_binding(combo) ? "binding" : "no_target";
  }

  void operator()(const actions::Press& a) {
    if (!st.focus.empty()) {
      Widget* w = st.find_widget(st.focus);
      if (w && w->kind == WidgetKind::TextField) {
        cur->target = st.focus;
        if (a.key == "enter") {
          fire(st.focus, Trigger::TextCommit);
          cur->outcome = "commit";
          return;
        }
        if (a.key.size() == 1 &&
            ((a.key[0] >= 'a' && a.key[0] <= 'z') || (a.key[0] >= '0' && a.key[0] <= '9'))) {
          w->text += a.key;
          cur->outcome = "type";
          return;
        }
        cur->target.clear();
      }
    }
    cur->target = a.key;
    cur->outcome = run_binding(a.key) ? "binding" : "no_target";
  }

  void operator()(const actions::Scroll& a) {
    auto path = hit_path(st, st.cursor_x, st.cursor_y);
    Widget* area = nullptr;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      Widget* w = st.find_widget(*it);
      if (w && w->kind == WidgetKind::ScrollArea) {
        area = w;
        break;
      }
    }
    if (!area) {
      cur->outcome = "no_target";
      return;
    }
    cur->target = area->id;
    int64_t max = area->state_int("max_offset", 0);
    // scroll(-N) scrolls down: content moves up, offset grows
    int64_t next = std::clamp(area->state_int("scroll_offset", 0) - a.amount, int64_t{0}, max);
    area->state["scroll_offset"] =
        static_cast<int64_t>(snap_down(static_cast<int>(next), st.cell_px));
    append_detail("offset=" + std::to_string(area->state_int("scroll_offset", 0)));
    cur->outcome = "scroll";
  }

  void operator()(const actions::DragTo& a) {
    st.cursor_x = a.x;
    st.cursor_y = a.y;
    if (!st.mouse_down) {
      cur->outcome = "move";
      return;
    }
    auto path = hit_path(st, a.x, a.y);
    if (path.empty()) {
      cur->outcome = "no_target";
      return;
    }
    // the drop lands on the deepest widget that accepts drops; content
    // widgets inside a drop zone must not swallow it
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      if (has_trigger(st.find_widget(*it), Trigger::DragDrop)) {
        cur->target = *it;
        append_detail("source=" + (st.drag_source.empty() ? "-" : st.drag_source));
        fire(*it, Trigger::DragDrop);
        cur->outcome = "drag_drop";
        return;
      }
    }
    cur->target = path.back();
    cur->outcome = "drop_ignored";
  }

  void operator()(const actions::MouseDown&) {
    st.mouse_down = true;
    st.drag_source = hit(st.cursor_x, st.cursor_y);
    cur->target = st.drag_source;
    cur->outcome = "mouse_down";
  }

  void operator()(const actions::MouseUp&) {
    st.mouse_down = false;
    st.drag_source.clear();
    cur->outcome = "mouse_up";
  }

  void operator()(const actions::KeyDown& a) {
    st.pressed_keys.insert(a.key);
    cur->target = a.key;
    cur->outcome = "key_down";
  }

  void operator()(const actions::KeyUp& a) {
    st.pressed_keys.erase(a.key);
    cur->target = a.key;
    cur->outcome = "key_up";
  }
};

}  // namespace

std::pair<EnvState, ExecReport> execute(const EnvState& state,
                                        const actions::ActionScript& script) {
  auto violations = actions::validate(script, state.screen_w, state.screen_h);
  for (const auto& v : violations)
    if (v.kind == actions::Violation::Kind::OutOfBounds)
      throw OutOfBoundsError("action " + std::to_string(v.action_index) +
                             " targets a point outside the " +
                             std::to_string(state.screen_w) + "x" +
                             std::to_string(state.screen_h) + " screen");

  Executor ex{state, {}, nullptr};
  for (size_t i = 0; i < script.actions.size(); ++i) {
    ex.st.clock += 1;
    ex.report.results.push_back(DispatchResult{static_cast<int>(i),
                                               actions::render(script.actions[i]), "", "", ""});
    ex.cur = &ex.report.results.back();
    std::visit(ex, script.actions[i]);
  }
  return {std::move(ex.st), std::move(ex.report)};
}

SymbolicRaster render(const EnvState& s) {
  SymbolicRaster r;
  r.cell_px = s.cell_px;
  r.width = s.screen_w / s.cell_px;
  r.height = s.screen_h / s.cell_px;
  r.cells.assign(static_cast<size_t>(r.width) * r.height, Cell{CellKind::Fill, "desktop"});
  CellRect screen{0, 0, r.width, r.height};
  for (const auto& w : s.windows) render_widget(r, s, w, screen, 0, true);
  return r;
}

std::string hit_test(const EnvState& s, int x, int y) {
  auto path = hit_path(s, x, y);
  return path.empty() ? std::string() : path.back();
}

namespace {

void collect_panels(const Widget& w, std::vector<PanelMeta>& out) {
  if (!w.visible()) return;
  if (w.kind == WidgetKind::ScrollArea || w.kind == WidgetKind::Canvas) {
    PanelMeta m;
    // canvas text is cell content, not a caption, so canvases go by id
    m.name = (w.kind == WidgetKind::Canvas || w.text.empty()) ? w.id : w.text;
    m.bbox = w.bbox;
    for (const auto& c : w.children) collect_panels(c, m.children);
    out.push_back(std::move(m));
    return;
  }
  for (const auto& c : w.children) collect_panels(c, out);
}

}  // namespace

Observation observe(const EnvState& s) {
  Observation obs;
  for (const auto& w : s.windows) {
    if (!w.visible()) continue;
    PanelMeta m;
    m.name = w.text.empty() ? w.id : w.text;
    m.bbox = w.bbox;
    for (const auto& c : w.children) collect_panels(c, m.children);
    obs.metadata.push_back(std::move(m));
  }
  obs.raster = render(s);
  return obs;
}

EnvState load_task(const json& task_doc) {
  if (!task_doc.is_object() || !task_doc.contains("initial_state"))
    throw SchemaError("initial_state", "task document has no initial_state");
  EnvState s = state_from_json(task_doc["initial_state"]);
  validate_state(s);
  return s;
}

// ---------------------------------------------------------------------------
// JSON forms

std::string cell_encode(const Cell& c) {
  switch (c.kind) {
    case CellKind::Fill: return "f:" + c.value;
    case CellKind::Glyph: return "g:" + c.value;
    case CellKind::Icon: return "i:" + c.value;
  }
  return "f:" + c.value;
}

Cell cell_decode(const std::string& s) {
  if (s.size() < 2 || s[1] != ':') throw SchemaError("cell", "bad cell '" + s + "'");
  Cell c;
  c.value = s.substr(2);
  switch (s[0]) {
    case 'f': c.kind = CellKind::Fill; break;
    case 'g': c.kind = CellKind::Glyph; break;
    case 'i': c.kind = CellKind::Icon; break;
    default: throw SchemaError("cell", "bad cell prefix '" + s + "'");
  }
  return c;
}

json raster_to_json(const SymbolicRaster& r) {
  json j;
  j["width"] = r.width;
  j["height"] = r.height;
  j["cell_px"] = r.cell_px;
  json rows = json::array();
  for (int y = 0; y < r.height; ++y) {
    json row = json::array();
    for (int x = 0; x < r.width; ++x) row.push_back(cell_encode(r.at(x, y)));
    rows.push_back(std::move(row));
  }
  j["rows"] = rows;
  return j;
}

SymbolicRaster raster_from_json(const json& j) {
  SymbolicRaster r;
  try {
    r.width = j.at("width").get<int>();
    r.height = j.at("height").get<int>();
    r.cell_px = j.value("cell_px", 8);
    if (r.width <= 0 || r.height <= 0) throw SchemaError("raster", "non-positive size");
    r.cells.assign(static_cast<size_t>(r.width) * r.height, Cell{});
    const json& rows = j.at("rows");
    if (static_cast<int>(rows.size()) != r.height)
      throw SchemaError("raster.rows", "row count mismatch");
    for (int y = 0; y < r.height; ++y) {
      const json& row = rows[y];
      if (static_cast<int>(row.size()) != r.width)
        throw SchemaError("raster.rows", "column count mismatch in row " + std::to_string(y));
      for (int x = 0; x < r.width; ++x) r.at(x, y) = cell_decode(row[x].get<std::string>());
    }
  } catch (const json::exception& e) {
    throw SchemaError("raster", e.what());
  }
  return r;
}

std::string raster_hash(const SymbolicRaster& r) {
  std::string buf;
  buf.reserve(r.cells.size() * 4);
  buf += std::to_string(r.width);
  buf += 'x';
  buf += std::to_string(r.height);
  buf += '@';
  buf += std::to_string(r.cell_px);
  for (const auto& c : r.cells) {
    buf += '|';
    buf += cell_encode(c);
  }
  return hash_hex(buf);
}

json panel_meta_to_json(const PanelMeta& m) {
  json j;
  j["name"] = m.name;
  j["bbox"] = rect_to_json(m.bbox);
  json children = json::array();
  for (const auto& c : m.children) children.push_back(panel_meta_to_json(c));
  j["children"] = children;
  return j;
}

PanelMeta panel_meta_from_json(const json& j) {
  PanelMeta m;
  try {
    m.name = j.at("name").get<std::string>();
    m.bbox = rect_from_json(j.at("bbox"));
    if (j.contains("children"))
      for (const auto& c : j["children"]) m.children.push_back(panel_meta_from_json(c));
  } catch (const json::exception& e) {
    throw SchemaError("metadata", e.what());
  }
  return m;
}

json observation_to_json(const Observation& o) {
  json j;
  json meta = json::array();
  for (const auto& m : o.metadata) meta.push_back(panel_meta_to_json(m));
  j["metadata"] = meta;
  j["raster"] = raster_to_json(o.raster);
  return j;
}

Observation observation_from_json(const json& j) {
  Observation o;
  try {
    for (const auto& m : j.at("metadata")) o.metadata.push_back(panel_meta_from_json(m));
    o.raster = raster_from_json(j.at("raster"));
  } catch (const json::exception& e) {
    throw SchemaError("observation", e.what());
  }
  return o;
}

json report_to_json(const ExecReport& r) {
  json arr = json::array();
  for (const auto& d : r.results) {
    json j;
    j["index"] = d.index;
    j["action"] = d.action;
    j["target"] = d.target;
    j["outcome"] = d.outcome;
    j["detail"] = d.detail;
    arr.push_back(j);
  }
  return json{{"results", arr}};
}

ExecReport report_from_json(const json& j) {
  ExecReport r;
  try {
    for (const auto& d : j.at("results")) {
      DispatchResult res;
      res.index = d.at("index").get<int>();
      res.action = d.at("action").get<std::string>();
      res.target = d.value("target", std::string());
      res.outcome = d.at("outcome").get<std::string>();
      res.detail = d.value("detail", std::string());
      r.results.push_back(std::move(res));
    }
  } catch (const json::exception& e) {
    throw SchemaError("report", e.what());
  }
  return r;
}

}  // namespace ace::sim
