#pragma once

// Randomized inputs for property tests and the acceptance runner. All
// generators are pure functions of the engine state, so a fixed seed gives a
// fixed input sequence.

#include <random>
#include <string>
#include <vector>

#include "ace/actions.hpp"
#include "ace/gui/document.hpp"
#include "ace/gui/parser.hpp"
#include "ace/sim/desktop.hpp"

namespace ace::testgen {

inline int pick_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<uint64_t>(hi - lo + 1));
}

inline std::string random_text(std::mt19937_64& rng, int max_len) {
  static const std::string alphabet =
      "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
      " .,:!?-_/()[]{}<>@#$%&*+='\\\n\t";
  int len = pick_int(rng, 0, max_len);
  std::string out;
  out.reserve(len);
  for (int i = 0; i < len; ++i)
    out += alphabet[static_cast<size_t>(pick_int(rng, 0, static_cast<int>(alphabet.size()) - 1))];
  return out;
}

inline std::string random_key(std::mt19937_64& rng) {
  const auto& keys = actions::key_table();
  return keys[static_cast<size_t>(pick_int(rng, 0, static_cast<int>(keys.size()) - 1))];
}

inline actions::Action random_action(std::mt19937_64& rng, int w = 800, int h = 480) {
  auto x = [&] { return pick_int(rng, 0, w - 1); };
  auto y = [&] { return pick_int(rng, 0, h - 1); };
  switch (pick_int(rng, 0, 12)) {
    case 0: return actions::MoveTo{x(), y()};
    case 1: return actions::Click{x(), y()};
    case 2: return actions::DoubleClick{x(), y()};
    case 3: return actions::RightClick{x(), y()};
    case 4: return actions::Write{random_text(rng, 24)};
    case 5: {
      actions::Hotkey hk;
      int n = pick_int(rng, 2, 4);
      for (int i = 0; i < n; ++i) hk.keys.push_back(random_key(rng));
      return hk;
    }
    case 6: return actions::Scroll{pick_int(rng, -400, 400)};
    case 7: {
      actions::DragTo d{x(), y(), 0.0};
      int style = pick_int(rng, 0, 2);
      if (style == 1) d.duration = pick_int(rng, 0, 5);
      if (style == 2) d.duration = pick_int(rng, 0, 10) * 0.5;
      return d;
    }
    case 8: return actions::MouseDown{};
    case 9: return actions::MouseUp{};
    case 10: return actions::Press{random_key(rng)};
    case 11: return actions::KeyDown{random_key(rng)};
    default: return actions::KeyUp{random_key(rng)};
  }
}

inline actions::ActionScript random_script(std::mt19937_64& rng, int max_actions = 8,
                                           int w = 800, int h = 480) {
  actions::ActionScript s;
  int n = pick_int(rng, 0, max_actions);
  for (int i = 0; i < n; ++i) s.actions.push_back(random_action(rng, w, h));
  return s;
}

// A small but structurally rich desktop: two windows (one hidden), text
// fields, checkboxes, a scroll area with overflow, icons and a canvas.
inline sim::EnvState demo_state() {
  using namespace sim;
  EnvState s;
  s.settings["volume"] = int64_t{40};
  s.settings["wifi"] = true;
  s.bindings.push_back({"ctrl+s", {Mutation::set_setting("saved", true)}});
  s.vfs.root.dirs.push_back(VfsDir{"docs", {}, {"a.txt", "b.txt"}});
  s.vfs.root.dirs.push_back(VfsDir{"trash", {}, {}});

  Widget main;
  main.id = "w_main";
  main.kind = WidgetKind::Label;
  main.bbox = Rect{0, 0, 480, 320};
  main.text = "Main";

  Widget field;
  field.id = "name_field";
  field.kind = WidgetKind::TextField;
  field.bbox = Rect{16, 16, 160, 16};
  field.text = "abc";
  main.children.push_back(field);

  Widget box;
  box.id = "wifi_box";
  box.kind = WidgetKind::Checkbox;
  box.bbox = Rect{16, 40, 160, 16};
  box.text = "Wi-Fi";
  box.state["checked"] = true;
  box.effects.push_back({Trigger::Toggle, Mutation::toggle_setting("wifi")});
  main.children.push_back(box);

  Widget vol;
  vol.id = "vol_up";
  vol.kind = WidgetKind::Button;
  vol.bbox = Rect{16, 64, 80, 16};
  vol.text = "Vol +";
  vol.effects.push_back({Trigger::Click, Mutation::adjust_setting("volume", 10, 0, 100)});
  main.children.push_back(vol);

  Widget area;
  area.id = "list_area";
  area.kind = WidgetKind::ScrollArea;
  area.bbox = Rect{240, 16, 224, 160};
  area.state["scroll_offset"] = int64_t{0};
  area.state["max_offset"] = int64_t{96};
  for (int i = 0; i < 12; ++i) {
    Widget row;
    row.id = "row" + std::to_string(i);
    row.kind = WidgetKind::Label;
    row.bbox = Rect{240, 16 + i * 16, 200, 16};
    row.text = "item " + std::to_string(i);
    area.children.push_back(row);
  }
  main.children.push_back(area);

  Widget canvas;
  canvas.id = "sketch";
  canvas.kind = WidgetKind::Canvas;
  canvas.bbox = Rect{16, 96, 160, 80};
  canvas.text = "..xx......\n..xx......";
  main.children.push_back(canvas);

  Widget icon;
  icon.id = "doc_icon";
  icon.kind = WidgetKind::Icon;
  icon.bbox = Rect{16, 200, 32, 32};
  icon.icon_id = "file";
  icon.effects.push_back({Trigger::DoubleClick, Mutation::open_window("w_dialog")});
  main.children.push_back(icon);
  s.windows.push_back(main);

  Widget dialog;
  dialog.id = "w_dialog";
  dialog.kind = WidgetKind::Label;
  dialog.bbox = Rect{160, 120, 240, 120};
  dialog.text = "Dialog";
  dialog.state["visible"] = false;
  Widget ok;
  ok.id = "ok_btn";
  ok.kind = WidgetKind::Button;
  ok.bbox = Rect{176, 200, 64, 16};
  ok.text = "OK";
  ok.effects.push_back({Trigger::Click, Mutation::close_window("w_dialog")});
  dialog.children.push_back(ok);
  s.windows.push_back(dialog);
  return s;
}

// Icon templates matching demo_state()'s raster: a 4x4 "file" block and
// 1x1 checkbox cells.
inline gui::IconTemplateSet demo_templates() {
  gui::IconTemplateSet set;
  gui::IconTemplate file;
  file.icon_name = "file";
  file.pattern.assign(4, std::vector<std::string>(4, "file"));
  set.templates.push_back(file);
  gui::IconTemplate on, off;
  on.icon_name = "cb_on";
  on.role = gui::kRoleCheckbox;
  on.pattern = {{"cb_on"}};
  off.icon_name = "cb_off";
  off.role = gui::kRoleCheckbox;
  off.pattern = {{"cb_off"}};
  set.templates.push_back(on);
  set.templates.push_back(off);
  return set;
}

inline gui::Element random_element(std::mt19937_64& rng) {
  using namespace gui;
  static const char* roles[] = {kRoleText,      kRoleIcon,          kRoleButton,
                                kRoleCheckbox,  kRoleScrollbar,     kRoleReferenceLine,
                                kRoleObject};
  Element e;
  e.role = roles[pick_int(rng, 0, 6)];
  e.text = random_text(rng, pick_int(rng, 0, 10));
  if (pick_int(rng, 0, 2) == 0) {
    static const char* names[] = {"file", "folder", "cb_on", "cb_off", "gear"};
    e.icon_name = names[pick_int(rng, 0, 4)];
  }
  e.bbox = Rect{pick_int(rng, 0, 792), pick_int(rng, 0, 472), pick_int(rng, 8, 160),
                pick_int(rng, 8, 120)};
  switch (pick_int(rng, 0, 3)) {
    case 0: e.confidence = 0.5; break;
    case 1: e.confidence = 0.25 * pick_int(rng, 1, 3); break;
    default: e.confidence = 1.0;
  }
  return e;
}

inline gui::UIDocument random_document(std::mt19937_64& rng) {
  gui::UIDocument doc;
  int n_panels = pick_int(rng, 0, 4);
  for (int p = 0; p < n_panels; ++p) {
    gui::Panel panel;
    // names stay single-line (headers do not escape) and unique per document
    // (the diff keys panels by name, matching the parser's output)
    panel.name = "Panel " + std::to_string(p + 1);
    if (pick_int(rng, 0, 3) == 0) {
      static const std::string safe = "abcXYZ ()[]@.'";
      for (int i = 0; i < 3; ++i)
        panel.name += safe[static_cast<size_t>(pick_int(rng, 0, static_cast<int>(safe.size()) - 1))];
    }
    panel.bbox = Rect{pick_int(rng, 0, 400), pick_int(rng, 0, 240), pick_int(rng, 16, 400),
                      pick_int(rng, 16, 240)};
    int n_el = pick_int(rng, 0, 6);
    for (int i = 0; i < n_el; ++i) panel.elements.push_back(random_element(rng));
    if (pick_int(rng, 0, 2) == 0) panel.unclaimed = pick_int(rng, 1, 40);
    doc.panels.push_back(std::move(panel));
  }
  return doc;
}

}  // namespace ace::testgen
