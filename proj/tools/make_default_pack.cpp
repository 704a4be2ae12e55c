// Emits the bundled "default" task pack: ten tasks (two per category), the
// icon templates the GUI parser needs, per-task scripted-backend rule files,
// and goldens.json with one golden action script per task. Golden rasters
// are baked afterwards with ace_packgen, which also verifies the result.
//
// Everything the pack promises is checked here at generation time: states
// pass validate_state, outlines parse, critic replies parse, golden scripts
// parse, and predicate goals really hold after the golden run.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <vector>

#include "ace/actions.hpp"
#include "ace/critic/critic.hpp"
#include "ace/eval/task.hpp"
#include "ace/plan/planner.hpp"
#include "ace/sim/desktop.hpp"

namespace fs = std::filesystem;
using namespace ace;
using sim::Effect;
using sim::Mutation;
using sim::Trigger;
using sim::Widget;
using sim::WidgetKind;

namespace {

// ---------------------------------------------------------------------------
// Small state-building helpers

Widget widget(std::string id, WidgetKind kind, Rect bbox, std::string text = "") {
  Widget w;
  w.id = std::move(id);
  w.kind = kind;
  w.bbox = bbox;
  w.text = std::move(text);
  return w;
}

Widget label(std::string id, Rect bbox, std::string text) {
  return widget(std::move(id), WidgetKind::Label, bbox, std::move(text));
}

Widget button(std::string id, Rect bbox, std::string text,
              std::vector<Mutation> on_click) {
  Widget w = widget(std::move(id), WidgetKind::Button, bbox, std::move(text));
  for (auto& m : on_click) w.effects.push_back(Effect{Trigger::Click, std::move(m)});
  return w;
}

Widget checkbox(std::string id, Rect bbox, std::string text, bool checked,
                std::string setting) {
  Widget w = widget(std::move(id), WidgetKind::Checkbox, bbox, std::move(text));
  w.state["checked"] = checked;
  w.effects.push_back(Effect{Trigger::Toggle, Mutation::toggle_setting(std::move(setting))});
  return w;
}

Widget icon(std::string id, Rect bbox, std::string icon_id,
            std::vector<Mutation> on_drop = {}) {
  Widget w = widget(std::move(id), WidgetKind::Icon, bbox);
  w.icon_id = std::move(icon_id);
  for (auto& m : on_drop) w.effects.push_back(Effect{Trigger::DragDrop, std::move(m)});
  return w;
}

Widget text_field(std::string id, Rect bbox, std::string text = "") {
  return widget(std::move(id), WidgetKind::TextField, bbox, std::move(text));
}

Widget window(std::string id, Rect bbox, std::string title,
              std::vector<Widget> children) {
  Widget w = widget(std::move(id), WidgetKind::Label, bbox, std::move(title));
  w.state["visible"] = true;
  w.children = std::move(children);
  return w;
}

sim::EnvState base_state(std::vector<Widget> windows) {
  sim::EnvState s;
  s.windows = std::move(windows);
  return s;
}

// Pixel centre of a widget's bbox, for click targets.
int cx(const Rect& r) { return r.x + r.w / 2; }
int cy(const Rect& r) { return r.y + r.h / 2; }

std::string click_on(const Rect& r) {
  return actions::render(actions::Action{actions::Click{cx(r), cy(r)}});
}

// A solid rows x cols canvas pattern of one colour character.
std::string canvas_fill(int rows, int cols, char ch) {
  std::string out;
  for (int r = 0; r < rows; ++r) {
    if (r) out += '\n';
    out += std::string(static_cast<size_t>(cols), ch);
  }
  return out;
}

std::string checker(int rows, int cols, char a, char b) {
  std::string out;
  for (int r = 0; r < rows; ++r) {
    if (r) out += '\n';
    for (int c = 0; c < cols; ++c) out += ((r + c) % 2) ? b : a;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pack assembly

struct TaskDef {
  eval::TaskSpec spec;
  std::string golden;                // golden action script (canonical text)
  std::string raw_outline;           // extract reply (pre-refinement)
  std::string outline;               // refine / query-only reply
  std::vector<std::string> critic;   // one reply per critic call, in order
  std::vector<std::string> actor;    // one reply per actor call, in order
};

eval::GoalAssert setting_is(std::string key, Scalar v) {
  eval::GoalAssert a;
  a.kind = eval::GoalAssert::Kind::SettingEquals;
  a.key = std::move(key);
  a.value = std::move(v);
  return a;
}

eval::GoalAssert file_at(std::string path, bool present) {
  eval::GoalAssert a;
  a.kind = present ? eval::GoalAssert::Kind::FileExists
                   : eval::GoalAssert::Kind::FileMissing;
  a.key = std::move(path);
  return a;
}

eval::GoalChecker predicate(std::vector<eval::GoalAssert> asserts) {
  eval::GoalChecker g;
  g.kind = eval::GoalChecker::Kind::Predicate;
  g.assertions = std::move(asserts);
  return g;
}

eval::GoalChecker pixel_sim(Rect region_px) {
  eval::GoalChecker g;
  g.kind = eval::GoalChecker::Kind::PixelSim;
  g.region = region_px;
  return g;
}

eval::GoalChecker region_eq_metadata() {
  eval::GoalChecker g;
  g.kind = eval::GoalChecker::Kind::RegionEq;
  g.use_metadata_region = true;
  return g;
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    if (!out.empty()) out += '\n';
    out += l;
  }
  return out;
}

// --------------------------- Widget category -------------------------------

TaskDef volume_set() {
  Rect vol_up{288, 160, 80, 16};
  TaskDef t;
  t.spec.id = "widget/volume_set";
  t.spec.category = eval::Category::Widget;
  t.spec.query = "Set the volume to 90";
  t.spec.transcript =
      "Open the Media Panel and look at the volume row. The level starts "
      "at 70. Click the Vol + button once and the level moves to 80. Click "
      "Vol + a second time so it reads 90, then leave the panel alone. Do "
      "not touch the Mute checkbox.";
  t.spec.goal = predicate({setting_is("volume", int64_t{90})});

  sim::EnvState s = base_state({window(
      "w_media", Rect{160, 96, 320, 240}, "Media Panel",
      {label("lbl_vol", Rect{176, 128, 160, 16}, "Volume"),
       button("btn_vol_down", Rect{176, 160, 80, 16}, "Vol -",
              {Mutation::adjust_setting("volume", -10, 0, 100)}),
       button("btn_vol_up", vol_up, "Vol +",
              {Mutation::adjust_setting("volume", +10, 0, 100)}),
       checkbox("chk_mute", Rect{176, 192, 112, 16}, "Mute", false, "muted")})});
  s.settings["volume"] = int64_t{70};
  s.settings["muted"] = false;
  t.spec.initial_state = std::move(s);

  t.golden = join_lines({click_on(vol_up), click_on(vol_up)});
  t.raw_outline =
      "1. Find the volume controls\n"
      "  a. look at the volume row in the Media Panel\n"
      "2. Raise the volume to 90\n"
      "  a. click the Vol + button so the level reaches 80\n"
      "  b. click the Vol + button again so the level reaches 90";
  t.outline =
      "1. Raise the volume to 90\n"
      "  a. click the Vol + button so the level reaches 80\n"
      "  b. click the Vol + button again so the level reaches 90";
  t.critic = {
      "success=true; finished=true; volume is a backend level without an "
      "on-screen meter, the press registered; first raise done",
      "success=true; finished=true; the second press registered; the level "
      "is at the target now"};
  t.actor = {click_on(vol_up), click_on(vol_up)};
  return t;
}

TaskDef timer_toggle() {
  Rect arm{176, 160, 128, 16};
  Rect start{176, 192, 80, 16};
  TaskDef t;
  t.spec.id = "widget/timer_toggle";
  t.spec.category = eval::Category::Widget;
  t.spec.query = "Arm the kitchen timer and start it";
  t.spec.transcript =
      "The timer refuses to run until it is armed. In the Timer Panel, "
      "click the Arm timer checkbox so it shows a tick. Then click the "
      "Start button; the status label on the right switches to Running.";
  t.spec.goal = predicate(
      {setting_is("timer_armed", true), setting_is("timer_running", true)});

  sim::EnvState s = base_state({window(
      "w_timer", Rect{160, 96, 320, 240}, "Timer Panel",
      {label("lbl_timer", Rect{176, 128, 160, 16}, "Kitchen timer"),
       checkbox("chk_arm", arm, "Arm timer", false, "timer_armed"),
       button("btn_start", start, "Start",
              {Mutation::set_setting("timer_running", true),
               Mutation::set_widget_text("lbl_status", "Running")}),
       label("lbl_status", Rect{272, 192, 128, 16}, "Stopped")})});
  s.settings["timer_armed"] = false;
  s.settings["timer_running"] = false;
  t.spec.initial_state = std::move(s);

  t.golden = join_lines({click_on(arm), click_on(start)});
  t.raw_outline =
      "1. Find the Timer Panel\n"
      "  a. locate the Arm timer row\n"
      "2. Arm the timer\n"
      "  a. click the Arm timer checkbox\n"
      "3. Start the countdown\n"
      "  a. click the Start button";
  t.outline =
      "1. Arm the timer\n"
      "  a. click the Arm timer checkbox\n"
      "2. Start the countdown\n"
      "  a. click the Start button";
  // The first actor reply misses the panel entirely; the critic catches it
  // and keeps the cursor on the subtask, then the repeat click lands.
  t.critic = {
      "success=false; finished=false; the click landed on empty desktop and "
      "nothing changed; the arm checkbox is still unchecked",
      "success=true; finished=true; the arm checkbox shows a tick now; "
      "arming is done",
      "success=true; finished=true; the status label reads Running; the "
      "timer is started"};
  t.actor = {"click(600, 400)", click_on(arm), click_on(start)};
  return t;
}

// --------------------------- SysSet category -------------------------------

TaskDef wifi_off() {
  Rect wifi{176, 128, 128, 16};
  TaskDef t;
  t.spec.id = "sysset/wifi_off";
  t.spec.category = eval::Category::SysSet;
  t.spec.query = "Turn off Wi-Fi";
  t.spec.transcript =
      "Settings lists the radio toggles. The Wi-Fi checkbox is ticked, "
      "which means the radio is on. Click that checkbox once; the tick "
      "disappears and wireless is off. Leave Airplane Mode alone.";
  t.spec.goal = predicate({setting_is("wifi", false)});

  sim::EnvState s = base_state({window(
      "w_settings", Rect{160, 96, 320, 240}, "Settings",
      {checkbox("chk_wifi", wifi, "Wi-Fi", true, "wifi"),
       checkbox("chk_airplane", Rect{176, 160, 160, 16}, "Airplane Mode", false,
                "airplane_mode"),
       label("lbl_note", Rect{176, 208, 224, 16}, "Radios apply instantly")})});
  s.settings["wifi"] = true;
  s.settings["airplane_mode"] = false;
  t.spec.initial_state = std::move(s);

  t.golden = click_on(wifi);
  t.raw_outline =
      "1. Open the radio section\n"
      "  a. find the Wi-Fi row in Settings\n"
      "2. Turn Wi-Fi off\n"
      "  a. click the Wi-Fi checkbox so the tick disappears";
  t.outline =
      "1. Turn Wi-Fi off\n"
      "  a. click the Wi-Fi checkbox so the tick disappears";
  t.critic = {
      "success=true; finished=true; the Wi-Fi checkbox lost its tick; "
      "wireless is off"};
  t.actor = {click_on(wifi)};
  return t;
}

TaskDef brightness_up() {
  Rect brighter{288, 160, 96, 16};
  TaskDef t;
  t.spec.id = "sysset/brightness_up";
  t.spec.category = eval::Category::SysSet;
  t.spec.query = "Raise the brightness to 80";
  t.spec.transcript =
      "Display Settings has Dimmer and Brighter buttons under the "
      "Brightness label. Each press of Brighter adds 20, starting from 40. "
      "Press Brighter twice so the level ends up at 80.";
  t.spec.goal = predicate({setting_is("brightness", int64_t{80})});

  sim::EnvState s = base_state({window(
      "w_display", Rect{160, 96, 320, 240}, "Display Settings",
      {label("lbl_bright", Rect{176, 128, 160, 16}, "Brightness"),
       button("btn_dim", Rect{176, 160, 80, 16}, "Dimmer",
              {Mutation::adjust_setting("brightness", -20, 0, 100)}),
       button("btn_brighter", brighter, "Brighter",
              {Mutation::adjust_setting("brightness", +20, 0, 100)})})});
  s.settings["brightness"] = int64_t{40};
  t.spec.initial_state = std::move(s);

  t.golden = join_lines({click_on(brighter), click_on(brighter)});
  t.raw_outline =
      "1. Open Display Settings\n"
      "  a. find the Brightness row\n"
      "2. Raise the brightness to 80\n"
      "  a. click the Brighter button to go from 40 to 60\n"
      "  b. click the Brighter button again to go from 60 to 80";
  t.outline =
      "1. Raise the brightness to 80\n"
      "  a. click the Brighter button to go from 40 to 60\n"
      "  b. click the Brighter button again to go from 60 to 80";
  t.critic = {
      "success=true; finished=true; brightness is a backend level without a "
      "meter in this panel, the press registered; first step done",
      "success=true; finished=true; the second press registered; the level "
      "reached the target"};
  t.actor = {click_on(brighter), click_on(brighter)};
  return t;
}

// -------------------------- FileMani category ------------------------------

TaskDef archive_report() {
  Rect report{112, 128, 32, 32};
  Rect archive{400, 128, 32, 32};
  TaskDef t;
  t.spec.id = "filemani/archive_report";
  t.spec.category = eval::Category::FileMani;
  t.spec.query = "Move report.txt into the archive folder";
  t.spec.transcript =
      "In the Files window the docs area shows two file icons; the left one "
      "is report.txt. Move the pointer onto the report icon and press the "
      "mouse button down to pick it up. Drag to the archive folder on the "
      "right and release; the report icon disappears from docs.";
  t.spec.goal = predicate({file_at("/archive/report.txt", true),
                           file_at("/docs/report.txt", false)});

  sim::EnvState s = base_state({window(
      "w_files", Rect{96, 64, 480, 320}, "Files",
      {label("lbl_docs", Rect{112, 96, 96, 16}, "docs"),
       icon("ico_report", report, "file"),
       label("lbl_report", Rect{112, 168, 64, 16}, "report.txt"),
       icon("ico_notes", Rect{184, 128, 32, 32}, "file"),
       label("lbl_notes", Rect{184, 168, 80, 16}, "notes.txt"),
       icon("ico_archive", archive, "folder",
            {Mutation::move_file("/docs/report.txt", "/archive/report.txt"),
             Mutation::set_widget_state("ico_report", "visible", false),
             Mutation::set_widget_state("lbl_report", "visible", false)}),
       label("lbl_archive", Rect{392, 168, 72, 16}, "archive")})});
  s.vfs.root.dirs.push_back(sim::VfsDir{"archive", {}, {}});
  s.vfs.root.dirs.push_back(sim::VfsDir{"docs", {}, {"notes.txt", "report.txt"}});
  t.spec.initial_state = std::move(s);

  std::string pick = actions::render(actions::ActionScript{
      {actions::MoveTo{cx(report), cy(report)}, actions::MouseDown{}}});
  std::string drop = actions::render(actions::ActionScript{
      {actions::DragTo{cx(archive), cy(archive), 0.0}, actions::MouseUp{}}});
  t.golden = pick + "\n" + drop;
  t.raw_outline =
      "1. Find report.txt in the Files window\n"
      "  a. look at the docs icons on the left\n"
      "2. Pick up the report file\n"
      "  a. move the pointer onto the report icon and press the mouse button "
      "down\n"
      "3. Drop it on the archive folder\n"
      "  a. drag to the archive folder icon and release the mouse button";
  t.outline =
      "1. Pick up the report file\n"
      "  a. move the pointer onto the report icon and press the mouse button "
      "down\n"
      "2. Drop it on the archive folder\n"
      "  a. drag to the archive folder icon and release the mouse button";
  t.critic = {
      "success=true; finished=true; the pointer now holds the report icon, "
      "pickup alone does not repaint the screen; ready to drag",
      "success=true; finished=true; the report icon vanished from docs after "
      "the drop; the file sits in archive now"};
  t.actor = {pick, drop};
  return t;
}

TaskDef delete_draft() {
  Rect draft{112, 128, 32, 32};
  Rect trash{400, 128, 32, 32};
  TaskDef t;
  t.spec.id = "filemani/delete_draft";
  t.spec.category = eval::Category::FileMani;
  t.spec.query = "Throw draft.txt into the trash";
  t.spec.transcript =
      "The Files window shows draft.txt on the left and the trash can on "
      "the right. Drag the draft onto the trash in one motion: move onto "
      "the draft icon, press the mouse button, drag to the trash can, "
      "release. The draft icon disappears.";
  t.spec.goal = predicate(
      {file_at("/trash/draft.txt", true), file_at("/docs/draft.txt", false)});

  sim::EnvState s = base_state({window(
      "w_files", Rect{96, 64, 480, 320}, "Files",
      {label("lbl_docs", Rect{112, 96, 96, 16}, "docs"),
       icon("ico_draft", draft, "file"),
       label("lbl_draft", Rect{112, 168, 80, 16}, "draft.txt"),
       icon("ico_trash", trash, "trash",
            {Mutation::move_file("/docs/draft.txt", "/trash/draft.txt"),
             Mutation::set_widget_state("ico_draft", "visible", false),
             Mutation::set_widget_state("lbl_draft", "visible", false)}),
       label("lbl_trash", Rect{400, 168, 64, 16}, "trash")})});
  s.vfs.root.dirs.push_back(sim::VfsDir{"docs", {}, {"draft.txt"}});
  s.vfs.root.dirs.push_back(sim::VfsDir{"trash", {}, {}});
  t.spec.initial_state = std::move(s);

  t.golden = actions::render(actions::ActionScript{
      {actions::MoveTo{cx(draft), cy(draft)}, actions::MouseDown{},
       actions::DragTo{cx(trash), cy(trash), 0.0}, actions::MouseUp{}}});
  t.raw_outline =
      "1. Find the draft\n"
      "  a. look for draft.txt in the Files window\n"
      "2. Delete the draft\n"
      "  a. drag the draft file onto the trash can in one motion";
  t.outline =
      "1. Delete the draft\n"
      "  a. drag the draft file onto the trash can in one motion";
  t.critic = {
      "success=true; finished=true; the draft icon is gone and the trash "
      "holds the file; the delete is complete"};
  t.actor = {t.golden};
  return t;
}

// --------------------------- Office category -------------------------------

TaskDef report_title() {
  Rect field{112, 128, 320, 16};
  TaskDef t;
  t.spec.id = "office/report_title";
  t.spec.category = eval::Category::Office;
  t.spec.query = "Give the report the title Quarterly Report";
  t.spec.transcript =
      "The Writer window has an empty title line above the body text. "
      "Click the title field so the text cursor appears, type Quarterly "
      "Report, and press enter to commit the heading.";
  t.spec.goal = pixel_sim(field);
  t.spec.threshold = 0.95;

  sim::EnvState s = base_state({window(
      "w_writer", Rect{96, 64, 480, 320}, "Writer",
      {label("lbl_title", Rect{112, 96, 48, 16}, "Title"),
       text_field("fld_title", field),
       label("lbl_body", Rect{112, 160, 48, 16}, "Body"),
       text_field("fld_body", Rect{112, 192, 320, 96},
                  "Quarterly numbers are up.")})});
  t.spec.initial_state = std::move(s);

  std::string type_it = actions::render(actions::ActionScript{
      {actions::Write{"Quarterly Report"}, actions::Press{"enter"}}});
  t.golden = click_on(field) + "\n" + type_it;
  t.raw_outline =
      "1. Open the Writer window\n"
      "  a. find the empty title line\n"
      "2. Focus the title field\n"
      "  a. click the empty title field under the Title label\n"
      "3. Type the heading\n"
      "  a. write Quarterly Report and press enter";
  t.outline =
      "1. Focus the title field\n"
      "  a. click the empty title field under the Title label\n"
      "2. Type the heading\n"
      "  a. write Quarterly Report and press enter";
  t.critic = {
      "success=true; finished=true; the title field shows the text cursor; "
      "the field is focused",
      "success=true; finished=true; the title line reads Quarterly Report; "
      "the heading is committed"};
  t.actor = {click_on(field), type_it};
  return t;
}

TaskDef memo_save() {
  Rect memo{112, 96, 320, 96};
  TaskDef t;
  t.spec.id = "office/memo_save";
  t.spec.category = eval::Category::Office;
  t.spec.query = "Write the memo and save it";
  t.spec.transcript =
      "Notes opens with an empty memo field and a status label reading "
      "Unsaved. Click the memo field, type the line Ship the beta on "
      "Friday, then press ctrl+s. The status label flips to Saved.";
  t.spec.goal = region_eq_metadata();
  t.spec.threshold = 0.95;

  sim::EnvState s = base_state({window(
      "w_notes", Rect{96, 64, 480, 320}, "Notes",
      {text_field("fld_memo", memo),
       label("lbl_status", Rect{112, 208, 160, 16}, "Unsaved"),
       label("lbl_help", Rect{112, 240, 256, 16},
             "Ctrl+S writes the memo to disk")})});
  s.settings["saved"] = false;
  s.bindings.push_back(sim::KeyBinding{
      "ctrl+s",
      {Mutation::set_widget_text("lbl_status", "Saved"),
       Mutation::set_setting("saved", true)}});
  t.spec.initial_state = std::move(s);

  std::string write_it = actions::render(
      actions::Action{actions::Write{"Ship the beta on Friday"}});
  std::string save_it =
      actions::render(actions::Action{actions::Hotkey{{"ctrl", "s"}}});
  t.golden = join_lines({click_on(memo), write_it, save_it});
  t.raw_outline =
      "1. Open the memo\n"
      "  a. look at the Notes window\n"
      "2. Focus the memo field\n"
      "  a. click the big memo field\n"
      "3. Write the memo\n"
      "  a. write the line Ship the beta on Friday\n"
      "4. Save it\n"
      "  a. press the ctrl+s shortcut";
  t.outline =
      "1. Focus the memo field\n"
      "  a. click the big memo field\n"
      "2. Write the memo\n"
      "  a. write the line Ship the beta on Friday\n"
      "3. Save it\n"
      "  a. press the ctrl+s shortcut";
  t.critic = {
      "success=true; finished=true; the memo field shows the text cursor; "
      "the field is focused",
      "success=true; finished=true; the memo text is on screen; the body is "
      "entered",
      "success=true; finished=true; the status label flipped to Saved; the "
      "memo is stored"};
  t.actor = {click_on(memo), write_it, save_it};
  return t;
}

// --------------------------- Design category -------------------------------

TaskDef banner_color() {
  Rect canvas{112, 96, 320, 80};
  Rect red{112, 208, 96, 16};
  TaskDef t;
  t.spec.id = "design/banner_color";
  t.spec.category = eval::Category::Design;
  t.spec.query = "Fill the banner with red";
  t.spec.transcript =
      "Studio shows the banner canvas at the top, blank for now. Below it "
      "sit two fill buttons. Click Fill Red once; the whole canvas turns "
      "solid red. Do not click Fill Blue.";
  t.spec.goal = pixel_sim(canvas);
  t.spec.threshold = 0.9;

  sim::EnvState s = base_state({window(
      "w_studio", Rect{96, 64, 480, 320}, "Studio",
      {widget("cv_banner", WidgetKind::Canvas, canvas),
       button("btn_red", red, "Fill Red",
              {Mutation::set_widget_text("cv_banner", canvas_fill(10, 40, 'r'))}),
       button("btn_blue", Rect{224, 208, 96, 16}, "Fill Blue",
              {Mutation::set_widget_text("cv_banner", canvas_fill(10, 40, 'b'))})})});
  t.spec.initial_state = std::move(s);

  t.golden = click_on(red);
  t.raw_outline =
      "1. Find the fill buttons\n"
      "  a. look below the banner canvas\n"
      "2. Recolor the banner\n"
      "  a. click the Fill Red button";
  t.outline =
      "1. Recolor the banner\n"
      "  a. click the Fill Red button";
  t.critic = {
      "success=true; finished=true; the banner canvas turned solid red; the "
      "recolor is done"};
  t.actor = {click_on(red)};
  return t;
}

TaskDef keyframe_add() {
  Rect preview{112, 96, 320, 80};
  Rect timeline{112, 192, 320, 16};
  Rect addkey{112, 224, 96, 16};
  Rect render_btn{224, 224, 96, 16};
  TaskDef t;
  t.spec.id = "design/keyframe_add";
  t.spec.category = eval::Category::Design;
  t.spec.query = "Add a keyframe and render the preview";
  t.spec.transcript =
      "The Animator window stacks a preview canvas over a timeline strip. "
      "Click Add Key to drop a second key mark onto the timeline, then "
      "click Render; the preview fills with the rendered checker pattern.";
  // one region spanning both canvases (and the quiet band between them)
  t.spec.goal = pixel_sim(Rect{112, 96, 320, 112});
  t.spec.threshold = 0.95;

  sim::EnvState s = base_state({window(
      "w_anim", Rect{96, 64, 480, 320}, "Animator",
      {widget("cv_preview", WidgetKind::Canvas, preview),
       [&] {
         Widget w = widget("cv_timeline", WidgetKind::Canvas, timeline);
         w.text = "k";  // one key mark at the origin
         return w;
       }(),
       button("btn_addkey", addkey, "Add Key",
              {Mutation::set_widget_text("cv_timeline", "k.........k")}),
       button("btn_render", render_btn, "Render",
              {Mutation::set_widget_text("cv_preview", checker(10, 40, 'x', 'o'))})})});
  t.spec.initial_state = std::move(s);

  t.golden = join_lines({click_on(addkey), click_on(render_btn)});
  t.raw_outline =
      "1. Open the Animator\n"
      "  a. find the timeline strip under the preview\n"
      "2. Add the keyframe\n"
      "  a. click the Add Key button\n"
      "3. Render the preview\n"
      "  a. click the Render button";
  t.outline =
      "1. Add the keyframe\n"
      "  a. click the Add Key button\n"
      "2. Render the preview\n"
      "  a. click the Render button";
  t.critic = {
      "success=true; finished=true; a second key mark appeared on the "
      "timeline; the keyframe is placed",
      "success=true; finished=true; the preview filled with the checker "
      "pattern; the render is finished"};
  t.actor = {click_on(addkey), click_on(render_btn)};
  return t;
}

// ---------------------------------------------------------------------------
// Emission

json icon_templates() {
  auto block = [](const std::string& name, int rows, int cols) {
    json pattern = json::array();
    for (int r = 0; r < rows; ++r) {
      json row = json::array();
      for (int c = 0; c < cols; ++c) row.push_back(name);
      pattern.push_back(row);
    }
    return json{{"icon_name", name}, {"role", "icon"}, {"pattern", pattern}};
  };
  json templates = json::array();
  templates.push_back(json{{"icon_name", "cb_on"},
                           {"role", "checkbox"},
                           {"pattern", json::array({json::array({"cb_on"})})}});
  templates.push_back(json{{"icon_name", "cb_off"},
                           {"role", "checkbox"},
                           {"pattern", json::array({json::array({"cb_off"})})}});
  templates.push_back(block("file", 4, 4));
  templates.push_back(block("folder", 4, 4));
  templates.push_back(block("trash", 4, 4));
  return json{{"templates", templates}};
}

json rule(const std::string& pattern, const std::string& reply, int max_uses = -1) {
  json r{{"match", "substring"}, {"pattern", pattern}, {"reply", reply}};
  if (max_uses >= 0) r["max_uses"] = max_uses;
  return r;
}

json backend_rules(const TaskDef& t) {
  json rules = json::array();
  rules.push_back(rule("## PLAN FROM TRANSCRIPT", t.raw_outline));
  rules.push_back(rule("## REFINE PLAN", t.outline));
  rules.push_back(rule("## QUERY-ONLY PLAN", t.outline));
  for (const auto& c : t.critic) rules.push_back(rule("## CRITIC", c, 1));
  for (const auto& a : t.actor) rules.push_back(rule("## NEXT ACTION", a, 1));
  return json{{"rules", rules}};
}

// Everything the pack claims gets exercised before a byte hits disk.
void self_check(const TaskDef& t) {
  sim::validate_state(t.spec.initial_state);
  plan::parse_outline(t.raw_outline).validate();
  plan::PlanTree refined = plan::parse_outline(t.outline);
  refined.validate();
  for (const auto& c : t.critic) critic::parse_critique(c);
  size_t leaves = refined.leaf_count();
  if (t.critic.size() != t.actor.size() || t.actor.size() < leaves)
    throw std::runtime_error(t.spec.id + ": rule counts out of step with the plan");
  actions::ActionScript golden = actions::parse(t.golden);
  for (const auto& a : t.actor) actions::parse(a);
  auto [final_state, report] = sim::execute(t.spec.initial_state, golden);
  for (const auto& r : report.results)
    if (r.detail.rfind("error: ", 0) == 0)
      throw std::runtime_error(t.spec.id + ": golden action failed: " + r.detail);
  if (t.spec.goal.kind == eval::GoalChecker::Kind::Predicate) {
    auto [ok, detail] = eval::check_goal(final_state, t.spec);
    if (!ok) throw std::runtime_error(t.spec.id + ": golden run misses goal: " + detail);
  }
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << content;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_default_pack <pack-dir>\n";
    return 2;
  }
  fs::path root = argv[1];
  try {
    std::vector<TaskDef> defs = {banner_color(),   keyframe_add(), memo_save(),
                                 report_title(),   timer_toggle(), volume_set(),
                                 brightness_up(),  wifi_off(),     archive_report(),
                                 delete_draft()};

    json task_paths = json::array();
    json goldens = json::object();
    for (const TaskDef& t : defs) {
      self_check(t);
      std::string stem = eval::sanitize_task_id(t.spec.id);

      json doc = eval::task_to_json(t.spec);
      if (t.spec.goal.kind != eval::GoalChecker::Kind::Predicate) {
        doc["goal"].erase("golden_raster");
        doc["goal"]["golden"] = "golden/" + stem + ".json";
      }
      write_file(root / "tasks" / (stem + ".json"), doc.dump(2) + "\n");
      write_file(root / "backends" / (stem + ".json"),
                 backend_rules(t).dump(2) + "\n");
      task_paths.push_back("tasks/" + stem + ".json");
      goldens[t.spec.id] = t.golden;
      std::cout << "wrote " << t.spec.id << "\n";
    }

    write_file(root / "pack.json",
               json{{"name", "default"}, {"tasks", task_paths}}.dump(2) + "\n");
    write_file(root / "templates.json", icon_templates().dump(2) + "\n");
    write_file(root / "goldens.json", goldens.dump(2) + "\n");
    std::cout << "pack written to " << root.string() << " (" << defs.size()
              << " tasks); run ace_packgen to bake golden rasters\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
