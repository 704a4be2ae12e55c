#pragma once

#include <string>
#include <vector>

#include "ace/util.hpp"

namespace ace::gui {

// Roles are a closed set; see docs/gui-text-format.md.
inline constexpr const char* kRoleText = "text";
inline constexpr const char* kRoleIcon = "icon";
inline constexpr const char* kRoleButton = "button";
inline constexpr const char* kRoleCheckbox = "checkbox";
inline constexpr const char* kRoleScrollbar = "scrollbar";
inline constexpr const char* kRoleReferenceLine = "reference_line";
inline constexpr const char* kRoleObject = "object";

bool is_known_role(const std::string& role);

struct Element {
  std::string role;
  std::string text;
  std::string icon_name;   // empty = absent
  Rect bbox;               // absolute pixels
  double confidence = 1.0;

  bool operator==(const Element&) const = default;
};

struct Panel {
  std::string name;
  Rect bbox;
  std::vector<Element> elements;
  int unclaimed = 0;  // glyph/icon cells in the panel no element covers

  bool operator==(const Panel&) const = default;
};

struct UIDocument {
  std::vector<Panel> panels;
  bool operator==(const UIDocument&) const = default;
};

// Sorts panels by name and elements into reading order (y, x, then the
// remaining fields for a total order). diff/patch and equality checks are
// defined over this form; parse_gui emits panels already canonical inside.
UIDocument canonicalize(UIDocument doc);

// One line per element: "role 'text'[ icon_name] @ (x,y,w,h)[ ~conf]".
// Confidence appears only when < 1. Panel header: "[Name @ (x,y,w,h)]",
// followed by element lines and "unclaimed=N" when N > 0. Panels are
// separated by one blank line. Empty document serializes to "".
std::string serialize(const UIDocument& doc);
std::string serialize_element(const Element& e);
std::string serialize_panel_header(const Panel& p);

// Inverse of serialize; throws std::invalid_argument on malformed input.
UIDocument deserialize(const std::string& text);
Element element_from_line(const std::string& line);

json doc_to_json(const UIDocument& doc);
UIDocument doc_from_json(const json& j);

}  // namespace ace::gui
