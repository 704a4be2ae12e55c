#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ace::actions {

// Raw mouse/keyboard operations in PyAutoGUI-style call syntax.
// Coordinates are non-negative pixels; key names come from key_table().

struct MoveTo {
  int x = 0, y = 0;
  bool operator==(const MoveTo&) const = default;
};
struct Click {
  int x = 0, y = 0;
  bool operator==(const Click&) const = default;
};
struct DoubleClick {
  int x = 0, y = 0;
  bool operator==(const DoubleClick&) const = default;
};
struct RightClick {
  int x = 0, y = 0;
  bool operator==(const RightClick&) const = default;
};
struct Write {
  std::string text;
  bool operator==(const Write&) const = default;
};
struct Hotkey {
  std::vector<std::string> keys;  // at least two
  bool operator==(const Hotkey&) const = default;
};
struct Scroll {
  int amount = 0;  // negative scrolls down
  bool operator==(const Scroll&) const = default;
};
struct DragTo {
  int x = 0, y = 0;
  double duration = 0.0;  // seconds, >= 0
  bool operator==(const DragTo&) const = default;
};
struct MouseDown {
  bool operator==(const MouseDown&) const = default;
};
struct MouseUp {
  bool operator==(const MouseUp&) const = default;
};
struct Press {
  std::string key;
  bool operator==(const Press&) const = default;
};
struct KeyDown {
  std::string key;
  bool operator==(const KeyDown&) const = default;
};
struct KeyUp {
  std::string key;
  bool operator==(const KeyUp&) const = default;
};

using Action = std::variant<MoveTo, Click, DoubleClick, RightClick, Write, Hotkey,
                            Scroll, DragTo, MouseDown, MouseUp, Press, KeyDown, KeyUp>;

struct ActionScript {
  std::vector<Action> actions;
  bool operator==(const ActionScript&) const = default;
  bool empty() const { return actions.empty(); }
  size_t size() const { return actions.size(); }
};

class ParseError : public std::runtime_error {
 public:
  enum class Kind { UnknownAction, ArityMismatch, BadLiteral, UnbalancedQuote };

  ParseError(Kind kind, size_t pos, const std::string& detail);
  Kind kind() const { return kind_; }
  size_t pos() const { return pos_; }  // byte offset in the stripped input

 private:
  Kind kind_;
  size_t pos_;
};

// Parses one or more newline- or semicolon-separated action calls.
// Surrounding whitespace and code-fence markers are stripped first, so
// LLM replies wrapped in markdown parse the same as bare scripts.
ActionScript parse(const std::string& text);

// Canonical printer: one action per line, parse(render(s)) == s.
std::string render(const ActionScript& script);
std::string render(const Action& action);

struct Violation {
  enum class Kind { OutOfBounds, UnknownKey, UnbalancedKey, UnbalancedMouse };
  Kind kind;
  int action_index = -1;   // -1 for script-level violations
  std::string key;         // offending key name, when applicable
  bool operator==(const Violation&) const = default;
};

// Semantic checks: coordinates inside the screen, keys in the key table,
// balanced down/up pairs. Violations are data, not errors; the agent may
// intentionally span key holds across scripts.
std::vector<Violation> validate(const ActionScript& script, int screen_w, int screen_h);

// The published key table: a-z, 0-9, enter, shift, ctrl, alt, tab, esc,
// arrow keys, f1-f12.
const std::vector<std::string>& key_table();
bool is_known_key(const std::string& key);

}  // namespace ace::actions
