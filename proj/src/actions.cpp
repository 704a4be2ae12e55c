#include "ace/actions.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "ace/util.hpp"

namespace ace::actions {

namespace {

const char* kind_name(ParseError::Kind k) {
  switch (k) {
    case ParseError::Kind::UnknownAction: return "unknown action";
    case ParseError::Kind::ArityMismatch: return "arity mismatch";
    case ParseError::Kind::BadLiteral: return "bad literal";
    case ParseError::Kind::UnbalancedQuote: return "unbalanced quote";
  }
  return "parse error";
}

}  // namespace

ParseError::ParseError(Kind kind, size_t pos, const std::string& detail)
    : std::runtime_error(std::string(kind_name(kind)) + " at offset " +
                         std::to_string(pos) + ": " + detail),
      kind_(kind),
      pos_(pos) {}

const std::vector<std::string>& key_table() {
  static const std::vector<std::string> table = [] {
    std::vector<std::string> t;
    for (char c = 'a'; c <= 'z'; ++c) t.emplace_back(1, c);
    for (char c = '0'; c <= '9'; ++c) t.emplace_back(1, c);
    for (const char* k : {"enter", "shift", "ctrl", "alt", "tab", "esc",
                          "up", "down", "left", "right"})
      t.emplace_back(k);
    for (int i = 1; i <= 12; ++i) t.emplace_back("f" + std::to_string(i));
    return t;
  }();
  return table;
}

bool is_known_key(const std::string& key) {
  static const std::set<std::string> keys(key_table().begin(), key_table().end());
  return keys.count(key) > 0;
}

namespace {

// ---------------------------------------------------------------------------
// Parsing

struct ArgValue {
  enum class Type { Int, Real, Str };
  Type type;
  long long i = 0;
  double d = 0.0;
  std::string s;
  std::string keyword;  // empty for positional args
  size_t pos = 0;
};

class Parser {
 public:
  explicit Parser(std::string text) : text_(std::move(text)) {}

  ActionScript run() {
    ActionScript script;
    while (true) {
      skip_separators();
      if (at_end()) break;
      script.actions.push_back(parse_call());
      // after a call: separator(s) or end of input
      skip_spaces();
      if (at_end()) break;
      char c = text_[pos_];
      if (c != ';' && c != '\n')
        fail(ParseError::Kind::BadLiteral, pos_,
             "expected ';' or newline after action");
    }
    return script;
  }

 private:
  bool at_end() const { return pos_ >= text_.size(); }

  void skip_spaces() {
    while (!at_end() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\r'))
      ++pos_;
  }

  void skip_separators() {
    while (!at_end()) {
      char c = text_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n' || c == ';')
        ++pos_;
      else
        break;
    }
  }

  [[noreturn]] void fail(ParseError::Kind kind, size_t pos, const std::string& detail) {
    throw ParseError(kind, pos, detail);
  }

  std::string parse_ident() {
    size_t start = pos_;
    while (!at_end() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                         text_[pos_] == '_'))
      ++pos_;
    if (pos_ == start)
      fail(ParseError::Kind::BadLiteral, start, "expected action name");
    return text_.substr(start, pos_ - start);
  }

  std::string parse_string(size_t quote_pos) {
    std::string out;
    ++pos_;  // consume opening quote
    while (true) {
      if (at_end())
        fail(ParseError::Kind::UnbalancedQuote, quote_pos, "unterminated string");
      char c = text_[pos_++];
      if (c == '\'') return out;
      if (c == '\\') {
        if (at_end())
          fail(ParseError::Kind::UnbalancedQuote, quote_pos, "unterminated escape");
        char e = text_[pos_++];
        switch (e) {
          case '\\': out += '\\'; break;
          case '\'': out += '\''; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default:
            fail(ParseError::Kind::BadLiteral, pos_ - 1,
                 std::string("unknown escape \\") + e);
        }
      } else {
        out += c;
      }
    }
  }

  ArgValue parse_arg() {
    skip_spaces();
    size_t start = pos_;
    if (at_end()) fail(ParseError::Kind::BadLiteral, start, "expected argument");
    char c = text_[pos_];
    ArgValue v;
    v.pos = start;
    if (c == '\'') {
      v.type = ArgValue::Type::Str;
      v.s = parse_string(start);
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      // keyword argument: name=value
      std::string name = parse_ident();
      skip_spaces();
      if (at_end() || text_[pos_] != '=')
        fail(ParseError::Kind::BadLiteral, start, "bare word '" + name + "'");
      ++pos_;
      ArgValue inner = parse_arg();
      if (!inner.keyword.empty())
        fail(ParseError::Kind::BadLiteral, start, "nested keyword argument");
      inner.keyword = name;
      inner.pos = start;
      return inner;
    }
    // number
    size_t end = pos_;
    if (end < text_.size() && (text_[end] == '-' || text_[end] == '+')) ++end;
    while (end < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '.' ||
            text_[end] == 'e' || text_[end] == 'E' ||
            ((text_[end] == '-' || text_[end] == '+') &&
             (text_[end - 1] == 'e' || text_[end - 1] == 'E'))))
      ++end;
    std::string tok = text_.substr(pos_, end - pos_);
    if (tok.empty() || tok == "-" || tok == "+")
      fail(ParseError::Kind::BadLiteral, start, "expected literal");
    bool is_real = tok.find_first_of(".eE") != std::string::npos;
    if (is_real) {
      double d;
      auto res = std::from_chars(tok.data(), tok.data() + tok.size(), d);
      if (res.ec != std::errc() || res.ptr != tok.data() + tok.size() ||
          !std::isfinite(d))
        fail(ParseError::Kind::BadLiteral, start, "bad number '" + tok + "'");
      v.type = ArgValue::Type::Real;
      v.d = d;
    } else {
      long long i;
      auto res = std::from_chars(tok.data(), tok.data() + tok.size(), i);
      if (res.ec != std::errc() || res.ptr != tok.data() + tok.size())
        fail(ParseError::Kind::BadLiteral, start, "bad integer '" + tok + "'");
      v.type = ArgValue::Type::Int;
      v.i = i;
    }
    pos_ = end;
    return v;
  }

  std::vector<ArgValue> parse_args(size_t call_pos) {
    std::vector<ArgValue> args;
    skip_spaces();
    if (at_end() || text_[pos_] != '(')
      fail(ParseError::Kind::BadLiteral, pos_, "expected '('");
    ++pos_;
    skip_spaces();
    if (!at_end() && text_[pos_] == ')') {
      ++pos_;
      return args;
    }
    while (true) {
      args.push_back(parse_arg());
      skip_spaces();
      if (at_end())
        fail(ParseError::Kind::BadLiteral, call_pos, "unterminated call");
      char c = text_[pos_];
      if (c == ',') {
        ++pos_;
        continue;
      }
      if (c == ')') {
        ++pos_;
        return args;
      }
      fail(ParseError::Kind::BadLiteral, pos_, "expected ',' or ')'");
    }
  }

  int coord(const ArgValue& v) {
    if (!v.keyword.empty())
      fail(ParseError::Kind::ArityMismatch, v.pos, "unexpected keyword argument");
    if (v.type != ArgValue::Type::Int)
      fail(ParseError::Kind::BadLiteral, v.pos, "coordinate must be an integer");
    if (v.i < 0 || v.i > INT32_MAX)
      fail(ParseError::Kind::BadLiteral, v.pos, "coordinate out of range");
    return static_cast<int>(v.i);
  }

  int signed_int(const ArgValue& v) {
    if (!v.keyword.empty())
      fail(ParseError::Kind::ArityMismatch, v.pos, "unexpected keyword argument");
    if (v.type != ArgValue::Type::Int)
      fail(ParseError::Kind::BadLiteral, v.pos, "amount must be an integer");
    if (v.i < INT32_MIN || v.i > INT32_MAX)
      fail(ParseError::Kind::BadLiteral, v.pos, "amount out of range");
    return static_cast<int>(v.i);
  }

  std::string str(const ArgValue& v) {
    if (!v.keyword.empty())
      fail(ParseError::Kind::ArityMismatch, v.pos, "unexpected keyword argument");
    if (v.type != ArgValue::Type::Str)
      fail(ParseError::Kind::BadLiteral, v.pos, "expected string literal");
    return v.s;
  }

  void need_arity(const std::string& name, const std::vector<ArgValue>& args,
                  size_t n, size_t call_pos) {
    if (args.size() != n)
      fail(ParseError::Kind::ArityMismatch, call_pos,
           name + " takes " + std::to_string(n) + " argument(s), got " +
               std::to_string(args.size()));
  }

  Action parse_call() {
    size_t call_pos = pos_;
    char first = text_[pos_];
    if (!std::isalpha(static_cast<unsigned char>(first)) && first != '_')
      fail(ParseError::Kind::BadLiteral, call_pos, "expected action name");
    std::string name = parse_ident();
    auto args = parse_args(call_pos);

    if (name == "moveTo") {
      need_arity(name, args, 2, call_pos);
      return MoveTo{coord(args[0]), coord(args[1])};
    }
    if (name == "click") {
      need_arity(name, args, 2, call_pos);
      return Click{coord(args[0]), coord(args[1])};
    }
    if (name == "doubleClick") {
      need_arity(name, args, 2, call_pos);
      return DoubleClick{coord(args[0]), coord(args[1])};
    }
    if (name == "rightClick") {
      need_arity(name, args, 2, call_pos);
      return RightClick{coord(args[0]), coord(args[1])};
    }
    if (name == "write") {
      need_arity(name, args, 1, call_pos);
      return Write{str(args[0])};
    }
    if (name == "hotkey") {
      if (args.size() < 2)
        fail(ParseError::Kind::ArityMismatch, call_pos,
             "hotkey takes at least 2 keys");
      Hotkey h;
      for (const auto& a : args) h.keys.push_back(str(a));
      return h;
    }
    if (name == "scroll") {
      need_arity(name, args, 1, call_pos);
      return Scroll{signed_int(args[0])};
    }
    if (name == "dragTo") {
      if (args.size() != 2 && args.size() != 3)
        fail(ParseError::Kind::ArityMismatch, call_pos,
             "dragTo takes x, y and optional duration=");
      DragTo d{coord(args[0]), coord(args[1]), 0.0};
      if (args.size() == 3) {
        const auto& a = args[2];
        if (a.keyword != "duration")
          fail(ParseError::Kind::ArityMismatch, a.pos,
               "third dragTo argument must be duration=");
        double dur = a.type == ArgValue::Type::Int ? static_cast<double>(a.i) : a.d;
        if (!(dur >= 0.0) || !std::isfinite(dur))
          fail(ParseError::Kind::BadLiteral, a.pos, "duration must be >= 0");
        d.duration = dur;
      }
      return d;
    }
    if (name == "mouseDown") {
      need_arity(name, args, 0, call_pos);
      return MouseDown{};
    }
    if (name == "mouseUp") {
      need_arity(name, args, 0, call_pos);
      return MouseUp{};
    }
    if (name == "press") {
      need_arity(name, args, 1, call_pos);
      return Press{str(args[0])};
    }
    if (name == "keyDown") {
      need_arity(name, args, 1, call_pos);
      return KeyDown{str(args[0])};
    }
    if (name == "keyUp") {
      need_arity(name, args, 1, call_pos);
      return KeyUp{str(args[0])};
    }
    fail(ParseError::Kind::UnknownAction, call_pos, "'" + name + "'");
  }

  std::string text_;
  size_t pos_ = 0;
};

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\'': out += "\\'"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  out += '\'';
  return out;
}

std::string format_duration(double d) {
  // integral durations print like the published examples: duration=2
  double rounded = std::nearbyint(d);
  if (rounded == d && std::abs(d) < 1e15) {
    return std::to_string(static_cast<long long>(rounded));
  }
  return format_double(d);
}

struct Renderer {
  std::string operator()(const MoveTo& a) const {
    return "moveTo(" + std::to_string(a.x) + ", " + std::to_string(a.y) + ")";
  }
  std::string operator()(const Click& a) const {
    return "click(" + std::to_string(a.x) + ", " + std::to_string(a.y) + ")";
  }
  std::string operator()(const DoubleClick& a) const {
    return "doubleClick(" + std::to_string(a.x) + ", " + std::to_string(a.y) + ")";
  }
  std::string operator()(const RightClick& a) const {
    return "rightClick(" + std::to_string(a.x) + ", " + std::to_string(a.y) + ")";
  }
  std::string operator()(const Write& a) const { return "write(" + quote(a.text) + ")"; }
  std::string operator()(const Hotkey& a) const {
    std::string out = "hotkey(";
    for (size_t i = 0; i < a.keys.size(); ++i) {
      if (i) out += ", ";
      out += quote(a.keys[i]);
    }
    return out + ")";
  }
  std::string operator()(const Scroll& a) const {
    return "scroll(" + std::to_string(a.amount) + ")";
  }
  std::string operator()(const DragTo& a) const {
    std::string out = "dragTo(" + std::to_string(a.x) + ", " + std::to_string(a.y);
    if (a.duration != 0.0) out += ", duration=" + format_duration(a.duration);
    return out + ")";
  }
  std::string operator()(const MouseDown&) const { return "mouseDown()"; }
  std::string operator()(const MouseUp&) const { return "mouseUp()"; }
  std::string operator()(const Press& a) const { return "press(" + quote(a.key) + ")"; }
  std::string operator()(const KeyDown& a) const {
    return "keyDown(" + quote(a.key) + ")";
  }
  std::string operator()(const KeyUp& a) const { return "keyUp(" + quote(a.key) + ")"; }
};

}  // namespace

ActionScript parse(const std::string& text) {
  return Parser(strip_code_fences(text)).run();
}

std::string render(const Action& action) { return std::visit(Renderer{}, action); }

std::string render(const ActionScript& script) {
  std::string out;
  for (size_t i = 0; i < script.actions.size(); ++i) {
    if (i) out += '\n';
    out += render(script.actions[i]);
  }
  return out;
}

namespace {

struct BoundsVisitor {
  int w, h;
  bool ok(int x, int y) const { return x >= 0 && y >= 0 && x < w && y < h; }
  bool operator()(const MoveTo& a) const { return ok(a.x, a.y); }
  bool operator()(const Click& a) const { return ok(a.x, a.y); }
  bool operator()(const DoubleClick& a) const { return ok(a.x, a.y); }
  bool operator()(const RightClick& a) const { return ok(a.x, a.y); }
  bool operator()(const DragTo& a) const { return ok(a.x, a.y); }
  template <typename T>
  bool operator()(const T&) const { return true; }
};

}  // namespace

std::vector<Violation> validate(const ActionScript& script, int screen_w, int screen_h) {
  std::vector<Violation> out;
  std::map<std::string, int> key_depth;
  int mouse_depth = 0;
  std::set<std::string> unbalanced_keys;
  bool unbalanced_mouse = false;

  for (size_t i = 0; i < script.actions.size(); ++i) {
    const Action& a = script.actions[i];
    int idx = static_cast<int>(i);
    if (!std::visit(BoundsVisitor{screen_w, screen_h}, a))
      out.push_back({Violation::Kind::OutOfBounds, idx, ""});

    auto check_key = [&](const std::string& k) {
      if (!is_known_key(k)) out.push_back({Violation::Kind::UnknownKey, idx, k});
    };
    if (const auto* hk = std::get_if<Hotkey>(&a)) {
      for (const auto& k : hk->keys) check_key(k);
    } else if (const auto* p = std::get_if<Press>(&a)) {
      check_key(p->key);
    } else if (const auto* kd = std::get_if<KeyDown>(&a)) {
      check_key(kd->key);
      key_depth[kd->key]++;
    } else if (const auto* ku = std::get_if<KeyUp>(&a)) {
      check_key(ku->key);
      if (--key_depth[ku->key] < 0) {
        unbalanced_keys.insert(ku->key);
        key_depth[ku->key] = 0;
      }
    } else if (std::holds_alternative<MouseDown>(a)) {
      mouse_depth++;
    } else if (std::holds_alternative<MouseUp>(a)) {
      if (--mouse_depth < 0) {
        unbalanced_mouse = true;
        mouse_depth = 0;
      }
    }
  }
  for (const auto& [key, depth] : key_depth)
    if (depth > 0) unbalanced_keys.insert(key);
  if (mouse_depth > 0) unbalanced_mouse = true;

  for (const auto& k : unbalanced_keys)
    out.push_back({Violation::Kind::UnbalancedKey, -1, k});
  if (unbalanced_mouse) out.push_back({Violation::Kind::UnbalancedMouse, -1, ""});
  return out;
}

}  // namespace ace::actions
