#include "ace/util.hpp"

#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace ace {

std::string hash_hex(std::string_view data) {
  uint64_t h = fnv1a64(data);
  char buf[17];
  static const char* digits = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = digits[h & 0xf];
    h >>= 4;
  }
  buf[16] = '\0';
  return std::string(buf, 16);
}

std::string_view trim_view(std::string_view s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string trim(std::string_view s) { return std::string(trim_view(s)); }

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  size_t start = 0;
  while (true) {
    size_t pos = s.find(sep, start);
    if (pos == std::string_view::npos) {
      out.emplace_back(s.substr(start));
      break;
    }
    out.emplace_back(s.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

std::string strip_code_fences(const std::string& text) {
  std::string s = trim(text);
  if (s.rfind("```", 0) == 0) {
    size_t nl = s.find('\n');
    s = nl == std::string::npos ? std::string() : s.substr(nl + 1);
  }
  if (s.size() >= 3 && s.compare(s.size() - 3, 3, "```") == 0) {
    size_t nl = s.find_last_of('\n');
    s = nl == std::string::npos ? std::string() : s.substr(0, nl);
  }
  return trim(s);
}

std::vector<std::string> split_lines(std::string_view s) {
  auto lines = split(s, '\n');
  for (auto& l : lines) {
    if (!l.empty() && l.back() == '\r') l.pop_back();
  }
  return lines;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
  fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

std::string rect_to_string(const Rect& r) {
  std::ostringstream ss;
  ss << '(' << r.x << ',' << r.y << ',' << r.w << ',' << r.h << ')';
  return ss.str();
}

Rect rect_from_string(std::string_view s) {
  s = trim_view(s);
  if (s.size() < 2 || s.front() != '(' || s.back() != ')')
    throw std::invalid_argument("bad rect: " + std::string(s));
  auto parts = split(s.substr(1, s.size() - 2), ',');
  if (parts.size() != 4) throw std::invalid_argument("bad rect: " + std::string(s));
  Rect r;
  int* fields[4] = {&r.x, &r.y, &r.w, &r.h};
  for (int i = 0; i < 4; ++i) {
    auto p = trim(parts[i]);
    auto res = std::from_chars(p.data(), p.data() + p.size(), *fields[i]);
    if (res.ec != std::errc() || res.ptr != p.data() + p.size())
      throw std::invalid_argument("bad rect: " + std::string(s));
  }
  return r;
}

json rect_to_json(const Rect& r) { return json::array({r.x, r.y, r.w, r.h}); }

Rect rect_from_json(const json& j) {
  if (!j.is_array() || j.size() != 4) throw std::invalid_argument("bad rect json");
  return Rect{j[0].get<int>(), j[1].get<int>(), j[2].get<int>(), j[3].get<int>()};
}

json scalar_to_json(const Scalar& v) {
  return std::visit([](const auto& x) { return json(x); }, v);
}

Scalar scalar_from_json(const json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw std::invalid_argument("bad scalar json: " + j.dump());
}

std::string scalar_to_string(const Scalar& v) {
  if (std::holds_alternative<bool>(v)) return std::get<bool>(v) ? "true" : "false";
  if (std::holds_alternative<int64_t>(v)) return std::to_string(std::get<int64_t>(v));
  if (std::holds_alternative<double>(v)) return format_double(std::get<double>(v));
  return std::get<std::string>(v);
}

bool scalar_eq(const Scalar& a, const Scalar& b) {
  // int/double compare numerically so task files may write 30 or 30.0
  auto num = [](const Scalar& s, double& out) {
    if (std::holds_alternative<int64_t>(s)) {
      out = static_cast<double>(std::get<int64_t>(s));
      return true;
    }
    if (std::holds_alternative<double>(s)) {
      out = std::get<double>(s);
      return true;
    }
    return false;
  };
  double x, y;
  if (num(a, x) && num(b, y)) return x == y;
  return a == b;
}

PromptSet PromptSet::load(const std::string& dir) {
  PromptSet set;
  if (!fs::exists(dir)) throw std::runtime_error("prompt dir not found: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) set.add(f.stem().string(), read_file(f.string()));
  return set;
}

void PromptSet::add(const std::string& id, std::string body) {
  templates_[id] = std::move(body);
}

bool PromptSet::has(const std::string& id) const { return templates_.count(id) > 0; }

std::string PromptSet::render(const std::string& id,
                              const std::map<std::string, std::string>& vars) const {
  // single left-to-right pass over the template, so placeholder-looking
  // text inside substituted values is left alone
  const std::string& tpl = body(id);
  std::string out;
  size_t pos = 0;
  while (true) {
    size_t open = tpl.find("{{", pos);
    if (open == std::string::npos) {
      out += tpl.substr(pos);
      break;
    }
    size_t close = tpl.find("}}", open + 2);
    if (close == std::string::npos)
      throw std::runtime_error("unterminated placeholder in template " + id);
    out += tpl.substr(pos, open - pos);
    std::string key = tpl.substr(open + 2, close - open - 2);
    auto it = vars.find(key);
    if (it == vars.end())
      throw std::runtime_error("unbound placeholder {{" + key + "}} in template " + id);
    out += it->second;
    pos = close + 2;
  }
  return out;
}

const std::string& PromptSet::body(const std::string& id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw std::runtime_error("unknown template: " + id);
  return it->second;
}

std::string default_assets_dir() {
  if (const char* env = std::getenv("ACE_ASSETS"); env && *env) return env;
#ifdef ACE_DEFAULT_ASSETS_DIR
  return ACE_DEFAULT_ASSETS_DIR;
#else
  return "assets";
#endif
}

}  // namespace ace
