#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

namespace ace {

using json = nlohmann::json;

// FNV-1a over bytes. Used for state hashes, prompt hashes and raster hashes;
// deterministic across platforms, not cryptographic.
inline uint64_t fnv1a64(std::string_view data) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hash_hex(std::string_view data);

std::string_view trim_view(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::vector<std::string> split_lines(std::string_view s);

// Removes a wrapping markdown code fence (``` or ```lang), if any, and
// trims. LLM replies arrive both bare and fenced; parsers treat them alike.
std::string strip_code_fences(const std::string& text);

// Shortest decimal form that parses back to the same double ("2", "0.5").
std::string format_double(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

// 53-bit uniform in [0,1). Spelled out so tests can reproduce draws exactly.
inline double standard_uniform(std::mt19937_64& eng) {
  return (eng() >> 11) * 0x1.0p-53;
}

struct Rect {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  bool operator==(const Rect&) const = default;
  bool contains(int px, int py) const {
    return px >= x && py >= y && px < x + w && py < y + h;
  }
  bool contains(const Rect& r) const {
    return r.x >= x && r.y >= y && r.x + r.w <= x + w && r.y + r.h <= y + h;
  }
};

std::string rect_to_string(const Rect& r);           // "(x,y,w,h)"
Rect rect_from_string(std::string_view s);           // throws std::invalid_argument
json rect_to_json(const Rect& r);                    // [x,y,w,h]
Rect rect_from_json(const json& j);

// Scalar values carried by settings, widget state and goal predicates.
using Scalar = std::variant<bool, int64_t, double, std::string>;

json scalar_to_json(const Scalar& v);
Scalar scalar_from_json(const json& j);
std::string scalar_to_string(const Scalar& v);
bool scalar_eq(const Scalar& a, const Scalar& b);

// Prompt templates loaded from the assets directory. Placeholders are
// {{name}}; the template id (file stem, which carries the version suffix)
// is recorded in traces.
class PromptSet {
 public:
  static PromptSet load(const std::string& dir);
  // Registers a template body directly; used by tests.
  void add(const std::string& id, std::string body);
  bool has(const std::string& id) const;
  std::string render(const std::string& id,
                     const std::map<std::string, std::string>& vars) const;
  const std::string& body(const std::string& id) const;

 private:
  std::map<std::string, std::string> templates_;
};

// Resolution order: explicit argument, ACE_ASSETS env var, compiled default.
std::string default_assets_dir();

}  // namespace ace
