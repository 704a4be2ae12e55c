#include "ace/gui/document.hpp"

#include <algorithm>
#include <charconv>
#include <tuple>

namespace ace::gui {

namespace {

const char* kRoles[] = {kRoleText, kRoleIcon,      kRoleButton,        kRoleCheckbox,
                        kRoleScrollbar, kRoleReferenceLine, kRoleObject};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\'': out += "\\'"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

// Parses a quoted string starting at text[pos] == '\''; advances pos past
// the closing quote.
std::string unquote(const std::string& text, size_t& pos) {
  if (pos >= text.size() || text[pos] != '\'')
    throw std::invalid_argument("expected quoted text in: " + text);
  ++pos;
  std::string out;
  while (true) {
    if (pos >= text.size()) throw std::invalid_argument("unterminated quote in: " + text);
    char c = text[pos++];
    if (c == '\'') return out;
    if (c == '\\') {
      if (pos >= text.size()) throw std::invalid_argument("bad escape in: " + text);
      char e = text[pos++];
      switch (e) {
        case '\\': out += '\\'; break;
        case '\'': out += '\''; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        default: throw std::invalid_argument("bad escape in: " + text);
      }
    } else {
      out += c;
    }
  }
}

auto element_key(const Element& e) {
  return std::make_tuple(e.bbox.y, e.bbox.x, e.role, e.text, e.icon_name, e.confidence,
                         e.bbox.w, e.bbox.h);
}

auto panel_key(const Panel& p) {
  return std::make_tuple(p.name, p.bbox.x, p.bbox.y, p.bbox.w, p.bbox.h);
}

}  // namespace

bool is_known_role(const std::string& role) {
  for (const char* r : kRoles)
    if (role == r) return true;
  return false;
}

UIDocument canonicalize(UIDocument doc) {
  for (auto& p : doc.panels)
    std::sort(p.elements.begin(), p.elements.end(),
              [](const Element& a, const Element& b) { return element_key(a) < element_key(b); });
  std::sort(doc.panels.begin(), doc.panels.end(),
            [](const Panel& a, const Panel& b) { return panel_key(a) < panel_key(b); });
  return doc;
}

std::string serialize_element(const Element& e) {
  std::string line = e.role + " '" + escape(e.text) + "'";
  if (!e.icon_name.empty()) line += " " + e.icon_name;
  line += " @ " + rect_to_string(e.bbox);
  if (e.confidence < 1.0) line += " ~" + format_double(e.confidence);
  return line;
}

std::string serialize_panel_header(const Panel& p) {
  return "[" + p.name + " @ " + rect_to_string(p.bbox) + "]";
}

std::string serialize(const UIDocument& doc) {
  std::string out;
  for (size_t i = 0; i < doc.panels.size(); ++i) {
    const Panel& p = doc.panels[i];
    if (i) out += "\n\n";
    out += serialize_panel_header(p);
    for (const auto& e : p.elements) out += "\n" + serialize_element(e);
    if (p.unclaimed > 0) out += "\nunclaimed=" + std::to_string(p.unclaimed);
  }
  return out;
}

Element element_from_line(const std::string& line) {
  Element e;
  size_t sp = line.find(' ');
  if (sp == std::string::npos)
    throw std::invalid_argument("bad element line: " + line);
  e.role = line.substr(0, sp);
  if (!is_known_role(e.role))
    throw std::invalid_argument("unknown role '" + e.role + "' in: " + line);
  size_t pos = sp + 1;
  e.text = unquote(line, pos);
  if (line.compare(pos, 1, " ") != 0)
    throw std::invalid_argument("bad element line: " + line);
  ++pos;
  if (line.compare(pos, 2, "@ ") != 0) {
    size_t at = line.find(" @ ", pos);
    if (at == std::string::npos)
      throw std::invalid_argument("bad element line: " + line);
    e.icon_name = line.substr(pos, at - pos);
    pos = at + 3;
  } else {
    pos += 2;
  }
  size_t close = line.find(')', pos);
  if (close == std::string::npos)
    throw std::invalid_argument("bad element line: " + line);
  e.bbox = rect_from_string(line.substr(pos, close - pos + 1));
  pos = close + 1;
  if (pos < line.size()) {
    if (line.compare(pos, 2, " ~") != 0)
      throw std::invalid_argument("trailing junk in: " + line);
    pos += 2;
    const char* b = line.data() + pos;
    const char* end = line.data() + line.size();
    double conf;
    auto res = std::from_chars(b, end, conf);
    if (res.ec != std::errc() || res.ptr != end || conf < 0.0 || conf > 1.0)
      throw std::invalid_argument("bad confidence in: " + line);
    e.confidence = conf;
  }
  return e;
}

UIDocument deserialize(const std::string& text) {
  UIDocument doc;
  if (trim(text).empty()) return doc;
  Panel* cur = nullptr;
  for (const auto& raw : split_lines(text)) {
    std::string line = trim(raw);
    if (line.empty()) {
      cur = nullptr;
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("bad panel header: " + line);
      std::string inner = line.substr(1, line.size() - 2);
      size_t at = inner.rfind(" @ ");
      if (at == std::string::npos)
        throw std::invalid_argument("bad panel header: " + line);
      Panel p;
      p.name = inner.substr(0, at);
      p.bbox = rect_from_string(inner.substr(at + 3));
      doc.panels.push_back(std::move(p));
      cur = &doc.panels.back();
      continue;
    }
    if (!cur) throw std::invalid_argument("element before panel header: " + line);
    if (line.rfind("unclaimed=", 0) == 0) {
      cur->unclaimed = std::stoi(line.substr(10));
      continue;
    }
    cur->elements.push_back(element_from_line(line));
  }
  return doc;
}

json doc_to_json(const UIDocument& doc) {
  json panels = json::array();
  for (const auto& p : doc.panels) {
    json jp;
    jp["name"] = p.name;
    jp["bbox"] = rect_to_json(p.bbox);
    jp["unclaimed"] = p.unclaimed;
    json els = json::array();
    for (const auto& e : p.elements) {
      json je;
      je["role"] = e.role;
      je["text"] = e.text;
      je["icon_name"] = e.icon_name;
      je["bbox"] = rect_to_json(e.bbox);
      je["confidence"] = e.confidence;
      els.push_back(je);
    }
    jp["elements"] = els;
    panels.push_back(jp);
  }
  return json{{"panels", panels}};
}

UIDocument doc_from_json(const json& j) {
  UIDocument doc;
  for (const auto& jp : j.at("panels")) {
    Panel p;
    p.name = jp.at("name").get<std::string>();
    p.bbox = rect_from_json(jp.at("bbox"));
    p.unclaimed = jp.value("unclaimed", 0);
    for (const auto& je : jp.at("elements")) {
      Element e;
      e.role = je.at("role").get<std::string>();
      e.text = je.at("text").get<std::string>();
      e.icon_name = je.value("icon_name", std::string());
      e.bbox = rect_from_json(je.at("bbox"));
      e.confidence = je.value("confidence", 1.0);
      p.elements.push_back(std::move(e));
    }
    doc.panels.push_back(std::move(p));
  }
  return doc;
}

}  // namespace ace::gui
