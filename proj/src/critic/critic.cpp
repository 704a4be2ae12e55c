#include "ace/critic/critic.hpp"

#include <algorithm>
#include <charconv>
#include <map>

namespace ace::critic {

namespace {

using gui::Element;
using gui::Panel;
using gui::UIDocument;

// ---------------------------------------------------------------------------
// Critique grammar

std::vector<std::string> split_fields(const std::string& s) {
  std::vector<std::string> parts;
  size_t start = 0;
  while (true) {
    size_t pos = s.find("; ", start);
    if (pos == std::string::npos) {
      parts.push_back(s.substr(start));
      break;
    }
    parts.push_back(s.substr(start, pos - start));
    start = pos + 2;
  }
  return parts;
}

bool parse_flag(const std::string& field, const char* name) {
  std::string prefix = std::string(name) + "=";
  if (field.rfind(prefix, 0) != 0)
    throw CritiqueFormatError("expected '" + prefix + "<bool>', got: " + field);
  std::string v = field.substr(prefix.size());
  if (v == "true") return true;
  if (v == "false") return false;
  throw CritiqueFormatError("bad boolean in: " + field);
}

std::string decode_note(const std::string& field) {
  if (field.empty()) throw CritiqueFormatError("empty critique field ('-' marks no note)");
  return field == "-" ? std::string() : field;
}

// ---------------------------------------------------------------------------
// Keying for diff/patch

// First occurrence keeps the bare key; later duplicates get "#2", "#3", ...
std::vector<std::string> disambiguate(std::vector<std::string> keys) {
  std::map<std::string, int> seen;
  for (auto& k : keys) {
    int n = ++seen[k];
    if (n > 1) k += "#" + std::to_string(n);
  }
  return keys;
}

std::vector<std::string> panel_keys(const UIDocument& doc) {
  std::vector<std::string> keys;
  for (const auto& p : doc.panels) keys.push_back(p.name);
  return disambiguate(std::move(keys));
}

std::vector<std::string> element_keys(const Panel& p) {
  std::vector<std::string> keys;
  for (const auto& e : p.elements) keys.push_back(e.role + "@" + rect_to_string(e.bbox));
  return disambiguate(std::move(keys));
}

std::string panel_block(const Panel& p) {
  UIDocument one;
  one.panels.push_back(p);
  return gui::serialize(one);
}

void diff_panel(const Panel& po, const Panel& pn, const std::string& key, DocDiff& d) {
  if (po.bbox != pn.bbox)
    d.changed.push_back(
        {key, "", "bbox", rect_to_string(po.bbox), rect_to_string(pn.bbox)});
  if (po.unclaimed != pn.unclaimed)
    d.changed.push_back({key, "", "unclaimed", std::to_string(po.unclaimed),
                         std::to_string(pn.unclaimed)});

  auto ko = element_keys(po), kn = element_keys(pn);
  std::map<std::string, size_t> new_index;
  for (size_t j = 0; j < kn.size(); ++j) new_index[kn[j]] = j;
  std::map<std::string, bool> matched;
  for (size_t i = 0; i < po.elements.size(); ++i) {
    auto it = new_index.find(ko[i]);
    if (it == new_index.end()) {
      d.removed.push_back(
          {key, ko[i], "element", gui::serialize_element(po.elements[i]), ""});
      continue;
    }
    matched[ko[i]] = true;
    const Element& eo = po.elements[i];
    const Element& en = pn.elements[it->second];
    if (eo.text != en.text)
      d.changed.push_back({key, ko[i], "text", eo.text, en.text});
    if (eo.icon_name != en.icon_name)
      d.changed.push_back({key, ko[i], "icon", eo.icon_name, en.icon_name});
    if (eo.confidence != en.confidence)
      d.changed.push_back({key, ko[i], "confidence", format_double(eo.confidence),
                           format_double(en.confidence)});
  }
  for (size_t j = 0; j < pn.elements.size(); ++j)
    if (!matched.count(kn[j]))
      d.added.push_back({key, kn[j], "element", "", gui::serialize_element(pn.elements[j])});
}

std::string quote_val(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\n') {
      out += "\\n";
    } else if (c == '\'') {
      out += "\\'";
    } else {
      out += c;
    }
  }
  return out + "'";
}

}  // namespace

// ---------------------------------------------------------------------------

Critique Critique::initial() {
  Critique c;
  c.success = true;
  c.finished = false;
  c.finish_note = "first step, nothing executed yet";
  c.first_step = true;
  return c;
}

Critique parse_critique(const std::string& reply) {
  std::string s = strip_code_fences(reply);
  if (s.empty()) throw CritiqueFormatError("empty critique reply");
  if (s.find('\n') != std::string::npos)
    throw CritiqueFormatError("critique must be a single line: " + s);
  auto parts = split_fields(s);
  if (parts.size() != 4)
    throw CritiqueFormatError("expected 4 '; '-separated fields, got " +
                              std::to_string(parts.size()) + ": " + s);
  Critique c;
  c.success = parse_flag(parts[0], "success");
  c.finished = parse_flag(parts[1], "finished");
  c.success_note = decode_note(parts[2]);
  c.finish_note = decode_note(parts[3]);
  if (!c.success && c.success_note.empty())
    throw CritiqueFormatError("success=false requires a success note: " + s);
  if (!c.finished && c.finish_note.empty())
    throw CritiqueFormatError("finished=false requires a finish note: " + s);
  return c;
}

std::string render_critique(const Critique& c) {
  auto note = [](const std::string& n) { return n.empty() ? std::string("-") : n; };
  return std::string("success=") + (c.success ? "true" : "false") +
         "; finished=" + (c.finished ? "true" : "false") + "; " + note(c.success_note) +
         "; " + note(c.finish_note);
}

json critique_to_json(const Critique& c) {
  return json{{"success", c.success},
              {"success_note", c.success_note},
              {"finished", c.finished},
              {"finish_note", c.finish_note},
              {"first_step", c.first_step}};
}

Critique critique_from_json(const json& j) {
  Critique c;
  c.success = j.at("success").get<bool>();
  c.success_note = j.at("success_note").get<std::string>();
  c.finished = j.at("finished").get<bool>();
  c.finish_note = j.at("finish_note").get<std::string>();
  c.first_step = j.value("first_step", false);
  return c;
}

// ---------------------------------------------------------------------------

DocDiff diff(const UIDocument& old_doc, const UIDocument& new_doc) {
  UIDocument co = gui::canonicalize(old_doc);
  UIDocument cn = gui::canonicalize(new_doc);
  auto ko = panel_keys(co), kn = panel_keys(cn);
  std::map<std::string, size_t> new_index;
  for (size_t j = 0; j < kn.size(); ++j) new_index[kn[j]] = j;
  std::map<std::string, bool> matched;

  DocDiff d;
  for (size_t i = 0; i < co.panels.size(); ++i) {
    auto it = new_index.find(ko[i]);
    if (it == new_index.end()) {
      d.removed.push_back({ko[i], "", "panel", panel_block(co.panels[i]), ""});
      continue;
    }
    matched[ko[i]] = true;
    diff_panel(co.panels[i], cn.panels[it->second], ko[i], d);
  }
  for (size_t j = 0; j < cn.panels.size(); ++j)
    if (!matched.count(kn[j]))
      d.added.push_back({kn[j], "", "panel", "", panel_block(cn.panels[j])});
  return d;
}

UIDocument patch(const UIDocument& old_doc, const DocDiff& d) {
  UIDocument doc = gui::canonicalize(old_doc);
  auto pkeys = panel_keys(doc);
  std::map<std::string, size_t> pindex;
  for (size_t i = 0; i < pkeys.size(); ++i) pindex[pkeys[i]] = i;
  std::vector<char> panel_dead(doc.panels.size(), 0);
  std::vector<std::map<std::string, size_t>> eindex(doc.panels.size());
  std::vector<std::vector<char>> elem_dead(doc.panels.size());
  for (size_t i = 0; i < doc.panels.size(); ++i) {
    auto keys = element_keys(doc.panels[i]);
    for (size_t j = 0; j < keys.size(); ++j) eindex[i][keys[j]] = j;
    elem_dead[i].assign(doc.panels[i].elements.size(), 0);
  }

  auto panel_at = [&](const std::string& key) -> size_t {
    auto it = pindex.find(key);
    if (it == pindex.end() || panel_dead[it->second])
      throw std::invalid_argument("patch: unknown panel '" + key + "'");
    return it->second;
  };
  auto element_at = [&](size_t pi, const std::string& key) -> size_t {
    auto it = eindex[pi].find(key);
    if (it == eindex[pi].end() || elem_dead[pi][it->second])
      throw std::invalid_argument("patch: unknown element '" + key + "'");
    return it->second;
  };

  for (const auto& e : d.removed) {
    if (e.field == "panel") {
      panel_dead[panel_at(e.panel)] = 1;
    } else if (e.field == "element") {
      size_t pi = panel_at(e.panel);
      elem_dead[pi][element_at(pi, e.element)] = 1;
    } else {
      throw std::invalid_argument("patch: bad removal field '" + e.field + "'");
    }
  }

  for (const auto& e : d.changed) {
    size_t pi = panel_at(e.panel);
    if (e.element.empty()) {
      if (e.field == "bbox")
        doc.panels[pi].bbox = rect_from_string(e.new_value);
      else if (e.field == "unclaimed")
        doc.panels[pi].unclaimed = std::stoi(e.new_value);
      else
        throw std::invalid_argument("patch: bad panel field '" + e.field + "'");
      continue;
    }
    Element& el = doc.panels[pi].elements[element_at(pi, e.element)];
    if (e.field == "text") {
      el.text = e.new_value;
    } else if (e.field == "icon") {
      el.icon_name = e.new_value;
    } else if (e.field == "confidence") {
      el.confidence = std::stod(e.new_value);
    } else {
      throw std::invalid_argument("patch: bad element field '" + e.field + "'");
    }
  }

  std::vector<Panel> appended;
  for (const auto& e : d.added) {
    if (e.field != "panel") continue;
    UIDocument block = gui::deserialize(e.new_value);
    for (auto& p : block.panels) appended.push_back(std::move(p));
  }
  for (const auto& e : d.added) {
    if (e.field != "element") continue;
    size_t pi = panel_at(e.panel);
    doc.panels[pi].elements.push_back(gui::element_from_line(e.new_value));
  }

  UIDocument out;
  for (size_t i = 0; i < doc.panels.size(); ++i) {
    if (panel_dead[i]) continue;
    Panel p;
    p.name = doc.panels[i].name;
    p.bbox = doc.panels[i].bbox;
    p.unclaimed = doc.panels[i].unclaimed;
    // appended elements sit past the elem_dead range and are always alive
    for (size_t j = 0; j < doc.panels[i].elements.size(); ++j)
      if (j >= elem_dead[i].size() || !elem_dead[i][j])
        p.elements.push_back(doc.panels[i].elements[j]);
    out.panels.push_back(std::move(p));
  }
  for (auto& p : appended) out.panels.push_back(std::move(p));
  return gui::canonicalize(out);
}

std::string diff_to_string(const DocDiff& d) {
  if (d.empty()) return "(no changes)";
  std::string out;
  auto add_line = [&](const std::string& line) {
    if (!out.empty()) out += '\n';
    out += line;
  };
  for (const auto& e : d.removed) {
    if (e.field == "panel") {
      std::string block = e.old_value;
      std::replace(block.begin(), block.end(), '\n', ';');
      add_line("- panel " + block);
    } else {
      add_line("- [" + e.panel + "] " + e.old_value);
    }
  }
  for (const auto& e : d.changed) {
    std::string target = "[" + e.panel + "]" + (e.element.empty() ? "" : " " + e.element);
    add_line("~ " + target + " " + e.field + ": " + quote_val(e.old_value) + " -> " +
             quote_val(e.new_value));
  }
  for (const auto& e : d.added) {
    if (e.field == "panel") {
      std::string block = e.new_value;
      std::replace(block.begin(), block.end(), '\n', ';');
      add_line("+ panel " + block);
    } else {
      add_line("+ [" + e.panel + "] " + e.new_value);
    }
  }
  return out;
}

json diff_to_json(const DocDiff& d) {
  auto entries = [](const std::vector<DiffEntry>& v) {
    json arr = json::array();
    for (const auto& e : v)
      arr.push_back(json{{"panel", e.panel},
                         {"element", e.element},
                         {"field", e.field},
                         {"old", e.old_value},
                         {"new", e.new_value}});
    return arr;
  };
  return json{{"added", entries(d.added)},
              {"removed", entries(d.removed)},
              {"changed", entries(d.changed)}};
}

DocDiff diff_from_json(const json& j) {
  auto entries = [](const json& arr) {
    std::vector<DiffEntry> v;
    for (const auto& je : arr)
      v.push_back(DiffEntry{je.at("panel").get<std::string>(),
                            je.at("element").get<std::string>(),
                            je.at("field").get<std::string>(),
                            je.at("old").get<std::string>(),
                            je.at("new").get<std::string>()});
    return v;
  };
  DocDiff d;
  d.added = entries(j.at("added"));
  d.removed = entries(j.at("removed"));
  d.changed = entries(j.at("changed"));
  return d;
}

bool state_changing(const actions::ActionScript& script) {
  using namespace actions;
  for (const auto& a : script.actions) {
    bool passive = std::holds_alternative<MoveTo>(a) || std::holds_alternative<MouseUp>(a) ||
                   std::holds_alternative<KeyUp>(a);
    if (!passive) return true;
  }
  return false;
}

Critique assess(const gui::UIDocument& before, const gui::UIDocument& after,
                const actions::ActionScript& last_action, const std::string& subtask,
                llm::Backend& backend, const PromptSet& prompts) {
  DocDiff d = diff(before, after);
  std::string hint;
  if (d.empty() && state_changing(last_action))
    hint =
        "\n## HINT\n"
        "The screen did not change although the last action should have changed it. "
        "Unless the subtask only inspects state, report success=false with a note.";
  std::string prompt = prompts.render(kAssessTemplate, {{"subtask", subtask},
                                                        {"action", actions::render(last_action)},
                                                        {"diff", diff_to_string(d)},
                                                        {"hint", hint}});
  try {
    return parse_critique(backend.complete(prompt));
  } catch (const CritiqueFormatError&) {
    prompt += "\n\n## FORMAT REMINDER\n" + prompts.body(kCriticReminderTemplate);
    try {
      return parse_critique(backend.complete(prompt));
    } catch (const CritiqueFormatError& e) {
      throw CritiqueFormatError(std::string("reply malformed after format reminder: ") +
                                e.what());
    }
  }
}

}  // namespace ace::critic
