#include "ace/gui/parser.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>
#include <tuple>

namespace ace::gui {

namespace {

using sim::Cell;
using sim::CellKind;
using sim::SymbolicRaster;

// Background fills drawn by the simulator's chrome; never elements by
// themselves. button/menu/field/scrollbar produce widget elements instead.
bool is_chrome_fill(const std::string& v) {
  static const std::set<std::string> chrome = {"desktop", "window", "titlebar", "panel",
                                               "canvas",  "field",  "button",   "menu",
                                               "scrollbar"};
  return chrome.count(v) > 0;
}

struct CellRect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;  // half-open, cells
};

CellRect panel_cells(const Panel& p, int cell_px, int w, int h) {
  CellRect c;
  c.x0 = std::max(0, p.bbox.x / cell_px);
  c.y0 = std::max(0, p.bbox.y / cell_px);
  c.x1 = std::min(w, (p.bbox.x + p.bbox.w) / cell_px);
  c.y1 = std::min(h, (p.bbox.y + p.bbox.h) / cell_px);
  return c;
}

Rect cells_to_px(int x0, int y0, int x1, int y1, int cell_px) {
  return Rect{x0 * cell_px, y0 * cell_px, (x1 - x0) * cell_px, (y1 - y0) * cell_px};
}

void flatten_meta(const sim::PanelMeta& node, std::vector<Panel>& out,
                  std::map<std::string, int>& seen) {
  Panel p;
  p.name = node.name;
  int n = ++seen[node.name];
  if (n > 1) p.name += " (" + std::to_string(n) + ")";
  p.bbox = node.bbox;
  out.push_back(std::move(p));
  for (const auto& c : node.children) flatten_meta(c, out, seen);
}

// Connected components (4-adjacency) over a predicate, restricted to cells
// owned by the panel. Returns component bboxes in first-seen scan order.
template <typename Pred>
std::vector<CellRect> components(const SymbolicRaster& r, const Segmentation& seg,
                                 size_t idx, const CellRect& area, Pred pred) {
  std::vector<char> visited(static_cast<size_t>(r.width) * r.height, 0);
  auto vis = [&](int x, int y) -> char& {
    return visited[static_cast<size_t>(y) * r.width + x];
  };
  std::vector<CellRect> out;
  for (int y = area.y0; y < area.y1; ++y) {
    for (int x = area.x0; x < area.x1; ++x) {
      if (vis(x, y) || seg.owner_at(x, y) != static_cast<int>(idx) || !pred(x, y))
        continue;
      CellRect box{x, y, x + 1, y + 1};
      std::vector<std::pair<int, int>> stack{{x, y}};
      vis(x, y) = 1;
      while (!stack.empty()) {
        auto [cx, cy] = stack.back();
        stack.pop_back();
        box.x0 = std::min(box.x0, cx);
        box.y0 = std::min(box.y0, cy);
        box.x1 = std::max(box.x1, cx + 1);
        box.y1 = std::max(box.y1, cy + 1);
        const int dx[] = {1, -1, 0, 0}, dy[] = {0, 0, 1, -1};
        for (int d = 0; d < 4; ++d) {
          int nx = cx + dx[d], ny = cy + dy[d];
          if (nx < area.x0 || ny < area.y0 || nx >= area.x1 || ny >= area.y1) continue;
          if (vis(nx, ny) || seg.owner_at(nx, ny) != static_cast<int>(idx)) continue;
          if (!pred(nx, ny)) continue;
          vis(nx, ny) = 1;
          stack.push_back({nx, ny});
        }
      }
      out.push_back(box);
    }
  }
  return out;
}

auto element_order(const Element& e) {
  return std::make_tuple(e.bbox.y, e.bbox.x, e.role, e.text, e.icon_name, e.confidence,
                         e.bbox.w, e.bbox.h);
}

}  // namespace

// ---------------------------------------------------------------------------

IconTemplateSet IconTemplateSet::from_json(const json& j) {
  IconTemplateSet set;
  std::set<std::string> signatures;
  for (const auto& jt : j.at("templates")) {
    IconTemplate t;
    t.icon_name = jt.at("icon_name").get<std::string>();
    t.role = jt.value("role", std::string(kRoleIcon));
    if (!is_known_role(t.role))
      throw std::invalid_argument("icon template '" + t.icon_name + "': unknown role");
    size_t width = 0;
    for (const auto& row : jt.at("pattern")) {
      std::vector<std::string> cells = row.get<std::vector<std::string>>();
      if (cells.empty()) throw std::invalid_argument("icon template with empty row");
      if (width == 0) width = cells.size();
      if (cells.size() != width)
        throw std::invalid_argument("icon template '" + t.icon_name + "': ragged pattern");
      t.pattern.push_back(std::move(cells));
    }
    if (t.pattern.empty())
      throw std::invalid_argument("icon template '" + t.icon_name + "': empty pattern");
    std::string sig;
    for (const auto& row : t.pattern)
      for (const auto& c : row) sig += c + "|";
    sig += std::to_string(t.pattern.size());
    if (!signatures.insert(sig).second)
      throw std::invalid_argument("duplicate icon template signature ('" + t.icon_name + "')");
    set.templates.push_back(std::move(t));
  }
  return set;
}

json IconTemplateSet::to_json() const {
  json arr = json::array();
  for (const auto& t : templates) {
    json jt;
    jt["icon_name"] = t.icon_name;
    jt["role"] = t.role;
    jt["pattern"] = t.pattern;
    arr.push_back(jt);
  }
  return json{{"templates", arr}};
}

Segmentation segment_panels(const sim::Observation& obs) {
  Segmentation seg;
  seg.width = obs.raster.width;
  seg.height = obs.raster.height;
  std::map<std::string, int> seen;
  for (const auto& node : obs.metadata) flatten_meta(node, seg.panels, seen);

  Panel desktop;
  desktop.name = "Desktop";
  int n = ++seen["Desktop"];
  if (n > 1) desktop.name += " (" + std::to_string(n) + ")";
  desktop.bbox = Rect{0, 0, seg.width * obs.raster.cell_px, seg.height * obs.raster.cell_px};
  int desktop_idx = static_cast<int>(seg.panels.size());
  seg.panels.push_back(std::move(desktop));

  seg.owner.assign(static_cast<size_t>(seg.width) * seg.height, desktop_idx);
  for (size_t i = 0; i + 1 < seg.panels.size(); ++i) {
    CellRect c = panel_cells(seg.panels[i], obs.raster.cell_px, seg.width, seg.height);
    for (int y = c.y0; y < c.y1; ++y)
      for (int x = c.x0; x < c.x1; ++x)
        seg.owner[static_cast<size_t>(y) * seg.width + x] = static_cast<int>(i);
  }
  return seg;
}

std::vector<Element> extract_text(const SymbolicRaster& raster, const Segmentation& seg,
                                  size_t panel_idx, const ParserConfig& cfg) {
  const Panel& panel = seg.panels[panel_idx];
  CellRect area = panel_cells(panel, raster.cell_px, raster.width, raster.height);

  // noise: pre-decide dropped glyph cells in scan order, seeded per panel
  std::set<std::pair<int, int>> dropped;
  if (cfg.noise > 0.0) {
    std::mt19937_64 eng(cfg.seed ^ fnv1a64(panel.name));
    for (int y = area.y0; y < area.y1; ++y)
      for (int x = area.x0; x < area.x1; ++x) {
        if (seg.owner_at(x, y) != static_cast<int>(panel_idx)) continue;
        if (raster.at(x, y).kind != CellKind::Glyph) continue;
        if (standard_uniform(eng) < cfg.noise) dropped.insert({x, y});
      }
  }

  std::vector<Element> out;
  for (int y = area.y0; y < area.y1; ++y) {
    int x = area.x0;
    while (x < area.x1) {
      auto is_glyph = [&](int cx) {
        return seg.owner_at(cx, y) == static_cast<int>(panel_idx) &&
               raster.at(cx, y).kind == CellKind::Glyph && !dropped.count({cx, y});
      };
      if (!is_glyph(x)) {
        ++x;
        continue;
      }
      int start = x;
      std::string text;
      while (x < area.x1 && is_glyph(x)) {
        text += raster.at(x, y).value;
        ++x;
      }
      Element e;
      e.role = kRoleText;
      e.text = std::move(text);
      e.bbox = cells_to_px(start, y, x, y + 1, raster.cell_px);
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::vector<Element> match_icons(const SymbolicRaster& raster, const Segmentation& seg,
                                 size_t panel_idx, const IconTemplateSet& templates) {
  const Panel& panel = seg.panels[panel_idx];
  CellRect area = panel_cells(panel, raster.cell_px, raster.width, raster.height);
  std::set<std::pair<int, int>> claimed;
  std::vector<Element> out;

  for (const auto& t : templates.templates) {
    int th = static_cast<int>(t.pattern.size());
    int tw = static_cast<int>(t.pattern[0].size());
    for (int y = area.y0; y + th <= area.y1; ++y) {
      for (int x = area.x0; x + tw <= area.x1; ++x) {
        bool match = true;
        for (int r = 0; match && r < th; ++r)
          for (int c = 0; match && c < tw; ++c) {
            int cx = x + c, cy = y + r;
            const Cell& cell = raster.at(cx, cy);
            match = seg.owner_at(cx, cy) == static_cast<int>(panel_idx) &&
                    cell.kind == CellKind::Icon && cell.value == t.pattern[r][c] &&
                    !claimed.count({cx, cy});
          }
        if (!match) continue;
        for (int r = 0; r < th; ++r)
          for (int c = 0; c < tw; ++c) claimed.insert({x + c, y + r});
        Element e;
        e.role = t.role;
        e.icon_name = t.icon_name;
        e.bbox = cells_to_px(x, y, x + tw, y + th, raster.cell_px);
        out.push_back(std::move(e));
      }
    }
  }

  // leftovers: unnamed icons at half confidence, one per connected
  // component of equal icon id
  auto leftover = [&](int x, int y) {
    return raster.at(x, y).kind == CellKind::Icon && !claimed.count({x, y});
  };
  std::vector<char> seen(static_cast<size_t>(raster.width) * raster.height, 0);
  for (int y = area.y0; y < area.y1; ++y) {
    for (int x = area.x0; x < area.x1; ++x) {
      if (seen[static_cast<size_t>(y) * raster.width + x]) continue;
      if (seg.owner_at(x, y) != static_cast<int>(panel_idx) || !leftover(x, y)) continue;
      const std::string value = raster.at(x, y).value;
      auto same = [&](int cx, int cy) {
        return leftover(cx, cy) && raster.at(cx, cy).value == value;
      };
      auto boxes = components(raster, seg, panel_idx,
                              CellRect{x, y, area.x1, area.y1}, same);
      // components() restarts its own scan; take the first, mark its cells
      if (boxes.empty()) continue;
      CellRect b = boxes.front();
      for (int cy = b.y0; cy < b.y1; ++cy)
        for (int cx = b.x0; cx < b.x1; ++cx)
          if (same(cx, cy) && seg.owner_at(cx, cy) == static_cast<int>(panel_idx)) {
            seen[static_cast<size_t>(cy) * raster.width + cx] = 1;
            claimed.insert({cx, cy});
          }
      Element e;
      e.role = kRoleIcon;
      e.confidence = 0.5;
      e.bbox = cells_to_px(b.x0, b.y0, b.x1, b.y1, raster.cell_px);
      out.push_back(std::move(e));
    }
  }
  return out;
}

std::vector<Element> detect_widgets(const SymbolicRaster& raster, const Segmentation& seg,
                                    size_t panel_idx) {
  const Panel& panel = seg.panels[panel_idx];
  CellRect area = panel_cells(panel, raster.cell_px, raster.width, raster.height);
  std::vector<Element> out;
  auto fill_is = [&](int x, int y, const char* v) {
    const Cell& c = raster.at(x, y);
    return c.kind == CellKind::Fill && c.value == v;
  };

  auto component_elements = [&](const char* fill, const char* role, const char* text) {
    auto boxes = components(raster, seg, panel_idx, area,
                            [&](int x, int y) { return fill_is(x, y, fill); });
    for (const auto& b : boxes) {
      Element e;
      e.role = role;
      e.text = text;
      e.bbox = cells_to_px(b.x0, b.y0, b.x1, b.y1, raster.cell_px);
      out.push_back(std::move(e));
    }
  };

  component_elements("scrollbar", kRoleScrollbar, "");
  component_elements("button", kRoleButton, "");
  component_elements("menu", kRoleButton, "");
  component_elements("field", kRoleObject, "field");

  // reference lines: a 1-cell-wide column of one uniform non-chrome fill
  // spanning the panel's full height
  std::set<int> refline_cols;
  for (int x = area.x0; x < area.x1; ++x) {
    std::string value;
    bool uniform = area.y1 > area.y0;
    for (int y = area.y0; uniform && y < area.y1; ++y) {
      const Cell& c = raster.at(x, y);
      if (seg.owner_at(x, y) != static_cast<int>(panel_idx) || c.kind != CellKind::Fill ||
          is_chrome_fill(c.value) || (!value.empty() && c.value != value))
        uniform = false;
      else
        value = c.value;
    }
    if (!uniform) continue;
    auto column_same = [&](int cx) {
      if (cx < area.x0 || cx >= area.x1) return false;
      for (int y = area.y0; y < area.y1; ++y) {
        const Cell& c = raster.at(cx, y);
        if (seg.owner_at(cx, y) != static_cast<int>(panel_idx) ||
            c.kind != CellKind::Fill || c.value != value)
          return false;
      }
      return true;
    };
    if (column_same(x - 1) || column_same(x + 1)) continue;  // a block, not a line
    refline_cols.insert(x);
    Element e;
    e.role = kRoleReferenceLine;
    e.text = value;
    e.bbox = cells_to_px(x, area.y0, x + 1, area.y1, raster.cell_px);
    out.push_back(std::move(e));
  }

  // free-form blobs: any other non-chrome fill
  auto blob = [&](int x, int y) {
    const Cell& c = raster.at(x, y);
    return c.kind == CellKind::Fill && !is_chrome_fill(c.value) && !refline_cols.count(x);
  };
  std::vector<char> seen(static_cast<size_t>(raster.width) * raster.height, 0);
  for (int y = area.y0; y < area.y1; ++y) {
    for (int x = area.x0; x < area.x1; ++x) {
      if (seen[static_cast<size_t>(y) * raster.width + x]) continue;
      if (seg.owner_at(x, y) != static_cast<int>(panel_idx) || !blob(x, y)) continue;
      const std::string value = raster.at(x, y).value;
      auto same = [&](int cx, int cy) {
        return blob(cx, cy) && raster.at(cx, cy).value == value;
      };
      auto boxes =
          components(raster, seg, panel_idx, CellRect{x, y, area.x1, area.y1}, same);
      if (boxes.empty()) continue;
      CellRect b = boxes.front();
      for (int cy = b.y0; cy < b.y1; ++cy)
        for (int cx = b.x0; cx < b.x1; ++cx)
          if (seg.owner_at(cx, cy) == static_cast<int>(panel_idx) && same(cx, cy))
            seen[static_cast<size_t>(cy) * raster.width + cx] = 1;
      Element e;
      e.role = kRoleObject;
      e.text = value;
      e.bbox = cells_to_px(b.x0, b.y0, b.x1, b.y1, raster.cell_px);
      out.push_back(std::move(e));
    }
  }
  return out;
}

UIDocument parse_gui(const sim::Observation& obs, const IconTemplateSet& templates,
                     const ParserConfig& cfg) {
  Segmentation seg = segment_panels(obs);
  const SymbolicRaster& raster = obs.raster;
  UIDocument doc;

  for (size_t i = 0; i < seg.panels.size(); ++i) {
    Panel panel = seg.panels[i];
    auto texts = extract_text(raster, seg, i, cfg);
    auto icons = match_icons(raster, seg, i, templates);
    auto widgets = detect_widgets(raster, seg, i);

    // merge: buttons absorb text runs inside them; checkboxes absorb the
    // label run just right of the box
    std::vector<char> absorbed(texts.size(), 0);
    for (auto& w : widgets) {
      if (w.role != kRoleButton) continue;
      std::vector<size_t> inside;
      for (size_t t = 0; t < texts.size(); ++t)
        if (!absorbed[t] && w.bbox.contains(texts[t].bbox)) inside.push_back(t);
      std::sort(inside.begin(), inside.end(), [&](size_t a, size_t b) {
        return element_order(texts[a]) < element_order(texts[b]);
      });
      for (size_t t : inside) {
        if (!w.text.empty()) w.text += ' ';
        w.text += texts[t].text;
        absorbed[t] = 1;
      }
    }
    for (auto& ic : icons) {
      if (ic.role != kRoleCheckbox) continue;
      int gap_limit = 2 * raster.cell_px;
      size_t best = texts.size();
      int best_gap = gap_limit + 1;
      for (size_t t = 0; t < texts.size(); ++t) {
        if (absorbed[t] || texts[t].bbox.y != ic.bbox.y) continue;
        int gap = texts[t].bbox.x - (ic.bbox.x + ic.bbox.w);
        if (gap >= 0 && gap <= gap_limit && gap < best_gap) {
          best = t;
          best_gap = gap;
        }
      }
      if (best < texts.size()) {
        ic.text = texts[best].text;
        // widen to cover box + label so the label cells stay claimed
        const Rect& r = texts[best].bbox;
        int x1 = std::max(ic.bbox.x + ic.bbox.w, r.x + r.w);
        int y1 = std::max(ic.bbox.y + ic.bbox.h, r.y + r.h);
        ic.bbox.x = std::min(ic.bbox.x, r.x);
        ic.bbox.y = std::min(ic.bbox.y, r.y);
        ic.bbox.w = x1 - ic.bbox.x;
        ic.bbox.h = y1 - ic.bbox.y;
        absorbed[best] = 1;
      }
    }

    for (size_t t = 0; t < texts.size(); ++t)
      if (!absorbed[t]) panel.elements.push_back(std::move(texts[t]));
    for (auto& e : icons) panel.elements.push_back(std::move(e));
    for (auto& e : widgets) panel.elements.push_back(std::move(e));
    std::sort(panel.elements.begin(), panel.elements.end(),
              [](const Element& a, const Element& b) {
                return element_order(a) < element_order(b);
              });

    // completeness: count owned glyph/icon cells no element covers
    CellRect area = panel_cells(panel, raster.cell_px, raster.width, raster.height);
    int unclaimed = 0;
    for (int y = area.y0; y < area.y1; ++y)
      for (int x = area.x0; x < area.x1; ++x) {
        if (seg.owner_at(x, y) != static_cast<int>(i)) continue;
        CellKind k = raster.at(x, y).kind;
        if (k == CellKind::Fill) continue;
        int px = x * raster.cell_px, py = y * raster.cell_px;
        bool covered = false;
        for (const auto& e : panel.elements)
          if (e.bbox.contains(px, py)) {
            covered = true;
            break;
          }
        if (!covered) ++unclaimed;
      }
    panel.unclaimed = unclaimed;
    doc.panels.push_back(std::move(panel));
  }
  return doc;
}

}  // namespace ace::gui
