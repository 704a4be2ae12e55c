#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ace/gui/document.hpp"
#include "ace/sim/desktop.hpp"

namespace ace::gui {

// Icon pattern: a rectangular grid of icon ids that must match the raster
// cell-for-cell. `role` is the element role a match produces.
struct IconTemplate {
  std::string icon_name;
  std::string role = kRoleIcon;                 // usually icon; cb_on/off → checkbox
  std::vector<std::vector<std::string>> pattern;  // rows of icon ids

  bool operator==(const IconTemplate&) const = default;
};

struct IconTemplateSet {
  std::vector<IconTemplate> templates;

  bool operator==(const IconTemplateSet&) const = default;

  // Throws std::invalid_argument on duplicate pattern signatures or
  // malformed grids.
  static IconTemplateSet from_json(const json& j);
  json to_json() const;
};

struct ParserConfig {
  double noise = 0.0;  // per-glyph drop probability in extract_text
  uint64_t seed = 0;   // noise seed; mixed with the panel name per panel
};

// Panel segmentation with a cell-ownership mask. Overlapping panels resolve
// to the topmost (latest in z/flatten order); uncovered cells belong to the
// synthetic trailing "Desktop" panel.
struct Segmentation {
  std::vector<Panel> panels;  // empty elements; Desktop last
  std::vector<int> owner;     // row-major cell -> index into panels
  int width = 0, height = 0;  // cells

  int owner_at(int x, int y) const { return owner[static_cast<size_t>(y) * width + x]; }
};

Segmentation segment_panels(const sim::Observation& obs);

// Maximal horizontal runs of glyph cells owned by the panel. With noise > 0
// each glyph is dropped with probability `noise` using engine
// mt19937_64(seed ^ fnv1a64(panel.name)) and standard_uniform draws in cell
// scan order.
std::vector<Element> extract_text(const sim::SymbolicRaster& raster,
                                  const Segmentation& seg, size_t panel_idx,
                                  const ParserConfig& cfg = {});

// Template matches claim their cells (scan order: template order, then
// top-left positions). Remaining icon cells form unnamed icon elements with
// confidence 0.5, one per connected component of equal icon id.
std::vector<Element> match_icons(const sim::SymbolicRaster& raster,
                                 const Segmentation& seg, size_t panel_idx,
                                 const IconTemplateSet& templates);

// Fill-based widgets: scrollbar runs, 1-cell-wide full-panel-height
// reference lines, button/menu fills, field fills, and free-form object
// blobs (non-chrome fills).
std::vector<Element> detect_widgets(const sim::SymbolicRaster& raster,
                                    const Segmentation& seg, size_t panel_idx);

// Full pipeline: segment, extract per panel, merge (buttons and checkboxes
// absorb their labels), sort into reading order, count unclaimed cells.
UIDocument parse_gui(const sim::Observation& obs, const IconTemplateSet& templates,
                     const ParserConfig& cfg = {});

}  // namespace ace::gui
