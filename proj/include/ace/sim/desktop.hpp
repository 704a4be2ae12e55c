#pragma once

#include <string>
#include <vector>

#include "ace/actions.hpp"
#include "ace/sim/state.hpp"
#include "ace/util.hpp"

namespace ace::sim {

// ---------------------------------------------------------------------------
// Symbolic raster: the deterministic screenshot stand-in. Each cell shows a
// glyph, an icon id, or a flat fill color.

enum class CellKind : uint8_t { Fill, Glyph, Icon };

struct Cell {
  CellKind kind = CellKind::Fill;
  std::string value = "desktop";  // fill color id, icon id, or 1-char glyph
  bool operator==(const Cell&) const = default;
};

struct SymbolicRaster {
  int width = 0, height = 0;  // cells
  int cell_px = 8;
  std::vector<Cell> cells;    // row-major

  bool operator==(const SymbolicRaster&) const = default;

  Cell& at(int x, int y) { return cells[static_cast<size_t>(y) * width + x]; }
  const Cell& at(int x, int y) const {
    return cells[static_cast<size_t>(y) * width + x];
  }
  bool in_bounds(int x, int y) const {
    return x >= 0 && y >= 0 && x < width && y < height;
  }
};

json raster_to_json(const SymbolicRaster& r);
SymbolicRaster raster_from_json(const json& j);
std::string raster_hash(const SymbolicRaster& r);

// Wire form of one cell: "f:<fill>", "g:<glyph>" or "i:<icon>".
std::string cell_encode(const Cell& c);
Cell cell_decode(const std::string& s);

// Coarse system metadata: window/panel names and boxes only, never leaf
// buttons or text. Panel-grade widgets are scroll areas and canvases.
struct PanelMeta {
  std::string name;
  Rect bbox;
  std::vector<PanelMeta> children;
  bool operator==(const PanelMeta&) const = default;
};

json panel_meta_to_json(const PanelMeta& m);
PanelMeta panel_meta_from_json(const json& j);

struct Observation {
  std::vector<PanelMeta> metadata;
  SymbolicRaster raster;
  bool operator==(const Observation&) const = default;
};

json observation_to_json(const Observation& o);
Observation observation_from_json(const json& j);

// ---------------------------------------------------------------------------
// Execution

struct DispatchResult {
  int index = 0;
  std::string action;   // canonical rendering
  std::string target;   // widget id, binding combo, or empty
  std::string outcome;  // short token, e.g. "click", "no_target", "binding"
  std::string detail;   // applied mutations / effect errors
  bool operator==(const DispatchResult&) const = default;
};

struct ExecReport {
  std::vector<DispatchResult> results;
  bool operator==(const ExecReport&) const = default;
};

json report_to_json(const ExecReport& r);
ExecReport report_from_json(const json& j);

class OutOfBoundsError : public std::runtime_error {
 public:
  explicit OutOfBoundsError(const std::string& what) : std::runtime_error(what) {}
};

// Loads the declared initial state from a task document's "initial_state"
// field. Repeated loads of the same document yield equal states.
EnvState load_task(const json& task_doc);  // throws SchemaError

// Applies the script in order. Hit-testing picks the topmost visible widget
// at the cursor; scrolled children are tested at their rendered position.
// Scripts with out-of-bounds coordinates are refused before any mutation.
std::pair<EnvState, ExecReport> execute(const EnvState& state,
                                        const actions::ActionScript& script);

// Pure render of the current state: panel metadata plus the full raster.
Observation observe(const EnvState& state);

// Raster half of observe(), exposed for similarity tests.
SymbolicRaster render(const EnvState& state);

// The widget id under a point, accounting for z-order, visibility and scroll
// offsets. Empty when only the desktop is hit. Exposed for tests.
std::string hit_test(const EnvState& state, int x, int y);

}  // namespace ace::sim
