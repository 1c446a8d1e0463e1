#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cellforge/grid.hpp"
#include "cellforge/model.hpp"
#include "cellforge/netlist.hpp"

namespace cellforge {

// Terminal access convention on the placement layer. Devices occupy one
// interior poly column each (fold first); a device at column k exposes
//   gate          -> (gate row of its kind,  x_k)
//   left  S/D     -> (S/D row of its kind,   x_k)      [slot k-1..k]
//   right S/D     -> (S/D row of its kind,   x_{k+1})  [slot k..k+1]
// flip == 0 puts the source on the left. Adjacent devices share the S/D
// vertex between them, which is exactly diffusion sharing.
struct AccessPoint {
  int row_idx = -1;  // index into GridGraph::rows()
  int col_idx = -1;  // index into GridGraph::columns(1)

  auto operator<=>(const AccessPoint&) const = default;
};

enum class ArcKind { Metal, Via, Entry, MergeGate, MergeSd };

// Directed arc of the routing flow network. Metal/Via arcs mirror grid
// edges on L2..L4; Entry arcs connect a terminal's L1 vertex to M0 above it;
// merge arcs are the MOL shorts through a column (gate poly or LISD strand).
struct FlowArc {
  ArcKind kind = ArcKind::Metal;
  int from = -1;  // grid vertex index
  int to = -1;
  int edge = -1;      // grid edge for Metal/Via/Entry, else -1
  int col_idx = -1;   // poly column for Entry/Merge arcs
  int row_idx = -1;   // row for Entry arcs
  std::string net;    // Entry/Merge arcs belong to one net
};

struct Commodity {
  std::string net;
  TermRef sink;
  std::map<int, int> flow;  // arc index -> bool var
};

struct DeviceVars {
  int flip = -1;              // bool
  int col = -1;               // int, poly column ordinal
  std::map<int, int> at;      // column -> bool
  std::map<int, int> atf[2];  // column -> (at AND flip==f)
};

// Everything the extractor and the acceleration passes need to find their
// way back from an assignment to geometry.
class EncodedCell {
 public:
  ConstraintModel model;
  TechConfig tech;
  ObjectiveWeights weights;  // effective weights used by the objective
  Netlist netlist;           // unit-width devices
  GridGraph grid;
  Nm w_total = 0;

  std::vector<int> interior_cols;  // candidate device columns (C1 ordinals)
  std::map<std::string, DeviceVars> devices;
  std::map<int, int> scx_gate;  // column ordinal -> bool (gate cut)
  std::map<int, int> scx_sd;    // slot access column ordinal -> bool (LISD cut)
  std::map<int, int> brk;       // interior column -> bool (diffusion break)
  int cw = -1;                  // int var, cell width in CPP

  std::map<std::string, NetTerminals> terminals;
  std::vector<std::string> routed_nets;

  std::vector<FlowArc> arcs;
  std::vector<Commodity> commodities;

  // per net: metal / via / pad / vertex-occupancy vars
  std::map<std::string, std::map<int, int>> wire;     // grid edge -> var
  std::map<std::string, std::map<int, int>> via;      // grid via edge -> var
  std::map<std::string, std::map<int, int>> pad;      // L2 vertex -> var (V0 pad)
  std::map<std::string, std::map<int, int>> occ;      // routing vertex -> var

  // geometric variables per routing vertex: [0] = L/F, [1] = R/B
  std::map<int, std::array<int, 2>> gv;

  std::vector<int> m2_row;  // per row: some M2 segment present

  // per net: total wirelength integer, lower-bounded by the terminal x-span
  std::map<std::string, int> net_wl;

  // SGD indicators
  std::map<int, int> share_gate;              // column -> bool
  std::map<std::pair<int, int>, int> share_sd;  // (row kind 0=N,1=P, col) -> bool

  // pins
  struct PinVars {
    std::string net;
    std::vector<int> row;                 // per row index
    std::map<std::pair<int, int>, int> rep;  // (row, col-ordinal in C2) -> bool
    std::map<int, int> open;              // M1 column ordinal (C3) -> counts var
  };
  std::map<std::string, PinVars> pins;
  std::map<int, int> m1_track_used;  // C3 ordinal -> bool

  // terminal access helpers
  int gate_row(MosKind k) const;
  int sd_row(MosKind k) const;
  // access column for a role at device column c under flip f
  int access_col(TermRole role, int flip, int c) const;

  Nm col_x(int ordinal) const { return grid.columns(1)[ordinal]; }
  Nm row_y(int idx) const { return grid.rows()[idx]; }
};

struct EncodeOptions {
  std::optional<ObjectiveWeights> weights;  // override tech weights
  std::optional<bool> m0_pins;              // override tech pin enablement
};

// Builds the full constraint model for one cell on the Eq-1 canvas.
// Requires every transistor to have width_units == 1 (run fold_transistors
// first).
EncodedCell encode_cell(const Netlist& netlist, const TechConfig& cfg,
                        const EncodeOptions& opts = {});

}  // namespace cellforge
