#pragma once

// Brute-force reference for small cells, independent of the constraint model
// and solver: enumerates every placement and checks routing feasibility by
// exhaustive search for vertex-disjoint per-net connection trees on the grid.

#include <map>
#include <string>
#include <vector>

#include "cellforge/grid.hpp"
#include "cellforge/netlist.hpp"

namespace cellforge::oracle {

struct Placement {
  // device id -> (poly column ordinal, flip)
  std::map<std::string, std::pair<int, int>> pos;
};

// Rule-free technology for oracle comparisons: width-dominant objective,
// pins and metal rules off, unit gate cuts.
TechConfig bare_tech(Nm mp3, Nm delta3, int c_db);

// Is some placement of the netlist routable within `width_cpp`?
bool width_feasible(const Netlist& netlist, const TechConfig& cfg, int width_cpp);

// Smallest feasible width in CPP, or -1 when nothing fits on the canvas.
int min_feasible_width(const Netlist& netlist, const TechConfig& cfg);

// Routing feasibility of one fixed placement at the given width.
bool placement_routable(const Netlist& netlist, const TechConfig& cfg,
                        const Placement& p, int width_cpp);

}  // namespace cellforge::oracle
