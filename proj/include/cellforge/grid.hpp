#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cellforge/tech.hpp"

namespace cellforge {

// (layer; row; column), coordinates in absolute nm.
struct Vertex {
  int layer = 0;
  Nm row = 0;
  Nm col = 0;

  auto operator<=>(const Vertex&) const = default;
};

struct Edge {
  int a = -1;  // vertex indices, a < b
  int b = -1;
  bool is_via = false;  // endpoints on adjacent layers, equal (row, col)
  Nm length = 0;        // Euclidean length; via length is 0 in graph terms
};

struct Arc {
  int from = -1;
  int to = -1;
  int edge = -1;  // parent undirected edge
};

// Directed arc view: every edge yields two opposing arcs.
struct ArcView {
  std::vector<Arc> arcs;
  std::vector<std::vector<int>> out;  // A+(v): arc indices leaving v
  std::vector<std::vector<int>> in;   // A-(v): arc indices entering v
};

class GridGraph {
 public:
  GridGraph() = default;

  // Builds the relative layered grid graph for a cell canvas of w_total nm.
  GridGraph(const TechConfig& cfg, Nm w_total);

  Nm width() const { return width_; }
  const TechConfig& tech() const { return tech_; }

  const std::vector<Nm>& columns(int layer) const { return cols_[layer - 1]; }
  const std::vector<Nm>& rows() const { return rows_; }

  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // -1 when no such vertex exists.
  int vertex_index(int layer, Nm row, Nm col) const;
  const Vertex& vertex(int idx) const { return vertices_[idx]; }

  // Edge between two vertex indices, or -1.
  int edge_between(int va, int vb) const;

  std::vector<int> edges_of_layer(int layer) const;      // intra-layer
  std::vector<int> via_edges(int lower_layer) const;     // lower <-> lower+1

  ArcView arc_view() const;

  // CPP index the cell width must reach for metal at column x to stay inside
  // the cell. Horizontal layers may touch the cell's right edge; vertical
  // layers and vias must stay strictly inside (boundary columns are dummy).
  int min_cw_for_metal(int layer, Nm x) const;
  // x == 0 is the left cell edge: never usable for metal.
  bool column_usable(int layer, Nm x, int cw_cpp) const;

  std::string dump() const;  // structured-text listing for golden tests

 private:
  TechConfig tech_;
  Nm width_ = 0;
  std::array<std::vector<Nm>, kLayerCount> cols_;
  std::vector<Nm> rows_;
  std::vector<Vertex> vertices_;
  std::vector<Edge> edges_;
  std::map<std::tuple<int, Nm, Nm>, int> vertex_idx_;
  std::map<std::pair<int, int>, int> edge_idx_;
};

// Column sets per Alg-style creation: vertical layers get arithmetic
// progressions delta + k*pitch <= w_total; horizontal layers the merged
// union of their vertical neighbours (C5 is empty, so C4 = C3).
std::array<std::vector<Nm>, kLayerCount> build_column_sets(const TechConfig& cfg,
                                                           Nm w_total);

// Shared row set: h * mp2 for h = 1..t.
std::vector<Nm> build_row_set(const TechConfig& cfg);

}  // namespace cellforge
