#include "cellforge/grid.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <tuple>

namespace cellforge {

std::array<std::vector<Nm>, kLayerCount> build_column_sets(const TechConfig& cfg,
                                                           Nm w_total) {
  if (w_total <= 0) throw TechError("cell width must be positive");
  std::array<std::vector<Nm>, kLayerCount> cols;
  for (int i = 1; i <= kLayerCount; i += 2) {
    std::vector<Nm>& c = cols[i - 1];
    for (Nm x = cfg.delta(i); x <= w_total; x += cfg.mp(i)) c.push_back(x);
    if (c.empty()) {
      throw TechError("layer " + std::to_string(i) + " has an empty column set");
    }
  }
  for (int i = 2; i <= kLayerCount; i += 2) {
    // Union of the vertical neighbours, duplicates merged. The implicit C5 is
    // empty, so L4 inherits exactly C3.
    std::set<Nm> merged(cols[i - 2].begin(), cols[i - 2].end());
    if (i < kLayerCount) merged.insert(cols[i].begin(), cols[i].end());
    cols[i - 1].assign(merged.begin(), merged.end());
  }
  return cols;
}

std::vector<Nm> build_row_set(const TechConfig& cfg) {
  std::vector<Nm> rows;
  for (int h = 1; h <= cfg.row_count; ++h) rows.push_back(h * cfg.mp(2));
  return rows;
}

GridGraph::GridGraph(const TechConfig& cfg, Nm w_total) : tech_(cfg), width_(w_total) {
  cols_ = build_column_sets(cfg, w_total);
  rows_ = build_row_set(cfg);

  // Vertices in (layer, row, column) order so identical inputs give identical
  // indices.
  for (int layer = 1; layer <= kLayerCount; ++layer) {
    for (Nm r : rows_) {
      for (Nm c : cols_[layer - 1]) {
        vertex_idx_[{layer, r, c}] = static_cast<int>(vertices_.size());
        vertices_.push_back({layer, r, c});
      }
    }
  }

  auto add_edge = [&](int va, int vb, bool via) {
    if (va > vb) std::swap(va, vb);
    Edge e;
    e.a = va;
    e.b = vb;
    e.is_via = via;
    if (!via) {
      const Vertex& u = vertices_[va];
      const Vertex& v = vertices_[vb];
      e.length = std::abs(u.col - v.col) + std::abs(u.row - v.row);
    }
    edge_idx_[{va, vb}] = static_cast<int>(edges_.size());
    edges_.push_back(e);
  };

  for (int layer = 1; layer <= kLayerCount; ++layer) {
    const auto& cols = cols_[layer - 1];
    if (layer_is_horizontal(layer)) {
      // along each row between column-adjacent vertices
      for (Nm r : rows_) {
        for (size_t k = 1; k < cols.size(); ++k) {
          add_edge(vertex_index(layer, r, cols[k - 1]), vertex_index(layer, r, cols[k]), false);
        }
      }
    } else {
      // along each column between row-adjacent vertices
      for (Nm c : cols) {
        for (size_t k = 1; k < rows_.size(); ++k) {
          add_edge(vertex_index(layer, rows_[k - 1], c), vertex_index(layer, rows_[k], c), false);
        }
      }
    }
    if (layer > 1) {
      // vias iff adjacent layers share (row, col)
      for (Nm r : rows_) {
        for (Nm c : cols) {
          int below = vertex_index(layer - 1, r, c);
          if (below >= 0) add_edge(below, vertex_index(layer, r, c), true);
        }
      }
    }
  }
}

int GridGraph::vertex_index(int layer, Nm row, Nm col) const {
  auto it = vertex_idx_.find({layer, row, col});
  return it == vertex_idx_.end() ? -1 : it->second;
}

int GridGraph::edge_between(int va, int vb) const {
  if (va > vb) std::swap(va, vb);
  auto it = edge_idx_.find({va, vb});
  return it == edge_idx_.end() ? -1 : it->second;
}

std::vector<int> GridGraph::edges_of_layer(int layer) const {
  std::vector<int> out;
  for (size_t i = 0; i < edges_.size(); ++i) {
    if (!edges_[i].is_via && vertices_[edges_[i].a].layer == layer) {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

std::vector<int> GridGraph::via_edges(int lower_layer) const {
  std::vector<int> out;
  for (size_t i = 0; i < edges_.size(); ++i) {
    if (edges_[i].is_via && vertices_[edges_[i].a].layer == lower_layer) {
      out.push_back(static_cast<int>(i));
    }
  }
  return out;
}

ArcView GridGraph::arc_view() const {
  ArcView av;
  av.out.resize(vertices_.size());
  av.in.resize(vertices_.size());
  for (size_t e = 0; e < edges_.size(); ++e) {
    for (int dir = 0; dir < 2; ++dir) {
      Arc a;
      a.from = dir == 0 ? edges_[e].a : edges_[e].b;
      a.to = dir == 0 ? edges_[e].b : edges_[e].a;
      a.edge = static_cast<int>(e);
      int idx = static_cast<int>(av.arcs.size());
      av.arcs.push_back(a);
      av.out[a.from].push_back(idx);
      av.in[a.to].push_back(idx);
    }
  }
  return av;
}

int GridGraph::min_cw_for_metal(int layer, Nm x) const {
  Nm cpp = tech_.mp(1);
  if (layer_is_horizontal(layer)) return static_cast<int>((x + cpp - 1) / cpp);
  return static_cast<int>(x / cpp) + 1;
}

bool GridGraph::column_usable(int layer, Nm x, int cw_cpp) const {
  if (x == 0) return false;
  return min_cw_for_metal(layer, x) <= cw_cpp;
}

std::string GridGraph::dump() const {
  std::ostringstream os;
  os << "grid width " << width_ << "\n";
  os << "rows";
  for (Nm r : rows_) os << " " << r;
  os << "\n";
  for (int layer = 1; layer <= kLayerCount; ++layer) {
    os << "columns L" << layer;
    for (Nm c : cols_[layer - 1]) os << " " << c;
    os << "\n";
  }
  for (const auto& v : vertices_) {
    os << "v " << v.layer << " " << v.row << " " << v.col << "\n";
  }
  for (const auto& e : edges_) {
    const Vertex& a = vertices_[e.a];
    const Vertex& b = vertices_[e.b];
    os << (e.is_via ? "via " : "e ") << a.layer << " " << a.row << " " << a.col
       << " - " << b.layer << " " << b.row << " " << b.col << " len " << e.length
       << "\n";
  }
  return os.str();
}

}  // namespace cellforge
