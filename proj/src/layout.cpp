#include "cellforge/layout.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <cctype>
#include <sstream>
#include <stdexcept>

namespace cellforge {

long long recompose_objective(const Metrics& m, const ObjectiveWeights& wt) {
  return wt.cw * m.cw_cpp + wt.wl * m.wirelength_nm - wt.sgd * m.sgd - wt.dbx * m.dbx +
         wt.m2 * m.m2_tracks;
}

int AuditReport::count(const std::string& rule) const {
  int n = 0;
  for (const auto& i : issues) n += i.rule == rule;
  return n;
}

namespace {

// M0 presence of a net at an exact point: a covering segment, a contact pad
// or a via landing there.
bool m0_present(const Layout& l, const std::string& net, Nm row, Nm x) {
  for (const auto& s : l.segments) {
    if (s.layer == kLayerM0 && s.net == net && s.track == row && s.lo <= x && x <= s.hi) {
      return true;
    }
  }
  for (const auto& v : l.vias) {
    if (v.net == net && v.row == row && v.col == x && (v.lower_layer == 1 || v.lower_layer == 2)) {
      return true;
    }
  }
  return false;
}

bool m1_track_blocked(const Layout& l, Nm x) {
  for (const auto& s : l.segments) {
    if (s.layer == kLayerM1 && s.track == x) return true;
  }
  for (const auto& v : l.vias) {
    if (v.col == x && (v.lower_layer == 2 || v.lower_layer == 3)) return true;
  }
  return false;
}

std::vector<int> pin_access_tracks(const Layout& l, const TechConfig& cfg,
                                   const std::string& net, Nm row) {
  std::vector<int> out;
  Nm w = static_cast<Nm>(l.width_cpp) * cfg.mp(1);
  int k = 0;
  for (Nm x = cfg.delta(3); x <= w; x += cfg.mp(3), ++k) {
    if (x <= 0 || x >= w) continue;  // boundary M1 columns are dummy
    if (m1_track_blocked(l, x)) continue;
    if (m0_present(l, net, row, x)) out.push_back(k);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Extraction

Layout extract_layout(const EncodedCell& ec, const std::vector<long long>& a) {
  if (a.size() != ec.model.var_count()) {
    throw std::invalid_argument("extract: incomplete assignment");
  }
  Layout l;
  l.cell = ec.netlist.name;
  l.cpp = ec.tech.mp(1);
  l.width_cpp = static_cast<int>(a[ec.cw]);

  std::map<int, std::pair<bool, bool>> device_at;  // col -> (P present, N present)
  for (const auto& tr : ec.netlist.transistors) {
    const DeviceVars& dv = ec.devices.at(tr.id);
    PlacedDevice d;
    d.id = tr.id;
    d.kind = tr.kind;
    d.flip = a[dv.flip] != 0;
    d.gate_net = tr.gate_net;
    d.source_net = tr.source_net;
    d.drain_net = tr.drain_net;
    d.col = -1;
    for (const auto& [c, at] : dv.at) {
      if (a[at] != 0) d.col = c;
    }
    if (d.col < 0) throw std::invalid_argument("extract: device '" + tr.id + "' unplaced");
    auto& pn = device_at[d.col];
    (tr.kind == MosKind::PMOS ? pn.first : pn.second) = true;
    l.devices.push_back(d);
  }

  for (const auto& [c, b] : ec.brk) {
    if (a[b] != 0) l.break_cols.push_back(c);
  }

  // gate cuts where they separate or pair with something real
  std::set<int> gate_cuts;
  for (const auto& [c, v] : ec.scx_gate) {
    if (a[v] != 0 && device_at.count(c)) gate_cuts.insert(c);
  }
  for (const auto& [c, v] : ec.scx_gate) {
    if (a[v] == 0 || gate_cuts.count(c)) continue;
    if (gate_cuts.count(c - 1) || gate_cuts.count(c + 1)) gate_cuts.insert(c);
  }
  for (int c : gate_cuts) l.cuts.push_back({CutShape::Gate, c});
  for (const auto& [k, v] : ec.scx_sd) {
    if (a[v] == 0) continue;
    bool terminal_here = device_at.count(k) || device_at.count(k - 1);
    if (terminal_here) l.cuts.push_back({CutShape::Lisd, k});
  }

  // metal runs per (net, layer, track)
  const GridGraph& g = ec.grid;
  for (const auto& [net, edges] : ec.wire) {
    std::map<std::pair<int, Nm>, std::vector<std::pair<Nm, Nm>>> runs;
    for (const auto& [e, var] : edges) {
      if (a[var] == 0) continue;
      const Vertex& va = g.vertex(g.edges()[e].a);
      const Vertex& vb = g.vertex(g.edges()[e].b);
      if (layer_is_horizontal(va.layer)) {
        runs[{va.layer, va.row}].push_back({std::min(va.col, vb.col), std::max(va.col, vb.col)});
      } else {
        runs[{va.layer, va.col}].push_back({std::min(va.row, vb.row), std::max(va.row, vb.row)});
      }
    }
    for (auto& [key, spans] : runs) {
      std::sort(spans.begin(), spans.end());
      Nm lo = spans[0].first, hi = spans[0].second;
      for (size_t i = 1; i <= spans.size(); ++i) {
        if (i < spans.size() && spans[i].first == hi) {
          hi = spans[i].second;
          continue;
        }
        l.segments.push_back({key.first, key.second, lo, hi, net});
        if (i < spans.size()) {
          lo = spans[i].first;
          hi = spans[i].second;
        }
      }
    }
    for (const auto& [e, var] : ec.via.at(net)) {
      if (a[var] == 0) continue;
      const Vertex& va = g.vertex(g.edges()[e].a);
      l.vias.push_back({va.layer, va.row, va.col, net});
    }
    for (const auto& [v2, var] : ec.pad.at(net)) {
      if (a[var] == 0) continue;
      const Vertex& vx = g.vertex(v2);
      l.vias.push_back({1, vx.row, vx.col, net});
    }
  }
  std::sort(l.segments.begin(), l.segments.end(), [](const Segment& x, const Segment& y) {
    return std::tie(x.layer, x.track, x.lo, x.net) < std::tie(y.layer, y.track, y.lo, y.net);
  });
  std::sort(l.vias.begin(), l.vias.end(), [](const ViaShape& x, const ViaShape& y) {
    return std::tie(x.lower_layer, x.row, x.col, x.net) <
           std::tie(y.lower_layer, y.row, y.col, y.net);
  });

  // pins: encoded row/representative when present, else first M0 presence
  for (const auto& pin : ec.netlist.pins) {
    PinShape ps;
    ps.net = pin.net;
    auto it = ec.pins.find(pin.net);
    if (it != ec.pins.end()) {
      for (size_t r = 0; r < it->second.row.size(); ++r) {
        if (a[it->second.row[r]] != 0) ps.row = ec.row_y(static_cast<int>(r));
      }
      for (const auto& [key, rep] : it->second.rep) {
        if (a[rep] != 0) ps.rep_col = g.columns(2)[key.second];
      }
    } else {
      bool found = false;
      for (Nm y : g.rows()) {
        for (Nm x : g.columns(2)) {
          if (!found && x > 0 && m0_present(l, pin.net, y, x)) {
            ps.row = y;
            ps.rep_col = x;
            found = true;
          }
        }
      }
      if (!found) continue;
    }
    ps.access_tracks = pin_access_tracks(l, ec.tech, pin.net, ps.row);
    l.pins.push_back(ps);
  }
  return l;
}

// ---------------------------------------------------------------------------
// Metrics

Metrics compute_metrics(const Layout& l, const TechConfig& cfg) {
  Metrics m;
  m.cw_cpp = l.width_cpp;
  for (const auto& s : l.segments) m.wirelength_nm += s.length();
  for (const auto& v : l.vias) {
    if (v.lower_layer >= 2) m.wirelength_nm += cfg.via_weight();
  }
  std::set<Nm> m2tracks;
  for (const auto& s : l.segments) {
    if (s.layer == kLayerM2) m2tracks.insert(s.track);
  }
  m.m2_tracks = static_cast<int>(m2tracks.size());

  std::set<int> gate_cut_cols, lisd_cut_cols;
  for (const auto& c : l.cuts) {
    (c.kind == CutShape::Gate ? gate_cut_cols : lisd_cut_cols).insert(c.col);
  }
  std::map<int, const PlacedDevice*> prow, nrow;
  for (const auto& d : l.devices) (d.kind == MosKind::PMOS ? prow : nrow)[d.col] = &d;

  // vertical gate sharing
  for (const auto& [c, p] : prow) {
    auto it = nrow.find(c);
    if (it == nrow.end()) continue;
    if (p->gate_net == it->second->gate_net && !gate_cut_cols.count(c)) ++m.sgd;
  }
  // horizontal diffusion sharing per row and slot
  for (const auto* row : {&prow, &nrow}) {
    for (const auto& [c, d] : *row) {
      auto right = row->find(c + 1);
      if (right == row->end()) continue;
      if (d->right_net() == right->second->left_net() && !lisd_cut_cols.count(c + 1)) {
        ++m.sgd;
      }
    }
  }
  for (int c : l.break_cols) m.dbx += c;
  for (const auto& p : l.pins) m.pin_access[p.net] = static_cast<int>(p.access_tracks.size());
  return m;
}

// ---------------------------------------------------------------------------
// Audit

namespace {

struct EndPoint {
  Nm track;
  Nm along;
  bool is_hi;  // segment end on the +side
  Nm x, y;
};

void audit_geometry(const Layout& l, const TechConfig& cfg, std::vector<AuditIssue>& out) {
  Nm w = static_cast<Nm>(l.width_cpp) * cfg.mp(1);

  // boundary rules: M0/M2 may touch the right edge, M1 and vias stay inside
  for (const auto& s : l.segments) {
    bool bad = false;
    if (layer_is_horizontal(s.layer)) bad = s.lo <= 0 || s.hi > w;
    else bad = s.track <= 0 || s.track >= w;
    if (bad) {
      out.push_back({"boundary", "segment on layer " + std::to_string(s.layer) + " at track " +
                                     std::to_string(s.track)});
    }
  }
  for (const auto& v : l.vias) {
    bool bad = v.lower_layer >= 2 ? (v.col <= 0 || v.col >= w) : (v.col <= 0 || v.col > w);
    if (bad) {
      out.push_back({"boundary", "via" + std::to_string(v.lower_layer) + " at x=" +
                                     std::to_string(v.col)});
    }
  }

  // same-track exclusivity (touching counts: the shared vertex would short)
  std::map<std::pair<int, Nm>, std::vector<const Segment*>> by_track;
  for (const auto& s : l.segments) by_track[{s.layer, s.track}].push_back(&s);
  for (auto& [key, segs] : by_track) {
    std::sort(segs.begin(), segs.end(),
              [](const Segment* a, const Segment* b) { return a->lo < b->lo; });
    for (size_t i = 1; i < segs.size(); ++i) {
      if (segs[i]->lo <= segs[i - 1]->hi) {
        out.push_back({"track-overlap", segs[i - 1]->net + " and " + segs[i]->net +
                                            " on layer " + std::to_string(key.first) +
                                            " track " + std::to_string(key.second)});
      }
    }
  }

  // minimum area per segment
  for (const auto& s : l.segments) {
    Nm mar = cfg.rules.layer(s.layer).mar_length;
    if (mar > 0 && s.length() < mar) {
      out.push_back({"mar", s.net + " segment of length " + std::to_string(s.length()) +
                                " on layer " + std::to_string(s.layer)});
    }
  }

  // endpoint rules on grid-adjacent tracks
  auto cols = build_column_sets(cfg, w);
  auto rows = build_row_set(cfg);
  for (int layer = 2; layer <= kLayerCount; ++layer) {
    const LayerRules& rules = cfg.rules.layer(layer);
    if (rules.eol_spacing <= 0 && rules.shr_distance <= 0) continue;
    const std::vector<Nm>& tracks = layer_is_horizontal(layer) ? rows : cols[layer - 1];
    std::map<Nm, std::vector<EndPoint>> eps;
    for (const auto& s : l.segments) {
      if (s.layer != layer) continue;
      bool horiz = layer_is_horizontal(layer);
      eps[s.track].push_back({s.track, s.lo, false, horiz ? s.lo : s.track,
                              horiz ? s.track : s.lo});
      eps[s.track].push_back({s.track, s.hi, true, horiz ? s.hi : s.track,
                              horiz ? s.track : s.hi});
    }
    for (size_t t = 0; t + 1 < tracks.size(); ++t) {
      auto a = eps.find(tracks[t]);
      auto b = eps.find(tracks[t + 1]);
      if (a == eps.end() || b == eps.end()) continue;
      for (const auto& u : a->second) {
        for (const auto& v : b->second) {
          Nm d2v = dist2(u.x - v.x, u.y - v.y);
          if (rules.eol_spacing > 0 && d2v < rules.eol_spacing * rules.eol_spacing) {
            out.push_back({"eol", "ends at (" + std::to_string(u.x) + "," +
                                      std::to_string(u.y) + ") and (" + std::to_string(v.x) +
                                      "," + std::to_string(v.y) + ") on layer " +
                                      std::to_string(layer)});
          } else if (rules.shr_distance > 0 && u.is_hi == v.is_hi &&
                     std::abs(u.along - v.along) < rules.shr_distance) {
            out.push_back({"shr", "aligned ends on adjacent tracks of layer " +
                                      std::to_string(layer)});
          }
        }
      }
    }
  }

  // via separation per class
  for (int lower = 2; lower <= 3; ++lower) {
    Nm radius = cfg.rules.layer(lower + 1).via_separation_radius;
    if (radius <= 0) continue;
    std::vector<const ViaShape*> vs;
    for (const auto& v : l.vias) {
      if (v.lower_layer == lower) vs.push_back(&v);
    }
    for (size_t i = 0; i < vs.size(); ++i) {
      for (size_t j = i + 1; j < vs.size(); ++j) {
        Nm d2v = dist2(vs[i]->col - vs[j]->col, vs[i]->row - vs[j]->row);
        if (d2v > 0 && d2v < radius * radius) {
          out.push_back({"via-separation", "vias at (" + std::to_string(vs[i]->col) + "," +
                                               std::to_string(vs[i]->row) + ") and (" +
                                               std::to_string(vs[j]->col) + "," +
                                               std::to_string(vs[j]->row) + ")"});
        }
      }
    }
  }

  // parallel run length, net-agnostic over co-occupied grid columns
  for (int layer = 2; layer <= kLayerCount; ++layer) {
    const LayerRules& rules = cfg.rules.layer(layer);
    if (rules.prl.empty()) continue;
    const std::vector<Nm>& tracks = layer_is_horizontal(layer) ? rows : cols[layer - 1];
    const std::vector<Nm>& alongs = layer_is_horizontal(layer) ? cols[layer - 1] : rows;
    auto occupied = [&](Nm track, Nm pos) {
      for (const auto& s : l.segments) {
        if (s.layer == layer && s.track == track && s.lo <= pos && pos <= s.hi) return true;
      }
      return false;
    };
    for (const auto& tier : rules.prl) {
      for (size_t t1 = 0; t1 < tracks.size(); ++t1) {
        for (size_t t2 = t1 + 1; t2 < tracks.size(); ++t2) {
          if (tracks[t2] - tracks[t1] >= tier.spacing) continue;
          Nm run_start = -1, run_end = -1;
          Nm prev = -1;
          bool prev_both = false;
          for (Nm pos : alongs) {
            bool both = occupied(tracks[t1], pos) && occupied(tracks[t2], pos);
            if (both && prev_both && prev >= 0) {
              if (run_start < 0) run_start = prev;
              run_end = pos;
            } else if (!both) {
              run_start = run_end = -1;
            }
            if (run_start >= 0 && run_end - run_start > tier.run_length) {
              out.push_back({"prl", "parallel run on layer " + std::to_string(layer) +
                                        " tracks " + std::to_string(tracks[t1]) + "/" +
                                        std::to_string(tracks[t2])});
              run_start = run_end = -1;
            }
            prev = pos;
            prev_both = both;
          }
        }
      }
    }
  }
}

void audit_placement(const Layout& l, const TechConfig& cfg, std::vector<AuditIssue>& out) {
  std::map<int, const PlacedDevice*> prow, nrow;
  for (const auto& d : l.devices) {
    auto& row = d.kind == MosKind::PMOS ? prow : nrow;
    if (d.col < 1 || d.col + 1 > l.width_cpp) {
      out.push_back({"placement", "device " + d.id + " outside the active width"});
    }
    if (row.count(d.col)) {
      out.push_back({"placement", "devices " + row[d.col]->id + " and " + d.id +
                                      " overlap at column " + std::to_string(d.col)});
    }
    row[d.col] = &d;
  }
  std::set<int> gate_cuts, lisd_cuts;
  for (const auto& c : l.cuts) {
    (c.kind == CutShape::Gate ? gate_cuts : lisd_cuts).insert(c.col);
  }
  for (const auto* row : {&prow, &nrow}) {
    for (const auto& [c, d] : *row) {
      auto right = row->find(c + 1);
      if (right != row->end() && d->right_net() != right->second->left_net()) {
        out.push_back({"placement", "mismatched abutment between " + d->id + " and " +
                                        right->second->id});
      }
    }
  }
  // stacked pairs with different nets need the separating cut
  for (const auto& [c, p] : prow) {
    auto n = nrow.find(c);
    if (n != nrow.end() && p->gate_net != n->second->gate_net && !gate_cuts.count(c)) {
      out.push_back({"cut", "missing gate cut at column " + std::to_string(c)});
    }
  }
  auto sd_net = [](const std::map<int, const PlacedDevice*>& row, int k) -> const std::string* {
    auto left = row.find(k);  // device at k exposes its left terminal at k
    if (left != row.end()) return &left->second->left_net();
    auto right = row.find(k - 1);
    if (right != row.end()) return &right->second->right_net();
    return nullptr;
  };
  for (int k = 0; k <= l.width_cpp; ++k) {
    const std::string* pn = sd_net(prow, k);
    const std::string* nn = sd_net(nrow, k);
    if (pn && nn && *pn != *nn && !lisd_cuts.count(k)) {
      out.push_back({"cut", "missing LISD cut at slot " + std::to_string(k)});
    }
  }
  if (cfg.min_cut_width_cpp == 2 && !gate_cuts.empty()) {
    for (int c : gate_cuts) {
      if (!gate_cuts.count(c - 1) && !gate_cuts.count(c + 1)) {
        out.push_back({"cut", "gate cut at column " + std::to_string(c) +
                                  " narrower than the minimum width"});
      }
    }
  }
  for (int c : l.break_cols) {
    if (prow.count(c) || nrow.count(c)) {
      out.push_back({"placement", "break column " + std::to_string(c) + " holds a device"});
    }
  }
  if (static_cast<int>(l.break_cols.size()) > cfg.max_diffusion_breaks) {
    out.push_back({"placement", "diffusion break count exceeds the allowance"});
  }
}

// Per-net connectivity on the grid: covered vertices/edges from shapes plus
// terminal vertices and MOL merge links; a net must form one tree.
void audit_connectivity(const Layout& l, const TechConfig& cfg, std::vector<AuditIssue>& out) {
  Nm w = static_cast<Nm>(l.width_cpp) * cfg.mp(1);
  if (w <= 0) return;
  GridGraph g(cfg, w);
  int t = cfg.row_count;
  auto gate_row_y = [&](MosKind k) {
    return g.rows()[k == MosKind::NMOS ? t / 2 - 1 : t / 2];
  };
  auto sd_row_y = [&](MosKind k) { return g.rows()[k == MosKind::NMOS ? 0 : t - 1]; };

  std::set<int> gate_cuts, lisd_cuts;
  for (const auto& c : l.cuts) {
    (c.kind == CutShape::Gate ? gate_cuts : lisd_cuts).insert(c.col);
  }

  std::set<std::string> nets;
  std::set<std::string> power;
  for (const auto& d : l.devices) {
    for (const std::string* n : {&d.gate_net, &d.source_net, &d.drain_net}) nets.insert(*n);
  }
  for (const auto& s : l.segments) nets.insert(s.net);
  // power nets are the ones never drawn and never pinned; they hook to the
  // rails outside the routing rows. Identify by name convention.
  for (const auto& n : nets) {
    std::string u;
    for (char c : n) u += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (u == "VDD" || u == "VSS" || u == "VCC" || u == "GND") power.insert(n);
  }

  for (const auto& net : nets) {
    if (power.count(net)) continue;
    std::set<std::pair<int, int>> edges;  // vertex-index pairs
    std::set<int> verts;
    auto add_edge = [&](int a, int b) {
      if (a < 0 || b < 0) return;
      verts.insert(a);
      verts.insert(b);
      edges.insert({std::min(a, b), std::max(a, b)});
    };

    for (const auto& s : l.segments) {
      if (s.net != net) continue;
      const auto& along = layer_is_horizontal(s.layer) ? g.columns(s.layer) : g.rows();
      int prev = -1;
      for (Nm pos : along) {
        if (pos < s.lo || pos > s.hi) continue;
        int v = layer_is_horizontal(s.layer) ? g.vertex_index(s.layer, s.track, pos)
                                             : g.vertex_index(s.layer, pos, s.track);
        if (v < 0) continue;
        verts.insert(v);
        if (prev >= 0) add_edge(prev, v);
        prev = v;
      }
    }
    for (const auto& v : l.vias) {
      if (v.net != net) continue;
      add_edge(g.vertex_index(v.lower_layer, v.row, v.col),
               g.vertex_index(v.lower_layer + 1, v.row, v.col));
    }

    // terminals and merge links from placement
    std::map<int, std::pair<int, int>> stacked_gate;  // col -> (P vertex, N vertex)
    std::map<int, std::pair<int, int>> stacked_sd;
    for (const auto& d : l.devices) {
      Nm xc = static_cast<Nm>(d.col) * l.cpp;
      if (d.gate_net == net) {
        int v = g.vertex_index(1, gate_row_y(d.kind), xc);
        if (v >= 0) {
          verts.insert(v);
          auto& pr = stacked_gate[d.col];
          (d.kind == MosKind::PMOS ? pr.first : pr.second) = v + 1;
        }
      }
      for (int side = 0; side < 2; ++side) {
        const std::string& n = side == 0 ? d.left_net() : d.right_net();
        if (n != net) continue;
        int slot = d.col + side;
        Nm xs = static_cast<Nm>(slot) * l.cpp;
        int v = g.vertex_index(1, sd_row_y(d.kind), xs);
        if (v >= 0) {
          verts.insert(v);
          auto& pr = stacked_sd[slot];
          (d.kind == MosKind::PMOS ? pr.first : pr.second) = v + 1;
        }
      }
    }
    for (const auto& [c, pr] : stacked_gate) {
      if (pr.first && pr.second && !gate_cuts.count(c)) add_edge(pr.first - 1, pr.second - 1);
    }
    for (const auto& [k, pr] : stacked_sd) {
      if (pr.first && pr.second && !lisd_cuts.count(k)) add_edge(pr.first - 1, pr.second - 1);
    }
    // contact pads join terminals to M0 above them
    for (const auto& v : l.vias) {
      if (v.net == net && v.lower_layer == 1) {
        add_edge(g.vertex_index(1, v.row, v.col), g.vertex_index(2, v.row, v.col));
      }
    }

    if (verts.empty()) continue;
    std::map<int, std::vector<int>> adj;
    for (const auto& [a, b] : edges) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    std::set<int> seen;
    std::vector<int> stack{*verts.begin()};
    seen.insert(*verts.begin());
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u : adj[v]) {
        if (seen.insert(u).second) stack.push_back(u);
      }
    }
    if (seen.size() != verts.size()) {
      out.push_back({"connectivity", "net " + net + " is disconnected"});
    } else if (edges.size() != verts.size() - 1) {
      out.push_back({"cycle", "net " + net + " routing is not a tree"});
    }
  }
}

void audit_pins(const Layout& l, const TechConfig& cfg, std::vector<AuditIssue>& out) {
  if (!cfg.m0_pins_enabled || l.pins.empty()) return;
  if (cfg.pin_separation_enabled) {
    int t = cfg.row_count;
    int cap = static_cast<int>(l.pins.size()) <= t
                  ? 1
                  : static_cast<int>((l.pins.size() + t - 1) / t);
    std::map<Nm, int> per_row;
    for (const auto& p : l.pins) ++per_row[p.row];
    for (const auto& [row, n] : per_row) {
      if (n > cap) {
        out.push_back({"pin-separation", std::to_string(n) + " pins share row " +
                                             std::to_string(row)});
      }
    }
  }
  if (cfg.min_pin_opening > 0) {
    for (const auto& p : l.pins) {
      auto tracks = pin_access_tracks(l, cfg, p.net, p.row);
      if (static_cast<int>(tracks.size()) < cfg.min_pin_opening) {
        out.push_back({"pin-opening", "pin " + p.net + " exposes " +
                                          std::to_string(tracks.size()) + " of " +
                                          std::to_string(cfg.min_pin_opening) +
                                          " required M1 tracks"});
      }
    }
  }
}

}  // namespace

AuditReport audit_layout(const Layout& l, const TechConfig& cfg) {
  AuditReport rep;
  audit_geometry(l, cfg, rep.issues);
  audit_placement(l, cfg, rep.issues);
  audit_connectivity(l, cfg, rep.issues);
  audit_pins(l, cfg, rep.issues);
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization

std::string serialize_layout(const Layout& l) {
  std::ostringstream os;
  os << "layout " << l.cell << " " << l.width_cpp << " " << l.cpp << "\n";
  for (const auto& d : l.devices) {
    os << "device " << d.id << " " << to_string(d.kind) << " " << d.col << " "
       << (d.flip ? 1 : 0) << " g=" << d.gate_net << " s=" << d.source_net
       << " d=" << d.drain_net << "\n";
  }
  for (int c : l.break_cols) os << "break " << c << "\n";
  for (const auto& c : l.cuts) {
    os << "cut " << (c.kind == CutShape::Gate ? "gate" : "lisd") << " " << c.col << "\n";
  }
  for (const auto& s : l.segments) {
    os << "seg " << s.layer << " " << s.track << " " << s.lo << " " << s.hi << " " << s.net
       << "\n";
  }
  for (const auto& v : l.vias) {
    os << "via " << v.lower_layer << " " << v.row << " " << v.col << " " << v.net << "\n";
  }
  for (const auto& p : l.pins) {
    os << "pin " << p.net << " " << p.row << " " << p.rep_col << " tracks";
    for (int t : p.access_tracks) os << " " << t;
    os << "\n";
  }
  os << "end\n";
  return os.str();
}

Layout parse_layout(std::istream& in) {
  Layout l;
  std::string line;
  bool have_header = false, done = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    if (done) throw std::runtime_error("layout: content after end");
    if (head == "layout") {
      ls >> l.cell >> l.width_cpp >> l.cpp;
      have_header = true;
    } else if (head == "device") {
      PlacedDevice d;
      std::string kind;
      int flip;
      ls >> d.id >> kind >> d.col >> flip;
      d.kind = kind == "pmos" ? MosKind::PMOS : MosKind::NMOS;
      d.flip = flip != 0;
      std::string attr;
      while (ls >> attr) {
        if (attr.rfind("g=", 0) == 0) d.gate_net = attr.substr(2);
        else if (attr.rfind("s=", 0) == 0) d.source_net = attr.substr(2);
        else if (attr.rfind("d=", 0) == 0) d.drain_net = attr.substr(2);
      }
      l.devices.push_back(d);
    } else if (head == "break") {
      int c;
      ls >> c;
      l.break_cols.push_back(c);
    } else if (head == "cut") {
      std::string kind;
      int c;
      ls >> kind >> c;
      l.cuts.push_back({kind == "gate" ? CutShape::Gate : CutShape::Lisd, c});
    } else if (head == "seg") {
      Segment s;
      ls >> s.layer >> s.track >> s.lo >> s.hi >> s.net;
      l.segments.push_back(s);
    } else if (head == "via") {
      ViaShape v;
      ls >> v.lower_layer >> v.row >> v.col >> v.net;
      l.vias.push_back(v);
    } else if (head == "pin") {
      PinShape p;
      std::string marker;
      ls >> p.net >> p.row >> p.rep_col >> marker;
      int t;
      while (ls >> t) p.access_tracks.push_back(t);
      l.pins.push_back(p);
    } else if (head == "end") {
      done = true;
    } else {
      throw std::runtime_error("layout line " + std::to_string(lineno) +
                               ": unknown directive '" + head + "'");
    }
  }
  if (!have_header || !done) throw std::runtime_error("layout: missing header or end");
  return l;
}

Layout load_layout(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open layout: " + path);
  return parse_layout(in);
}

// ---------------------------------------------------------------------------
// Rendering

std::string render_svg(const Layout& l, const TechConfig& cfg) {
  Nm w = static_cast<Nm>(l.width_cpp) * cfg.mp(1);
  Nm h = static_cast<Nm>(cfg.row_count + 1) * cfg.mp(2);
  const double sc = 2.0;
  Nm margin = 30;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\""
     << static_cast<long long>((w + 2 * margin) * sc) << "\" height=\""
     << static_cast<long long>((h + 2 * margin) * sc) << "\" viewBox=\"" << -margin << " "
     << -margin << " " << (w + 2 * margin) << " " << (h + 2 * margin) << "\">\n";
  auto flip_y = [&](Nm y) { return h - y; };
  os << "<rect x=\"0\" y=\"0\" width=\"" << w << "\" height=\"" << h
     << "\" fill=\"#fbfbf6\" stroke=\"#222\" stroke-width=\"1\"/>\n";

  // poly columns and routing rows as guides
  for (Nm x = 0; x <= w; x += cfg.mp(1)) {
    os << "<line x1=\"" << x << "\" y1=\"0\" x2=\"" << x << "\" y2=\"" << h
       << "\" stroke=\"#ddd\" stroke-width=\"0.6\"/>\n";
  }
  for (int r = 1; r <= cfg.row_count; ++r) {
    Nm y = flip_y(r * cfg.mp(2));
    os << "<line x1=\"0\" y1=\"" << y << "\" x2=\"" << w << "\" y2=\"" << y
       << "\" stroke=\"#eee\" stroke-width=\"0.6\"/>\n";
  }

  for (const auto& d : l.devices) {
    Nm x = static_cast<Nm>(d.col) * l.cpp;
    bool p = d.kind == MosKind::PMOS;
    Nm y0 = p ? flip_y(h) : flip_y(2 * cfg.mp(2));
    os << "<rect x=\"" << (x - 12) << "\" y=\"" << y0 << "\" width=\"24\" height=\""
       << (2 * cfg.mp(2)) << "\" fill=\"" << (p ? "#f2c9c9" : "#c9dcf2")
       << "\" stroke=\"#555\" stroke-width=\"0.5\"/>\n";
    os << "<text x=\"" << x << "\" y=\"" << (y0 + cfg.mp(2)) << "\" font-size=\"9\" "
       << "text-anchor=\"middle\">" << d.id << "</text>\n";
  }
  for (int c : l.break_cols) {
    Nm x = static_cast<Nm>(c) * l.cpp;
    os << "<rect x=\"" << (x - 6) << "\" y=\"0\" width=\"12\" height=\"" << h
       << "\" fill=\"#f9d9f0\" fill-opacity=\"0.7\"/>\n";
  }
  for (const auto& c : l.cuts) {
    Nm x = static_cast<Nm>(c.col) * l.cpp;
    Nm y = flip_y((cfg.row_count / 2 + 1) * cfg.mp(2));
    os << "<rect x=\"" << (x - 8) << "\" y=\"" << (y - 4) << "\" width=\"16\" height=\"8\""
       << " fill=\"" << (c.kind == CutShape::Gate ? "#333" : "#884400") << "\"/>\n";
  }

  auto layer_color = [](int layer) {
    switch (layer) {
      case 2: return "#2e7d32";
      case 3: return "#c62828";
      default: return "#6a1b9a";
    }
  };
  for (const auto& s : l.segments) {
    Nm width = 8;
    if (layer_is_horizontal(s.layer)) {
      os << "<rect x=\"" << s.lo << "\" y=\"" << (flip_y(s.track) - width / 2) << "\" width=\""
         << s.length() << "\" height=\"" << width << "\" fill=\"" << layer_color(s.layer)
         << "\" fill-opacity=\"0.8\"><title>" << s.net << "</title></rect>\n";
    } else {
      os << "<rect x=\"" << (s.track - width / 2) << "\" y=\"" << flip_y(s.hi) << "\" width=\""
         << width << "\" height=\"" << s.length() << "\" fill=\"" << layer_color(s.layer)
         << "\" fill-opacity=\"0.8\"><title>" << s.net << "</title></rect>\n";
    }
  }
  for (const auto& v : l.vias) {
    Nm sz = v.lower_layer == 1 ? 6 : 8;
    os << "<rect x=\"" << (v.col - sz / 2) << "\" y=\"" << (flip_y(v.row) - sz / 2)
       << "\" width=\"" << sz << "\" height=\"" << sz
       << "\" fill=\"#111\" fill-opacity=\"0.9\"><title>" << v.net << " v"
       << v.lower_layer << "</title></rect>\n";
  }
  for (const auto& p : l.pins) {
    os << "<circle cx=\"" << p.rep_col << "\" cy=\"" << flip_y(p.row)
       << "\" r=\"5\" fill=\"none\" stroke=\"#e65100\" stroke-width=\"1.5\"/>\n";
    os << "<text x=\"" << p.rep_col << "\" y=\"" << (flip_y(p.row) - 7)
       << "\" font-size=\"9\" text-anchor=\"middle\" fill=\"#e65100\">" << p.net
       << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace cellforge
