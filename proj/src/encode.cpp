#include "cellforge/encode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace cellforge {

int EncodedCell::gate_row(MosKind k) const {
  int t = tech.row_count;
  return k == MosKind::NMOS ? t / 2 - 1 : t / 2;
}

int EncodedCell::sd_row(MosKind k) const {
  return k == MosKind::NMOS ? 0 : tech.row_count - 1;
}

int EncodedCell::access_col(TermRole role, int flip, int c) const {
  if (role == TermRole::Gate) return c;
  bool left = (role == TermRole::Source) == (flip == 0);
  return left ? c : c + 1;
}

namespace {

// branching tiers
constexpr int kTierPlace = 0;
constexpr int kTierCut = 1;
constexpr int kTierFlowBase = 10;
constexpr int kTierWire = 40;
constexpr int kTierAux = 50;
constexpr int kTierInt = 70;

struct PresLit {
  int var;
  std::string net;
  TermRef term;
};

class Encoder {
 public:
  Encoder(const Netlist& netlist, const TechConfig& cfg, const EncodeOptions& opts)
      : nl_(netlist), cfg_(cfg) {
    wt_ = opts.weights ? *opts.weights : cfg.weights;
    pins_on_ = opts.m0_pins ? *opts.m0_pins : cfg.m0_pins_enabled;
  }

  EncodedCell run() {
    for (const auto& t : nl_.transistors) {
      if (t.width_units != 1) {
        throw std::invalid_argument("device '" + t.id +
                                    "' is wider than one unit; fold the netlist first");
      }
    }
    if (nl_.transistors.empty()) throw std::invalid_argument("empty netlist");
    if (cfg_.delta(1) != 0) {
      throw std::invalid_argument("placement encoding requires a zero poly offset");
    }

    ec_.tech = cfg_;
    ec_.weights = wt_;
    ec_.netlist = nl_;
    ec_.model.name = nl_.name;
    Nm cpp = cfg_.mp(1);
    ec_.w_total = total_cell_width(nl_.w_p_units() * cpp, nl_.w_n_units() * cpp,
                                   cfg_.max_diffusion_breaks, cpp);
    ec_.grid = GridGraph(cfg_, ec_.w_total);

    const auto& c1 = ec_.grid.columns(1);
    for (int k = 0; k < static_cast<int>(c1.size()); ++k) {
      if (c1[k] > 0 && c1[k] < ec_.w_total) ec_.interior_cols.push_back(k);
    }
    if (ec_.interior_cols.empty()) {
      throw std::invalid_argument("cell canvas has no interior placement column");
    }

    ec_.terminals = derive_terminals(nl_);
    ec_.routed_nets = nl_.nets();

    encode_placement();
    build_presence();
    encode_collisions();
    encode_cuts();
    encode_breaks();
    encode_width();
    encode_routing();
    tie_shapes_to_flows();
    encode_wirelength();
    encode_occupancy();
    encode_gvs_and_rules();
    encode_sgd();
    if (pins_on_) encode_pins();
    encode_objective();
    return std::move(ec_);
  }

 private:
  ConstraintModel& m() { return ec_.model; }

  // --- placement -----------------------------------------------------------

  void encode_placement() {
    int lo = ec_.interior_cols.front();
    int hi = ec_.interior_cols.back();
    for (const auto& tr : nl_.transistors) {
      DeviceVars dv;
      dv.flip = m().add_bool("flip." + tr.id, kTierPlace, 0);
      dv.col = m().add_int(lo, hi, "col." + tr.id, kTierInt);
      std::vector<LinTerm> chan{{-1, dv.col}};
      std::vector<LinTerm> one;
      for (int c : ec_.interior_cols) {
        int a = m().add_bool("at." + tr.id + "." + std::to_string(c), kTierPlace, 1);
        dv.at[c] = a;
        chan.push_back({static_cast<long long>(c), a});
        one.push_back({1, a});
        for (int f = 0; f < 2; ++f) {
          int af = m().add_bool(
              "atf" + std::to_string(f) + "." + tr.id + "." + std::to_string(c), kTierAux,
              0);
          dv.atf[f][c] = af;
          // af == at AND (flip == f), both directions
          m().add_le(af, a, 0, "atf<=at");
          if (f == 1) {
            m().add_le(af, dv.flip, 0, "atf<=flip");
            m().add_lin({{1, a}, {1, dv.flip}, {-1, af}}, Cmp::Le, 1, "atf.lower");
          } else {
            m().add_lin({{1, af}, {1, dv.flip}}, Cmp::Le, 1, "atf<=!flip");
            m().add_lin({{1, a}, {-1, dv.flip}, {-1, af}}, Cmp::Le, 0, "atf.lower");
          }
        }
      }
      m().add_lin(one, Cmp::Eq, 1, "place." + tr.id);
      m().add_lin(chan, Cmp::Eq, 0, "chan." + tr.id);
      ec_.devices[tr.id] = dv;
    }
    // one device per (row, column)
    for (int c : ec_.interior_cols) {
      std::vector<Lit> pm, nm;
      for (const auto& tr : nl_.transistors) {
        (tr.kind == MosKind::PMOS ? pm : nm).push_back(pos(ec_.devices[tr.id].at[c]));
      }
      m().add_at_most_one(pm, "row.p." + std::to_string(c));
      m().add_at_most_one(nm, "row.n." + std::to_string(c));
    }
  }

  // --- terminal presence ---------------------------------------------------

  // Presence literal lists per (row, access column), with nets; power nets
  // participate (they force cuts and abutment exclusions) but never route.
  void build_presence() {
    for (const auto& tr : nl_.transistors) {
      const DeviceVars& dv = ec_.devices.at(tr.id);
      int grow = ec_.gate_row(tr.kind);
      int srow = ec_.sd_row(tr.kind);
      for (int c : ec_.interior_cols) {
        add_pres({grow, c}, tr.gate_net, dv.at.at(c), {tr.id, TermRole::Gate});
        for (TermRole role : {TermRole::Source, TermRole::Drain}) {
          for (int f = 0; f < 2; ++f) {
            AccessPoint p{srow, ec_.access_col(role, f, c)};
            add_pres(p, tr.net_of(role), dv.atf[f].at(c), {tr.id, role});
          }
        }
      }
    }
  }

  void add_pres(AccessPoint p, const std::string& net, int var, TermRef term) {
    pres_[p].push_back({var, net, term});
  }

  std::vector<int> pres_vars(AccessPoint p, const std::string& net) const {
    std::vector<int> out;
    auto it = pres_.find(p);
    if (it == pres_.end()) return out;
    for (const auto& l : it->second) {
      if (l.net == net) out.push_back(l.var);
    }
    return out;
  }

  std::vector<int> term_pres(AccessPoint p, const TermRef& t) const {
    std::vector<int> out;
    auto it = pres_.find(p);
    if (it == pres_.end()) return out;
    for (const auto& l : it->second) {
      if (l.term == t) out.push_back(l.var);
    }
    return out;
  }

  // Different nets on the same S/D vertex cannot coexist: abutting devices
  // must share the diffusion net or keep a break between them.
  void encode_collisions() {
    for (const auto& [p, lits] : pres_) {
      for (size_t i = 0; i < lits.size(); ++i) {
        for (size_t j = i + 1; j < lits.size(); ++j) {
          if (lits[i].net == lits[j].net) continue;
          if (lits[i].term.transistor_id == lits[j].term.transistor_id) continue;
          if (p.row_idx == ec_.gate_row(MosKind::PMOS) ||
              p.row_idx == ec_.gate_row(MosKind::NMOS)) {
            continue;  // same-row gate overlap is already excluded per column
          }
          m().add_card({pos(lits[i].var), pos(lits[j].var)}, 1,
                       "abut." + std::to_string(p.row_idx) + "." + std::to_string(p.col_idx));
        }
      }
    }
  }

  // --- super cut nodes -------------------------------------------------------

  void encode_cuts() {
    for (int c : ec_.interior_cols) {
      ec_.scx_gate[c] = m().add_bool("scxg." + std::to_string(c), kTierCut, 0);
    }
    std::set<int> slot_cols;
    for (int c : ec_.interior_cols) {
      slot_cols.insert(c);      // slot (c-1, c)
      slot_cols.insert(c + 1);  // slot (c, c+1)
    }
    for (int k : slot_cols) {
      ec_.scx_sd[k] = m().add_bool("scxs." + std::to_string(k), kTierCut, 0);
    }

    // mismatched stacked nets force a cut
    for (int c : ec_.interior_cols) {
      force_cut({ec_.gate_row(MosKind::PMOS), c}, {ec_.gate_row(MosKind::NMOS), c},
                ec_.scx_gate.at(c), "force.scxg");
    }
    for (int k : slot_cols) {
      force_cut({ec_.sd_row(MosKind::PMOS), k}, {ec_.sd_row(MosKind::NMOS), k},
                ec_.scx_sd.at(k), "force.scxs");
    }

    // minimum gate-cut width: an active cut pairs with an adjacent gate cut
    if (cfg_.min_cut_width_cpp == 2) {
      for (int c : ec_.interior_cols) {
        std::vector<LinTerm> ts{{1, ec_.scx_gate.at(c)}};
        auto l = ec_.scx_gate.find(c - 1);
        auto r = ec_.scx_gate.find(c + 1);
        if (l != ec_.scx_gate.end()) ts.push_back({-1, l->second});
        if (r != ec_.scx_gate.end()) ts.push_back({-1, r->second});
        m().add_lin(ts, Cmp::Le, 0, "cutpair." + std::to_string(c));
      }
    }
  }

  void force_cut(AccessPoint ptop, AccessPoint pbot, int scx, const std::string& tag) {
    auto top = pres_.find(ptop);
    auto bot = pres_.find(pbot);
    if (top == pres_.end() || bot == pres_.end()) return;
    for (const auto& a : top->second) {
      for (const auto& b : bot->second) {
        if (a.net == b.net) continue;
        m().add_lin({{1, a.var}, {1, b.var}, {-1, scx}}, Cmp::Le, 1, tag);
      }
    }
  }

  // --- diffusion breaks ------------------------------------------------------

  void encode_breaks() {
    std::vector<LinTerm> total;
    for (int c : ec_.interior_cols) {
      int b = m().add_bool("brk." + std::to_string(c), kTierAux, 1);
      ec_.brk[c] = b;
      std::vector<LinTerm> low{{1, b}};
      std::vector<LinTerm> upP{{1, b}};
      std::vector<LinTerm> upN{{1, b}};
      for (const auto& tr : nl_.transistors) {
        int a = ec_.devices.at(tr.id).at.at(c);
        low.push_back({1, a});
        (tr.kind == MosKind::PMOS ? upP : upN).push_back({1, a});
      }
      m().add_lin(low, Cmp::Ge, 1, "brk.lower");   // b + occP + occN >= 1
      m().add_lin(upP, Cmp::Le, 1, "brk.upper.p");  // b <= 1 - occP
      m().add_lin(upN, Cmp::Le, 1, "brk.upper.n");
      total.push_back({1, b});
    }
    m().add_lin(total, Cmp::Le, cfg_.max_diffusion_breaks, "cdb");
  }

  // --- cell width ------------------------------------------------------------

  void encode_width() {
    int max_cw = ec_.interior_cols.back() + 1;
    ec_.cw = m().add_int(1, max_cw, "cw", kTierInt);
    for (const auto& tr : nl_.transistors) {
      std::vector<LinTerm> ts{{1, ec_.cw}};
      for (int c : ec_.interior_cols) {
        ts.push_back({-static_cast<long long>(c + 1), ec_.devices.at(tr.id).at.at(c)});
      }
      m().add_lin(ts, Cmp::Ge, 0, "cw." + tr.id);
    }
    // pigeonhole: a row of n devices needs n distinct columns
    long long np = 0, nn = 0;
    for (const auto& tr : nl_.transistors) (tr.kind == MosKind::PMOS ? np : nn) += 1;
    m().add_lin({{1, ec_.cw}}, Cmp::Ge, std::max(np, nn) + 1, "cw.rowfill");
  }

  // --- routing network ---------------------------------------------------------

  bool routing_vertex(int v) const {
    const Vertex& vx = ec_.grid.vertex(v);
    return vx.layer >= 2 && vx.col > 0;
  }

  void encode_routing() {
    const GridGraph& g = ec_.grid;

    for (size_t e = 0; e < g.edges().size(); ++e) {
      const Edge& ed = g.edges()[e];
      const Vertex& a = g.vertex(ed.a);
      const Vertex& b = g.vertex(ed.b);
      if (a.layer < 2 || b.layer < 2) continue;
      if (a.col == 0 || b.col == 0) continue;
      ArcKind kind = ed.is_via ? ArcKind::Via : ArcKind::Metal;
      ec_.arcs.push_back({kind, ed.a, ed.b, static_cast<int>(e), -1, -1, ""});
      ec_.arcs.push_back({kind, ed.b, ed.a, static_cast<int>(e), -1, -1, ""});
    }

    int gp = ec_.gate_row(MosKind::PMOS);
    int gn = ec_.gate_row(MosKind::NMOS);
    int sp = ec_.sd_row(MosKind::PMOS);
    int sn = ec_.sd_row(MosKind::NMOS);

    for (const auto& net : ec_.routed_nets) {
      for (const auto& [p, lits] : pres_) {
        auto vars = pres_vars(p, net);
        if (vars.empty()) continue;
        Nm x = ec_.col_x(p.col_idx);
        Nm y = ec_.row_y(p.row_idx);
        int v1 = g.vertex_index(1, y, x);
        int v2 = g.vertex_index(2, y, x);
        int e12 = g.edge_between(v1, v2);
        ec_.arcs.push_back({ArcKind::Entry, v1, v2, e12, p.col_idx, p.row_idx, net});
        ec_.arcs.push_back({ArcKind::Entry, v2, v1, e12, p.col_idx, p.row_idx, net});

        int pv = m().add_bool("pad." + net + "." + std::to_string(p.row_idx) + "." +
                                  std::to_string(p.col_idx),
                              kTierAux, 0);
        ec_.pad[net][v2] = pv;
        std::vector<LinTerm> gate{{1, pv}};
        for (int w : vars) gate.push_back({-1, w});
        m().add_lin(gate, Cmp::Le, 0, "pad.pres");
      }

      for (const auto& [c, scx] : ec_.scx_gate) {
        if (pres_vars({gp, c}, net).empty() || pres_vars({gn, c}, net).empty()) continue;
        int va = g.vertex_index(1, ec_.row_y(gp), ec_.col_x(c));
        int vb = g.vertex_index(1, ec_.row_y(gn), ec_.col_x(c));
        ec_.arcs.push_back({ArcKind::MergeGate, va, vb, -1, c, -1, net});
        ec_.arcs.push_back({ArcKind::MergeGate, vb, va, -1, c, -1, net});
      }
      for (const auto& [k, scx] : ec_.scx_sd) {
        if (pres_vars({sp, k}, net).empty() || pres_vars({sn, k}, net).empty()) continue;
        int va = g.vertex_index(1, ec_.row_y(sp), ec_.col_x(k));
        int vb = g.vertex_index(1, ec_.row_y(sn), ec_.col_x(k));
        ec_.arcs.push_back({ArcKind::MergeSd, va, vb, -1, k, -1, net});
        ec_.arcs.push_back({ArcKind::MergeSd, vb, va, -1, k, -1, net});
      }
    }

    for (const auto& net : ec_.routed_nets) {
      ec_.wire[net];
      ec_.via[net];
      ec_.pad[net];
      for (size_t e = 0; e < g.edges().size(); ++e) {
        const Edge& ed = g.edges()[e];
        const Vertex& a = g.vertex(ed.a);
        const Vertex& b = g.vertex(ed.b);
        if (a.layer < 2 || b.layer < 2 || a.col == 0 || b.col == 0) continue;
        if (ed.is_via) {
          ec_.via[net][static_cast<int>(e)] =
              m().add_bool("via." + net + ".e" + std::to_string(e), kTierWire, 0);
        } else {
          ec_.wire[net][static_cast<int>(e)] =
              m().add_bool("w." + net + ".e" + std::to_string(e), kTierWire, 0);
        }
      }
    }

    // one commodity per sink; MOL merges route through zero-cost merge arcs
    int ci = 0;
    for (const auto& net : ec_.routed_nets) {
      const NetTerminals& nt = ec_.terminals.at(net);
      for (const auto& sink : nt.sinks) {
        Commodity com;
        com.net = net;
        com.sink = sink;
        int tier = kTierFlowBase + std::min(ci, 25);
        for (size_t a = 0; a < ec_.arcs.size(); ++a) {
          const FlowArc& arc = ec_.arcs[a];
          bool is_merge =
              arc.kind == ArcKind::MergeGate || arc.kind == ArcKind::MergeSd;
          if (arc.kind == ArcKind::Entry || is_merge) {
            if (arc.net != net) continue;
          }
          // merge arcs are free MOL shorts: try them before drawing metal
          com.flow[static_cast<int>(a)] = m().add_bool(
              "f" + std::to_string(ci) + ".a" + std::to_string(a), tier, is_merge ? 1 : 0);
        }
        gate_and_conserve(com, nt, ci);
        ec_.commodities.push_back(std::move(com));
        ++ci;
      }
    }
  }

  // Metal extension beyond the flows is only useful where a metal rule can
  // force longer segments, and stub pads only when pin constraints may ask
  // for them. Everywhere else, tie the shape vars to the flows exactly so
  // propagation settles them without branching.
  bool layer_needs_extension(int layer) const {
    const LayerRules& r = cfg_.rules.layer(layer);
    return r.mar_length > 0 || r.eol_spacing > 0 || r.shr_distance > 0 || !r.prl.empty();
  }

  void tie_shapes_to_flows() {
    const GridGraph& g = ec_.grid;
    std::map<std::pair<std::string, int>, std::vector<int>> edge_flows;  // (net,edge)
    std::map<std::pair<std::string, int>, std::vector<int>> pad_flows;   // (net,l2 vertex)
    for (const auto& com : ec_.commodities) {
      for (const auto& [ai, f] : com.flow) {
        const FlowArc& arc = ec_.arcs[ai];
        if (arc.kind == ArcKind::Metal || arc.kind == ArcKind::Via) {
          edge_flows[{com.net, arc.edge}].push_back(f);
        } else if (arc.kind == ArcKind::Entry) {
          int l2v = g.vertex(arc.from).layer == 2 ? arc.from : arc.to;
          pad_flows[{com.net, l2v}].push_back(f);
        }
      }
    }
    for (const auto& net : ec_.routed_nets) {
      for (const auto& [e, w] : ec_.wire.at(net)) {
        if (layer_needs_extension(g.vertex(g.edges()[e].a).layer)) continue;
        std::vector<LinTerm> up{{1, w}};
        for (int f : edge_flows[{net, e}]) up.push_back({-1, f});
        m().add_lin(up, Cmp::Le, 0, "w.upper");
      }
      for (const auto& [e, w] : ec_.via.at(net)) {
        std::vector<LinTerm> up{{1, w}};
        for (int f : edge_flows[{net, e}]) up.push_back({-1, f});
        m().add_lin(up, Cmp::Le, 0, "v.upper");
      }
      if (!pins_on_) {
        for (const auto& [v2, pv] : ec_.pad.at(net)) {
          std::vector<LinTerm> up{{1, pv}};
          for (int f : pad_flows[{net, v2}]) up.push_back({-1, f});
          m().add_lin(up, Cmp::Le, 0, "pad.upper");
        }
      }
    }
  }

  void gate_and_conserve(const Commodity& com, const NetTerminals& nt, int ci) {
    const GridGraph& g = ec_.grid;
    // a commodity never uses both directions of one arc pair (arcs are
    // created in opposing pairs, so partner indices differ in the last bit)
    for (const auto& [ai, f] : com.flow) {
      if (ai % 2 == 1) continue;
      auto partner = com.flow.find(ai + 1);
      if (partner != com.flow.end()) {
        m().add_card({pos(f), pos(partner->second)}, 1, "arcpair");
      }
    }
    for (const auto& [ai, f] : com.flow) {
      const FlowArc& arc = ec_.arcs[ai];
      switch (arc.kind) {
        case ArcKind::Metal:
          m().add_le(f, ec_.wire.at(com.net).at(arc.edge), 0, "f<=w");
          break;
        case ArcKind::Via:
          m().add_le(f, ec_.via.at(com.net).at(arc.edge), 0, "f<=v");
          break;
        case ArcKind::Entry: {
          int l2v = g.vertex(arc.from).layer == 2 ? arc.from : arc.to;
          m().add_le(f, ec_.pad.at(com.net).at(l2v), 0, "f<=pad");
          break;
        }
        case ArcKind::MergeGate: {
          m().add_lin({{1, f}, {1, ec_.scx_gate.at(arc.col_idx)}}, Cmp::Le, 1, "f<=!scxg");
          merge_pres_gate(f, {ec_.gate_row(MosKind::PMOS), arc.col_idx}, com.net);
          merge_pres_gate(f, {ec_.gate_row(MosKind::NMOS), arc.col_idx}, com.net);
          break;
        }
        case ArcKind::MergeSd: {
          m().add_lin({{1, f}, {1, ec_.scx_sd.at(arc.col_idx)}}, Cmp::Le, 1, "f<=!scxs");
          merge_pres_gate(f, {ec_.sd_row(MosKind::PMOS), arc.col_idx}, com.net);
          merge_pres_gate(f, {ec_.sd_row(MosKind::NMOS), arc.col_idx}, com.net);
          break;
        }
      }
    }

    std::map<int, std::vector<LinTerm>> eq;
    for (const auto& [ai, f] : com.flow) {
      eq[ec_.arcs[ai].from].push_back({1, f});
      eq[ec_.arcs[ai].to].push_back({-1, f});
    }
    for (auto& [v, terms] : eq) {
      const Vertex& vx = g.vertex(v);
      if (vx.layer == 1) {
        AccessPoint p{row_index(vx.row), col_index(vx.col)};
        for (int s : term_pres(p, nt.source)) terms.push_back({-1, s});
        for (int s : term_pres(p, com.sink)) terms.push_back({1, s});
      }
      m().add_lin(terms, Cmp::Eq, 0, "cons.c" + std::to_string(ci) + ".v" + std::to_string(v));
    }
  }

  void merge_pres_gate(int f, AccessPoint p, const std::string& net) {
    std::vector<LinTerm> ts{{1, f}};
    for (int w : pres_vars(p, net)) ts.push_back({-1, w});
    m().add_lin(ts, Cmp::Le, 0, "f<=pres");
  }

  // x-position of a terminal as a linear expression over placement literals
  std::vector<LinTerm> position_terms(const TermRef& t) {
    std::vector<LinTerm> ts;
    const Transistor* tr = nl_.find_transistor(t.transistor_id);
    const DeviceVars& dv = ec_.devices.at(t.transistor_id);
    for (int c : ec_.interior_cols) {
      if (t.role == TermRole::Gate) {
        ts.push_back({ec_.col_x(c), dv.at.at(c)});
      } else {
        for (int f = 0; f < 2; ++f) {
          ts.push_back({ec_.col_x(ec_.access_col(t.role, f, c)), dv.atf[f].at(c)});
        }
      }
    }
    (void)tr;
    return ts;
  }

  // Per-net wirelength totals. The terminal x-span is a valid lower bound on
  // the metal length of the net regardless of MOL merging, which gives the
  // branch-and-bound a usable objective floor once placement fixes.
  void encode_wirelength() {
    const GridGraph& g = ec_.grid;
    Nm via_w = cfg_.via_weight();
    for (const auto& net : ec_.routed_nets) {
      long long max_wl = 0;
      std::vector<LinTerm> def;
      for (const auto& [e, w] : ec_.wire.at(net)) {
        def.push_back({-g.edges()[e].length, w});
        max_wl += g.edges()[e].length;
      }
      for (const auto& [e, w] : ec_.via.at(net)) {
        def.push_back({-via_w, w});
        max_wl += via_w;
      }
      int wl = m().add_int(0, max_wl, "wl." + net, kTierInt);
      ec_.net_wl[net] = wl;
      def.push_back({1, wl});
      m().add_lin(def, Cmp::Eq, 0, "wl.def." + net);

      const NetTerminals& nt = ec_.terminals.at(net);
      if (nt.sinks.empty()) continue;
      std::vector<TermRef> terms = nt.sinks;
      terms.push_back(nt.source);
      int xmin = m().add_int(0, ec_.w_total, "xmin." + net, kTierInt);
      int xmax = m().add_int(0, ec_.w_total, "xmax." + net, kTierInt);
      for (const TermRef& t : terms) {
        std::vector<LinTerm> hi{{1, xmax}};
        std::vector<LinTerm> lo{{1, xmin}};
        for (const auto& p : position_terms(t)) {
          hi.push_back({-p.coef, p.var});
          lo.push_back({-p.coef, p.var});
        }
        m().add_lin(hi, Cmp::Ge, 0, "xmax." + net);
        m().add_lin(lo, Cmp::Le, 0, "xmin." + net);
      }
      m().add_lin({{1, wl}, {-1, xmax}, {1, xmin}}, Cmp::Ge, 0, "wl.span." + net);
    }
  }

  int row_index(Nm y) const {
    const auto& rows = ec_.grid.rows();
    return static_cast<int>(std::find(rows.begin(), rows.end(), y) - rows.begin());
  }
  int col_index(Nm x) const {
    const auto& cols = ec_.grid.columns(1);
    return static_cast<int>(std::find(cols.begin(), cols.end(), x) - cols.begin());
  }

  // --- vertex occupancy, exclusivity, width coupling ---------------------------

  void encode_occupancy() {
    const GridGraph& g = ec_.grid;
    for (const auto& net : ec_.routed_nets) {
      for (size_t v = 0; v < g.vertices().size(); ++v) {
        if (!routing_vertex(static_cast<int>(v))) continue;
        ec_.occ[net][static_cast<int>(v)] =
            m().add_bool("occ." + net + ".v" + std::to_string(v), kTierAux, 0);
      }
    }
    for (const auto& net : ec_.routed_nets) {
      for (const auto& [e, w] : ec_.wire.at(net)) {
        m().add_le(w, ec_.occ.at(net).at(g.edges()[e].a), 0, "w<=occ");
        m().add_le(w, ec_.occ.at(net).at(g.edges()[e].b), 0, "w<=occ");
      }
      for (const auto& [e, w] : ec_.via.at(net)) {
        m().add_le(w, ec_.occ.at(net).at(g.edges()[e].a), 0, "v<=occ");
        m().add_le(w, ec_.occ.at(net).at(g.edges()[e].b), 0, "v<=occ");
      }
      for (const auto& [v2, pv] : ec_.pad.at(net)) {
        m().add_le(pv, ec_.occ.at(net).at(v2), 0, "pad<=occ");
      }
    }
    for (size_t v = 0; v < g.vertices().size(); ++v) {
      if (!routing_vertex(static_cast<int>(v))) continue;
      const Vertex& vx = g.vertex(v);
      std::vector<Lit> owners;
      std::vector<LinTerm> cwts{{1, ec_.cw}};
      long long need = g.min_cw_for_metal(vx.layer, vx.col);
      for (const auto& net : ec_.routed_nets) {
        int o = ec_.occ.at(net).at(static_cast<int>(v));
        owners.push_back(pos(o));
        cwts.push_back({-need, o});
      }
      m().add_at_most_one(owners, "excl.v" + std::to_string(v));
      m().add_lin(cwts, Cmp::Ge, 0, "cw.metal.v" + std::to_string(v));
    }
    // exact occupancy everywhere: pins count real metal, and propagation
    // settles the bookkeeping vars without search
    for (const auto& net : ec_.routed_nets) {
      for (const auto& [v, o] : ec_.occ.at(net)) {
        std::vector<LinTerm> up{{1, o}};
        for (int e : incident_edges(v)) {
          auto itw = ec_.wire.at(net).find(e);
          if (itw != ec_.wire.at(net).end()) up.push_back({-1, itw->second});
          auto itv = ec_.via.at(net).find(e);
          if (itv != ec_.via.at(net).end()) up.push_back({-1, itv->second});
        }
        auto itp = ec_.pad.at(net).find(v);
        if (itp != ec_.pad.at(net).end()) up.push_back({-1, itp->second});
        m().add_lin(up, Cmp::Le, 0, "occ.upper");
      }
    }
  }

  const std::vector<int>& incident_edges(int v) {
    if (incident_.empty()) {
      incident_.resize(ec_.grid.vertices().size());
      for (size_t e = 0; e < ec_.grid.edges().size(); ++e) {
        incident_[ec_.grid.edges()[e].a].push_back(static_cast<int>(e));
        incident_[ec_.grid.edges()[e].b].push_back(static_cast<int>(e));
      }
    }
    return incident_[v];
  }

  // --- geometric variables and metal design rules ------------------------------

  std::vector<int> side_edge_vars(int v, bool positive_dir) {
    const GridGraph& g = ec_.grid;
    const Vertex& vx = g.vertex(v);
    std::vector<int> out;
    for (int e : incident_edges(v)) {
      const Edge& ed = g.edges()[e];
      if (ed.is_via) continue;
      const Vertex& o = g.vertex(ed.a == v ? ed.b : ed.a);
      if (o.layer != vx.layer) continue;
      bool plus = layer_is_horizontal(vx.layer) ? o.col > vx.col : o.row > vx.row;
      if (plus != positive_dir) continue;
      for (const auto& net : ec_.routed_nets) {
        auto it = ec_.wire.at(net).find(e);
        if (it != ec_.wire.at(net).end()) out.push_back(it->second);
      }
    }
    return out;
  }

  void encode_gvs_and_rules() {
    const GridGraph& g = ec_.grid;
    // gv[v][0]: end towards -direction (Left/Front), gv[v][1]: +direction
    for (size_t v = 0; v < g.vertices().size(); ++v) {
      if (!routing_vertex(static_cast<int>(v))) continue;
      const LayerRules& vr = cfg_.rules.layer(g.vertex(v).layer);
      if (vr.mar_length <= 0 && vr.eol_spacing <= 0 && vr.shr_distance <= 0) continue;
      auto minus = side_edge_vars(static_cast<int>(v), false);
      auto plus = side_edge_vars(static_cast<int>(v), true);
      if (minus.empty() && plus.empty()) continue;
      int g0 = m().add_bool("gv0.v" + std::to_string(v), kTierAux, 0);
      int g1 = m().add_bool("gv1.v" + std::to_string(v), kTierAux, 0);
      ec_.gv[static_cast<int>(v)] = {g0, g1};
      std::vector<LinTerm> d0{{-1, g0}};
      for (int w : plus) d0.push_back({1, w});
      for (int w : minus) d0.push_back({-1, w});
      m().add_lin(d0, Cmp::Le, 0, "gv0.def");
      std::vector<LinTerm> d1{{-1, g1}};
      for (int w : minus) d1.push_back({1, w});
      for (int w : plus) d1.push_back({-1, w});
      m().add_lin(d1, Cmp::Le, 0, "gv1.def");
    }

    for (int layer = 2; layer <= kLayerCount; ++layer) {
      const LayerRules& rules = cfg_.rules.layer(layer);
      encode_mar(layer, rules);
      encode_eol_shr(layer, rules);
      if (layer >= 3) encode_via_sep(layer, rules.via_separation_radius);
      encode_prl(layer, rules);
    }

    for (size_t r = 0; r < g.rows().size(); ++r) {
      ec_.m2_row.push_back(m().add_bool("m2row." + std::to_string(r), kTierAux, 0));
    }
    for (const auto& net : ec_.routed_nets) {
      for (const auto& [e, w] : ec_.wire.at(net)) {
        const Vertex& a = g.vertex(g.edges()[e].a);
        if (a.layer != kLayerM2) continue;
        m().add_le(w, ec_.m2_row[row_index(a.row)], 0, "w<=m2row");
      }
    }
  }

  std::vector<std::vector<int>> layer_tracks(int layer) const {
    const GridGraph& g = ec_.grid;
    std::map<Nm, std::vector<int>> by_track;
    for (size_t v = 0; v < g.vertices().size(); ++v) {
      const Vertex& vx = g.vertex(v);
      if (vx.layer != layer || vx.col == 0) continue;
      by_track[layer_is_horizontal(layer) ? vx.row : vx.col].push_back(static_cast<int>(v));
    }
    std::vector<std::vector<int>> out;
    for (auto& [coord, vs] : by_track) {
      std::sort(vs.begin(), vs.end(), [&](int a, int b) {
        return layer_is_horizontal(layer) ? g.vertex(a).col < g.vertex(b).col
                                          : g.vertex(a).row < g.vertex(b).row;
      });
      out.push_back(vs);
    }
    return out;
  }

  Nm along(int layer, int v) const {
    const Vertex& vx = ec_.grid.vertex(v);
    return layer_is_horizontal(layer) ? vx.col : vx.row;
  }

  void encode_mar(int layer, const LayerRules& rules) {
    if (rules.mar_length <= 0) return;
    for (const auto& track : layer_tracks(layer)) {
      for (size_t i = 0; i < track.size(); ++i) {
        for (size_t j = i + 1; j < track.size(); ++j) {
          if (along(layer, track[j]) - along(layer, track[i]) >= rules.mar_length) break;
          auto gi = ec_.gv.find(track[i]);
          auto gj = ec_.gv.find(track[j]);
          if (gi == ec_.gv.end() || gj == ec_.gv.end()) continue;
          // start at i and end at j: a segment shorter than the minimum area
          m().add_card({pos(gi->second[0]), pos(gj->second[1])}, 1, "mar");
        }
      }
    }
  }

  void encode_eol_shr(int layer, const LayerRules& rules) {
    if (rules.eol_spacing <= 0 && rules.shr_distance <= 0) return;
    auto tracks = layer_tracks(layer);
    for (size_t t = 0; t + 1 < tracks.size(); ++t) {
      for (int u : tracks[t]) {
        for (int v : tracks[t + 1]) {
          auto gu = ec_.gv.find(u);
          auto gw = ec_.gv.find(v);
          if (gu == ec_.gv.end() || gw == ec_.gv.end()) continue;
          const Vertex& a = ec_.grid.vertex(u);
          const Vertex& b = ec_.grid.vertex(v);
          Nm d2v = dist2(a.col - b.col, a.row - b.row);
          if (rules.eol_spacing > 0 && d2v < rules.eol_spacing * rules.eol_spacing) {
            m().add_card({pos(gu->second[0]), pos(gu->second[1]), pos(gw->second[0]),
                          pos(gw->second[1])},
                         1, "eol");
          } else if (rules.shr_distance > 0) {
            Nm da = std::abs(along(layer, u) - along(layer, v));
            if (da < rules.shr_distance) {
              m().add_card({pos(gu->second[0]), pos(gw->second[0])}, 1, "shr");
              m().add_card({pos(gu->second[1]), pos(gw->second[1])}, 1, "shr");
            }
          }
        }
      }
    }
  }

  void encode_via_sep(int upper_layer, Nm radius) {
    if (radius <= 0) return;
    const GridGraph& g = ec_.grid;
    std::vector<int> usable;
    for (int e : g.via_edges(upper_layer - 1)) {
      if (g.vertex(g.edges()[e].a).col > 0) usable.push_back(e);
    }
    for (size_t i = 0; i < usable.size(); ++i) {
      for (size_t j = i + 1; j < usable.size(); ++j) {
        const Vertex& a = g.vertex(g.edges()[usable[i]].a);
        const Vertex& b = g.vertex(g.edges()[usable[j]].a);
        Nm d2v = dist2(a.col - b.col, a.row - b.row);
        if (d2v == 0 || d2v >= radius * radius) continue;
        std::vector<Lit> lits;
        for (const auto& net : ec_.routed_nets) {
          lits.push_back(pos(ec_.via.at(net).at(usable[i])));
          lits.push_back(pos(ec_.via.at(net).at(usable[j])));
        }
        m().add_card(lits, 1, "viasep");
      }
    }
  }

  void encode_prl(int layer, const LayerRules& rules) {
    if (rules.prl.empty()) return;
    auto tracks = layer_tracks(layer);
    for (const auto& tier : rules.prl) {
      for (size_t t1 = 0; t1 < tracks.size(); ++t1) {
        for (size_t t2 = t1 + 1; t2 < tracks.size(); ++t2) {
          Nm gap =
              std::abs(track_coord(layer, tracks[t2][0]) - track_coord(layer, tracks[t1][0]));
          if (gap >= tier.spacing) continue;
          prl_windows(layer, tracks[t1], tracks[t2], tier.run_length);
        }
      }
    }
  }

  Nm track_coord(int layer, int v) const {
    const Vertex& vx = ec_.grid.vertex(v);
    return layer_is_horizontal(layer) ? vx.row : vx.col;
  }

  void prl_windows(int layer, const std::vector<int>& ta, const std::vector<int>& tb,
                   Nm run_length) {
    std::map<Nm, std::pair<int, int>> shared;
    for (int v : ta) shared[along(layer, v)] = {v, -1};
    for (int v : tb) {
      auto it = shared.find(along(layer, v));
      if (it != shared.end()) it->second.second = v;
    }
    std::vector<std::pair<Nm, int>> both;
    for (const auto& [x, pr] : shared) {
      if (pr.second < 0) continue;
      int bvar = m().add_bool("prl.b", kTierAux, 0);
      std::vector<LinTerm> low{{1, bvar}};
      for (const auto& net : ec_.routed_nets) {
        low.push_back({-1, ec_.occ.at(net).at(pr.first)});
        low.push_back({-1, ec_.occ.at(net).at(pr.second)});
      }
      m().add_lin(low, Cmp::Ge, -1, "prl.def");  // b >= occA + occB - 1
      both.push_back({x, bvar});
    }
    for (size_t i = 0; i < both.size(); ++i) {
      size_t j = i;
      while (j + 1 < both.size() && both[j + 1].first - both[i].first <= run_length) ++j;
      if (j + 1 >= both.size()) break;
      // window i..j+1 spans more than run_length: not all co-occupied
      std::vector<LinTerm> cap;
      for (size_t k = i; k <= j + 1; ++k) cap.push_back({1, both[k].second});
      m().add_lin(cap, Cmp::Le, static_cast<long long>(j + 1 - i), "prl.cap");
    }
  }

  // --- shared source/gate/drain ---------------------------------------------

  void encode_sgd() {
    for (int c : ec_.interior_cols) {
      std::vector<LinTerm> sum;
      for (const auto& a : nl_.transistors) {
        if (a.kind != MosKind::PMOS) continue;
        for (const auto& b : nl_.transistors) {
          if (b.kind != MosKind::NMOS || a.gate_net != b.gate_net) continue;
          int pair =
              m().add_bool("sgd.g." + a.id + "." + b.id + "." + std::to_string(c), kTierAux, 1);
          m().add_le(pair, ec_.devices.at(a.id).at.at(c), 0, "sgdg<=a");
          m().add_le(pair, ec_.devices.at(b.id).at.at(c), 0, "sgdg<=b");
          sum.push_back({-1, pair});
        }
      }
      if (sum.empty()) continue;
      int share = m().add_bool("sharegate." + std::to_string(c), kTierAux, 1);
      ec_.share_gate[c] = share;
      sum.push_back({1, share});
      m().add_lin(sum, Cmp::Le, 0, "sharegate.upper");  // share <= sum(pairs)
      m().add_lin({{1, share}, {1, ec_.scx_gate.at(c)}}, Cmp::Le, 1, "sharegate.cut");
    }

    for (int kind = 0; kind < 2; ++kind) {
      MosKind mk = kind == 0 ? MosKind::NMOS : MosKind::PMOS;
      for (const auto& [k, scx] : ec_.scx_sd) {
        std::vector<LinTerm> sum;
        for (const auto& a : nl_.transistors) {
          if (a.kind != mk) continue;
          for (const auto& b : nl_.transistors) {
            if (b.kind != mk || a.id == b.id) continue;
            if (!ec_.devices.at(a.id).at.count(k - 1)) continue;
            if (!ec_.devices.at(b.id).at.count(k)) continue;
            for (int fa = 0; fa < 2; ++fa) {
              const std::string& na = fa == 0 ? a.drain_net : a.source_net;
              for (int fb = 0; fb < 2; ++fb) {
                const std::string& nb = fb == 0 ? b.source_net : b.drain_net;
                if (na != nb) continue;
                int pair = m().add_bool("sgd.d." + a.id + "." + b.id + "." +
                                            std::to_string(k) + "." + std::to_string(fa) +
                                            std::to_string(fb),
                                        kTierAux, 1);
                m().add_le(pair, ec_.devices.at(a.id).atf[fa].at(k - 1), 0, "sgdd<=a");
                m().add_le(pair, ec_.devices.at(b.id).atf[fb].at(k), 0, "sgdd<=b");
                sum.push_back({-1, pair});
              }
            }
          }
        }
        if (sum.empty()) continue;
        int share =
            m().add_bool("sharesd." + std::to_string(kind) + "." + std::to_string(k), kTierAux, 1);
        ec_.share_sd[{kind, k}] = share;
        sum.push_back({1, share});
        m().add_lin(sum, Cmp::Le, 0, "sharesd.upper");
        m().add_lin({{1, share}, {1, scx}}, Cmp::Le, 1, "sharesd.cut");
      }
    }
  }

  // --- pins: separation and minimum opening -----------------------------------

  void encode_pins() {
    const GridGraph& g = ec_.grid;
    int t = cfg_.row_count;
    if (nl_.pins.empty()) return;

    const auto& c3 = g.columns(3);
    for (size_t k = 0; k < c3.size(); ++k) {
      if (c3[k] == 0) continue;
      int used = m().add_bool("m1used." + std::to_string(k), kTierAux, 0);
      ec_.m1_track_used[static_cast<int>(k)] = used;
      for (const auto& net : ec_.routed_nets) {
        for (Nm y : g.rows()) {
          int v = g.vertex_index(3, y, c3[k]);
          auto it = ec_.occ.at(net).find(v);
          if (it != ec_.occ.at(net).end()) m().add_le(it->second, used, 0, "occ<=m1used");
        }
      }
    }

    for (const auto& pin : nl_.pins) {
      EncodedCell::PinVars pv;
      pv.net = pin.net;
      std::vector<LinTerm> one_row;
      for (int r = 0; r < t; ++r) {
        int var = m().add_bool("pinrow." + pin.net + "." + std::to_string(r), kTierAux, 0);
        pv.row.push_back(var);
        one_row.push_back({1, var});
      }
      m().add_lin(one_row, Cmp::Eq, 1, "pinrow.one." + pin.net);

      std::vector<LinTerm> one_rep;
      const auto& c2 = g.columns(2);
      for (int r = 0; r < t; ++r) {
        for (size_t k = 0; k < c2.size(); ++k) {
          if (c2[k] == 0) continue;
          int v = g.vertex_index(2, g.rows()[r], c2[k]);
          int rep = m().add_bool(
              "pinrep." + pin.net + "." + std::to_string(r) + "." + std::to_string(k), kTierAux,
              0);
          pv.rep[{r, static_cast<int>(k)}] = rep;
          m().add_le(rep, pv.row[r], 0, "rep<=row");
          m().add_le(rep, ec_.occ.at(pin.net).at(v), 0, "rep<=occ");
          one_rep.push_back({1, rep});
        }
      }
      m().add_lin(one_rep, Cmp::Eq, 1, "pinrep.one." + pin.net);

      if (cfg_.min_pin_opening > 0) {
        std::vector<LinTerm> total;
        for (const auto& [k, used] : ec_.m1_track_used) {
          int q = m().add_bool("pinopen." + pin.net + "." + std::to_string(k), kTierAux, 1);
          pv.open[k] = q;
          std::vector<LinTerm> row_or{{-1, q}};
          for (int r = 0; r < t; ++r) {
            int v = g.vertex_index(2, g.rows()[r], c3[k]);
            auto it = ec_.occ.at(pin.net).find(v);
            if (it == ec_.occ.at(pin.net).end()) continue;
            int qr = m().add_bool("pinopen.r." + pin.net + "." + std::to_string(r) + "." +
                                      std::to_string(k),
                                  kTierAux, 1);
            m().add_le(qr, pv.row[r], 0, "qr<=row");
            m().add_le(qr, it->second, 0, "qr<=occ");
            row_or.push_back({1, qr});
          }
          m().add_lin(row_or, Cmp::Ge, 0, "q<=sum.qr");
          m().add_lin({{1, q}, {1, used}}, Cmp::Le, 1, "q<=!m1used");
          total.push_back({1, q});
        }
        m().add_lin(total, Cmp::Ge, cfg_.min_pin_opening, "mpo." + pin.net);
      }
      ec_.pins[pin.net] = std::move(pv);
    }

    if (cfg_.pin_separation_enabled) {
      int cap = static_cast<int>(nl_.pins.size()) <= t
                    ? 1
                    : static_cast<int>((nl_.pins.size() + t - 1) / t);
      for (int r = 0; r < t; ++r) {
        std::vector<Lit> lits;
        for (const auto& pin : nl_.pins) lits.push_back(pos(ec_.pins.at(pin.net).row[r]));
        m().add_card(lits, cap, "ps.row." + std::to_string(r));
      }
    }
  }

  // --- objective ----------------------------------------------------------------

  void encode_objective() {
    std::vector<LinTerm> obj;
    obj.push_back({wt_.cw, ec_.cw});
    for (const auto& [net, wl] : ec_.net_wl) obj.push_back({wt_.wl, wl});
    for (const auto& [c, v] : ec_.share_gate) obj.push_back({-wt_.sgd, v});
    for (const auto& [key, v] : ec_.share_sd) obj.push_back({-wt_.sgd, v});
    for (const auto& [c, v] : ec_.brk) obj.push_back({-wt_.dbx * c, v});
    for (int v : ec_.m2_row) obj.push_back({wt_.m2, v});
    m().set_objective(obj);
  }

  const Netlist& nl_;
  const TechConfig& cfg_;
  ObjectiveWeights wt_;
  bool pins_on_ = true;
  EncodedCell ec_;
  std::map<AccessPoint, std::vector<PresLit>> pres_;
  std::vector<std::vector<int>> incident_;
};

}  // namespace

EncodedCell encode_cell(const Netlist& netlist, const TechConfig& cfg,
                        const EncodeOptions& opts) {
  Encoder enc(netlist, cfg, opts);
  return enc.run();
}

}  // namespace cellforge
