#include "cellforge/accel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>

namespace cellforge {

CircuitGraph build_circuit_graph(const Netlist& netlist) {
  CircuitGraph g;
  std::map<std::string, int> tr_idx;
  for (const auto& t : netlist.transistors) {
    tr_idx[t.id] = static_cast<int>(g.names.size());
    g.names.push_back(t.id);
  }
  g.transistor_count = static_cast<int>(g.names.size());

  // net -> incident transistors (deduplicated), power removed
  std::map<std::string, std::set<int>> net_inc;
  for (const auto& t : netlist.transistors) {
    for (TermRole r : {TermRole::Gate, TermRole::Source, TermRole::Drain}) {
      const std::string& n = t.net_of(r);
      if (!netlist.is_power(n)) net_inc[n].insert(tr_idx[t.id]);
    }
  }

  std::set<std::pair<int, int>> direct;
  for (const auto& [net, inc] : net_inc) {
    size_t deg = inc.size();
    if (deg <= 2) {
      // contract: reconnect the incident transistors directly
      if (deg == 2) {
        auto it = inc.begin();
        int a = *it++;
        int b = *it;
        direct.insert({std::min(a, b), std::max(a, b)});
      }
      continue;
    }
    int node = static_cast<int>(g.names.size());
    g.names.push_back(net);
    for (int tr : inc) {
      g.edges.push_back({node, tr, static_cast<double>(deg)});
    }
  }
  for (const auto& [a, b] : direct) g.edges.push_back({a, b, 1.0});
  return g;
}

namespace {

// all-pairs weighted shortest paths; disconnected pairs get twice the
// largest finite distance so components repel in the embedding
std::vector<std::vector<double>> graph_distances(const CircuitGraph& g) {
  size_t n = g.names.size();
  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> d(n, std::vector<double>(n, kInf));
  for (size_t i = 0; i < n; ++i) d[i][i] = 0;
  for (const auto& e : g.edges) {
    d[e.a][e.b] = std::min(d[e.a][e.b], e.length);
    d[e.b][e.a] = d[e.a][e.b];
  }
  for (size_t k = 0; k < n; ++k) {
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = 0; j < n; ++j) {
        if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
      }
    }
  }
  double dmax = 1.0;
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (std::isfinite(d[i][j])) dmax = std::max(dmax, d[i][j]);
    }
  }
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      if (!std::isfinite(d[i][j])) d[i][j] = 2.0 * dmax;
    }
  }
  return d;
}

double stress_of(const std::vector<std::array<double, 2>>& x,
                 const std::vector<std::vector<double>>& d) {
  double s = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    for (size_t j = i + 1; j < x.size(); ++j) {
      double dist = std::hypot(x[i][0] - x[j][0], x[i][1] - x[j][1]);
      double w = 1.0 / (d[i][j] * d[i][j]);
      s += w * (dist - d[i][j]) * (dist - d[i][j]);
    }
  }
  return s;
}

}  // namespace

std::vector<std::array<double, 2>> spring_embedding(const CircuitGraph& g,
                                                    std::uint64_t seed, int max_iters,
                                                    double tol, bool* converged) {
  size_t n = g.names.size();
  std::vector<std::array<double, 2>> x(n);
  if (converged) *converged = true;
  if (n <= 1) return x;

  auto d = graph_distances(g);
  double radius = 0;
  for (size_t i = 0; i < n; ++i) radius = std::max(radius, d[0][i]);
  std::mt19937_64 rng(seed * 6364136223846793005ULL + 1442695040888963407ULL);
  std::uniform_real_distribution<double> jitter(-0.01, 0.01);
  double phase = std::uniform_real_distribution<double>(0, 2 * M_PI)(rng);
  for (size_t i = 0; i < n; ++i) {
    double a = phase + 2 * M_PI * static_cast<double>(i) / static_cast<double>(n);
    x[i] = {radius * std::cos(a) + jitter(rng), radius * std::sin(a) + jitter(rng)};
  }

  // stress majorization (SMACOF) with weights 1/d^2
  double prev = stress_of(x, d);
  bool ok = false;
  for (int iter = 0; iter < max_iters; ++iter) {
    std::vector<std::array<double, 2>> nx(n, {0, 0});
    for (size_t i = 0; i < n; ++i) {
      double wsum = 0;
      for (size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        double w = 1.0 / (d[i][j] * d[i][j]);
        double dist = std::hypot(x[i][0] - x[j][0], x[i][1] - x[j][1]);
        double ratio = dist > 1e-12 ? d[i][j] / dist : 0.0;
        nx[i][0] += w * (x[j][0] + ratio * (x[i][0] - x[j][0]));
        nx[i][1] += w * (x[j][1] + ratio * (x[i][1] - x[j][1]));
        wsum += w;
      }
      nx[i][0] /= wsum;
      nx[i][1] /= wsum;
    }
    x = nx;
    double cur = stress_of(x, d);
    if (std::abs(prev - cur) < tol * std::max(1.0, prev)) {
      ok = true;
      break;
    }
    prev = cur;
  }
  if (converged) *converged = ok;
  return x;
}

// ---------------------------------------------------------------------------
// Density-based hierarchical clustering (mutual-reachability MST, condensed
// by minimum cluster size, excess-of-mass selection).

namespace {

struct MstEdge {
  int a, b;
  double w;
};

std::vector<MstEdge> mutual_reachability_mst(const std::vector<std::array<double, 2>>& pts,
                                             int min_cluster_size) {
  size_t n = pts.size();
  auto dist = [&](size_t i, size_t j) {
    return std::hypot(pts[i][0] - pts[j][0], pts[i][1] - pts[j][1]);
  };
  // core distance: k-th nearest with the point itself counting first
  std::vector<double> core(n, 0);
  for (size_t i = 0; i < n; ++i) {
    std::vector<double> ds;
    for (size_t j = 0; j < n; ++j) {
      if (j != i) ds.push_back(dist(i, j));
    }
    std::sort(ds.begin(), ds.end());
    int k = std::max(0, min_cluster_size - 2);  // (min_size-1)-th other point
    core[i] = ds.empty() ? 0 : ds[std::min<size_t>(k, ds.size() - 1)];
  }
  auto mreach = [&](size_t i, size_t j) {
    return std::max({core[i], core[j], dist(i, j)});
  };
  // Prim
  std::vector<MstEdge> mst;
  std::vector<char> used(n, 0);
  std::vector<double> best(n, std::numeric_limits<double>::infinity());
  std::vector<int> from(n, -1);
  used[0] = 1;
  for (size_t j = 1; j < n; ++j) {
    best[j] = mreach(0, j);
    from[j] = 0;
  }
  for (size_t it = 1; it < n; ++it) {
    int pick = -1;
    for (size_t j = 0; j < n; ++j) {
      if (!used[j] && (pick < 0 || best[j] < best[pick])) pick = static_cast<int>(j);
    }
    used[pick] = 1;
    mst.push_back({from[pick], pick, best[pick]});
    for (size_t j = 0; j < n; ++j) {
      if (!used[j]) {
        double w = mreach(pick, j);
        if (w < best[j]) {
          best[j] = w;
          from[j] = pick;
        }
      }
    }
  }
  return mst;
}

struct SelectResult {
  double stability = 0;
  std::vector<std::vector<int>> clusters;
};

// Splits S at its largest internal MST edge; recursive excess-of-mass
// selection. `edges` holds the MST restricted to S sorted descending.
SelectResult select_clusters(const std::vector<int>& pts, std::vector<MstEdge> edges,
                             double lambda_birth, int min_size, bool is_root) {
  SelectResult res;
  std::vector<int> cur = pts;
  std::vector<MstEdge> cur_edges = std::move(edges);
  double stab = 0;

  while (true) {
    if (cur.size() < static_cast<size_t>(min_size) || cur_edges.empty()) {
      // cluster dissolves; surviving points leave with the last lambda seen
      break;
    }
    // largest remaining edge splits the component
    auto it = std::max_element(cur_edges.begin(), cur_edges.end(),
                               [](const MstEdge& a, const MstEdge& b) {
                                 return std::tie(a.w, a.a, a.b) < std::tie(b.w, b.a, b.b);
                               });
    MstEdge cut = *it;
    cur_edges.erase(it);
    double lambda = cut.w > 1e-12 ? 1.0 / cut.w : std::numeric_limits<double>::max();

    // components after the cut
    std::map<int, std::vector<int>> adj;
    for (const auto& e : cur_edges) {
      adj[e.a].push_back(e.b);
      adj[e.b].push_back(e.a);
    }
    std::set<int> side;
    std::vector<int> stack{cut.a};
    side.insert(cut.a);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u : adj[v]) {
        if (side.insert(u).second) stack.push_back(u);
      }
    }
    std::vector<int> a, b;
    std::vector<MstEdge> ea, eb;
    for (int p : cur) (side.count(p) ? a : b).push_back(p);
    for (const auto& e : cur_edges) (side.count(e.a) ? ea : eb).push_back(e);

    if (a.size() >= static_cast<size_t>(min_size) && b.size() >= static_cast<size_t>(min_size)) {
      // true split: everything leaves this cluster here
      stab += static_cast<double>(cur.size()) * (lambda - lambda_birth);
      auto ra = select_clusters(a, std::move(ea), lambda, min_size, false);
      auto rb = select_clusters(b, std::move(eb), lambda, min_size, false);
      double child = ra.stability + rb.stability;
      if (!is_root && stab >= child) {
        res.stability = stab;
        res.clusters = {pts};
      } else {
        res.stability = std::max(stab, child);
        res.clusters = ra.clusters;
        res.clusters.insert(res.clusters.end(), rb.clusters.begin(), rb.clusters.end());
      }
      return res;
    }

    // the smaller side falls out as noise at this density
    const std::vector<int>& fall = a.size() < b.size() ? a : b;
    stab += static_cast<double>(fall.size()) * (lambda - lambda_birth);
    if (a.size() < static_cast<size_t>(min_size) && b.size() < static_cast<size_t>(min_size)) {
      stab += static_cast<double>(std::max(a.size(), b.size())) * (lambda - lambda_birth);
      break;  // both sides below minimum: the cluster dies entirely
    }
    if (a.size() < b.size()) {
      cur = b;
      cur_edges = eb;
    } else {
      cur = a;
      cur_edges = ea;
    }
  }

  if (!is_root && pts.size() >= static_cast<size_t>(min_size)) {
    res.stability = stab;
    res.clusters = {pts};
  }
  return res;
}

}  // namespace

std::vector<int> density_cluster_labels(const std::vector<std::array<double, 2>>& pts,
                                        int min_cluster_size) {
  std::vector<int> labels(pts.size(), -1);
  if (pts.size() < static_cast<size_t>(min_cluster_size)) return labels;
  auto mst = mutual_reachability_mst(pts, min_cluster_size);
  std::vector<int> all(pts.size());
  std::iota(all.begin(), all.end(), 0);
  auto sel = select_clusters(all, mst, 0.0, min_cluster_size, true);
  int next = 0;
  for (const auto& c : sel.clusters) {
    for (int p : c) labels[p] = next;
    ++next;
  }
  return labels;
}

namespace {

// Splits an oversized cluster at its weakest density link (largest internal
// mutual-reachability MST edge), recursively, until every piece fits k_max.
void split_to_kmax(const std::vector<int>& members,
                   const std::vector<std::array<double, 2>>& pts, int k_min, int k_max,
                   std::vector<std::vector<int>>& out, std::vector<int>& noise) {
  if (members.size() <= static_cast<size_t>(k_max)) {
    if (members.size() >= static_cast<size_t>(k_min)) out.push_back(members);
    else noise.insert(noise.end(), members.begin(), members.end());
    return;
  }
  std::vector<std::array<double, 2>> sub;
  for (int mi : members) sub.push_back(pts[mi]);
  auto mst = mutual_reachability_mst(sub, 2);
  auto it = std::max_element(mst.begin(), mst.end(), [](const auto& a, const auto& b) {
    return std::tie(a.w, a.a, a.b) < std::tie(b.w, b.a, b.b);
  });
  MstEdge cut = *it;
  mst.erase(it);
  std::map<int, std::vector<int>> adj;
  for (const auto& e : mst) {
    adj[e.a].push_back(e.b);
    adj[e.b].push_back(e.a);
  }
  std::set<int> side;
  std::vector<int> stack{cut.a};
  side.insert(cut.a);
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int u : adj[v]) {
      if (side.insert(u).second) stack.push_back(u);
    }
  }
  std::vector<int> a, b;
  for (size_t i = 0; i < members.size(); ++i) {
    (side.count(static_cast<int>(i)) ? a : b).push_back(members[i]);
  }
  split_to_kmax(a, pts, k_min, k_max, out, noise);
  split_to_kmax(b, pts, k_min, k_max, out, noise);
}

}  // namespace

ClusterSet embed_and_cluster(const CircuitGraph& g, int k_min, int k_max,
                             std::uint64_t seed) {
  ClusterSet cs;
  cs.k_min = k_min;
  cs.k_max = k_max;
  cs.seed = seed;
  if (g.transistor_count == 0) return cs;

  bool converged = false;
  auto emb = spring_embedding(g, seed, 500, 1e-6, &converged);
  if (!converged) return cs;  // fall back to no clustering

  // cluster transistor points only
  std::vector<std::array<double, 2>> pts(emb.begin(), emb.begin() + g.transistor_count);
  auto labels = density_cluster_labels(pts, k_min);

  std::map<int, std::vector<int>> by_label;
  std::vector<int> noise_idx;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) noise_idx.push_back(static_cast<int>(i));
    else by_label[labels[i]].push_back(static_cast<int>(i));
  }
  std::vector<std::vector<int>> capped;
  for (const auto& [l, members] : by_label) {
    split_to_kmax(members, pts, k_min, k_max, capped, noise_idx);
  }
  for (const auto& c : capped) {
    std::vector<std::string> ids;
    for (int i : c) ids.push_back(g.names[i]);
    std::sort(ids.begin(), ids.end());
    cs.clusters.push_back(ids);
  }
  std::sort(cs.clusters.begin(), cs.clusters.end());
  std::sort(noise_idx.begin(), noise_idx.end());
  for (int i : noise_idx) cs.noise.push_back(g.names[i]);
  std::sort(cs.noise.begin(), cs.noise.end());
  return cs;
}

ClusterSet cluster_netlist(const Netlist& netlist, int k_max, std::uint64_t seed) {
  return embed_and_cluster(build_circuit_graph(netlist), 2, k_max, seed);
}

void add_cluster_constraints(EncodedCell& ec, const ClusterSet& clusters) {
  int lo = ec.interior_cols.front();
  int hi = ec.interior_cols.back();
  int ci = 0;
  for (const auto& cluster : clusters.clusters) {
    long long wp = 0, wn = 0;
    for (const auto& id : cluster) {
      const Transistor* t = ec.netlist.find_transistor(id);
      if (!t) continue;
      (t->kind == MosKind::PMOS ? wp : wn) += t->width_units;
    }
    long long span = std::max(wp, wn);
    if (span < 2) continue;
    int smin = ec.model.add_int(lo, hi + 1, "clst" + std::to_string(ci) + ".min", 70);
    int smax = ec.model.add_int(lo, hi + 1, "clst" + std::to_string(ci) + ".max", 70);
    for (const auto& id : cluster) {
      const DeviceVars& dv = ec.devices.at(id);
      ec.model.add_le(smin, dv.col, 0, "clst.min");          // smin <= col
      ec.model.add_le(dv.col, smax, -1, "clst.max");         // col + 1 <= smax
    }
    ec.model.add_lin({{1, smax}, {-1, smin}}, Cmp::Eq, span, "clst.span");
    ++ci;
  }
}

std::vector<std::vector<std::string>> identical_groups(const Netlist& netlist) {
  std::map<std::tuple<MosKind, std::string, std::string, std::string>,
           std::vector<std::string>>
      groups;
  for (const auto& t : netlist.transistors) {
    groups[{t.kind, t.gate_net, t.source_net, t.drain_net}].push_back(t.id);
  }
  std::vector<std::vector<std::string>> out;
  for (auto& [key, ids] : groups) {
    if (ids.size() < 2) continue;
    std::sort(ids.begin(), ids.end());
    out.push_back(ids);
  }
  return out;
}

void add_itp_constraints(EncodedCell& ec) {
  for (const auto& group : identical_groups(ec.netlist)) {
    for (size_t i = 1; i < group.size(); ++i) {
      ec.model.add_le(ec.devices.at(group[i - 1]).col, ec.devices.at(group[i]).col, 0,
                      "itp." + group[i - 1] + "<=" + group[i]);
    }
  }
}

long long hpwl_nm(const NetPoints& p) {
  if (p.xs.empty()) return 0;
  auto [xmin, xmax] = std::minmax_element(p.xs.begin(), p.xs.end());
  long long h = *xmax - *xmin;
  if (!p.mergeable && !p.ys.empty()) {
    auto [ymin, ymax] = std::minmax_element(p.ys.begin(), p.ys.end());
    h += *ymax - *ymin;
  }
  return h;
}

namespace {

// Terminal points per net under a fixed placement.
std::map<std::string, NetPoints> fixed_net_points(const EncodedCell& ec,
                                                  const std::vector<long long>& vals) {
  std::map<std::string, NetPoints> out;
  std::map<std::string, std::map<int, std::pair<bool, bool>>> stacked;  // net->col->(P,N)
  for (const auto& tr : ec.netlist.transistors) {
    const DeviceVars& dv = ec.devices.at(tr.id);
    int col = -1;
    for (const auto& [c, at] : dv.at) {
      if (vals[at] != 0) col = c;
    }
    if (col < 0) continue;
    int flip = static_cast<int>(vals[dv.flip]);
    for (TermRole role : {TermRole::Gate, TermRole::Source, TermRole::Drain}) {
      const std::string& net = tr.net_of(role);
      if (ec.netlist.is_power(net)) continue;
      int k = ec.access_col(role, flip, col);
      int row = role == TermRole::Gate ? ec.gate_row(tr.kind) : ec.sd_row(tr.kind);
      out[net].xs.push_back(ec.col_x(k));
      out[net].ys.push_back(ec.row_y(row));
      auto& pn = stacked[net][k];
      (tr.kind == MosKind::PMOS ? pn.first : pn.second) = true;
    }
  }
  for (auto& [net, p] : out) {
    for (const auto& [k, pn] : stacked[net]) {
      if (pn.first && pn.second) p.mergeable = true;
    }
  }
  return out;
}

// Per-net routing lower bound under a fixed placement: x-span of the
// terminals, plus the smallest vertical gap any tree must bridge between
// MOL merge groups (with a via pair whenever that gap is nonzero).
struct NetBound {
  long long metal = 0;
};

std::map<std::string, NetBound> placement_net_bounds(const EncodedCell& ec,
                                                     const std::vector<long long>& lo,
                                                     const std::vector<long long>& hi) {
  struct Term {
    Nm x, y;
    int group;
  };
  std::map<std::string, std::vector<Term>> nets;
  // access vertex -> (net, index into nets[net]) for shared-slot joins
  std::map<std::pair<Nm, Nm>, std::pair<std::string, int>> at_vertex;
  // (col, row-pair kind) stacking for merge joins
  struct Stack {
    int p = -1, n = -1;
  };
  std::map<std::string, std::map<int, Stack>> gate_stack, sd_stack;

  for (const auto& tr : ec.netlist.transistors) {
    const DeviceVars& dv = ec.devices.at(tr.id);
    int col = -1;
    for (const auto& [c, at] : dv.at) {
      if (lo[at] != 0) col = c;
    }
    if (col < 0) continue;
    int flip = static_cast<int>(lo[dv.flip]);
    for (TermRole role : {TermRole::Gate, TermRole::Source, TermRole::Drain}) {
      const std::string& net = tr.net_of(role);
      if (ec.netlist.is_power(net)) continue;
      int k = ec.access_col(role, flip, col);
      int row = role == TermRole::Gate ? ec.gate_row(tr.kind) : ec.sd_row(tr.kind);
      Nm x = ec.col_x(k);
      Nm y = ec.row_y(row);
      auto key = std::make_pair(x, y);
      auto it = at_vertex.find(key);
      if (it != at_vertex.end() && it->second.first == net) continue;  // shared vertex
      auto& terms = nets[net];
      terms.push_back({x, y, static_cast<int>(terms.size())});
      at_vertex[key] = {net, terms.back().group};
      auto& stacks = role == TermRole::Gate ? gate_stack[net] : sd_stack[net];
      auto& st = stacks[k];
      (tr.kind == MosKind::PMOS ? st.p : st.n) = terms.back().group;
    }
  }

  std::map<std::string, NetBound> out;
  for (auto& [net, terms] : nets) {
    // union merge groups where the separating cut can still be absent
    std::vector<int> uf(terms.size());
    for (size_t i = 0; i < terms.size(); ++i) uf[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int v) -> int {
      return uf[v] == v ? v : uf[v] = find(uf[v]);
    };
    auto join_if_open = [&](const std::map<int, Stack>& stacks,
                            const std::map<int, int>& scx) {
      for (const auto& [k, st] : stacks) {
        if (st.p < 0 || st.n < 0) continue;
        auto it = scx.find(k);
        if (it != scx.end() && lo[it->second] > 0) continue;  // cut fixed in
        uf[find(st.p)] = find(st.n);
      }
    };
    join_if_open(gate_stack[net], ec.scx_gate);
    join_if_open(sd_stack[net], ec.scx_sd);

    std::map<int, std::vector<Nm>> group_rows;
    Nm xmin = terms.front().x, xmax = terms.front().x;
    for (const auto& t : terms) {
      xmin = std::min(xmin, t.x);
      xmax = std::max(xmax, t.x);
      group_rows[find(t.group)].push_back(t.y);
    }
    NetBound b;
    if (group_rows.size() >= 2) {
      b.metal = xmax - xmin;
      Nm ygap = 0;
      for (auto i = group_rows.begin(); i != group_rows.end(); ++i) {
        for (auto j = std::next(i); j != group_rows.end(); ++j) {
          Nm best = std::numeric_limits<Nm>::max();
          for (Nm ya : i->second) {
            for (Nm yb : j->second) best = std::min(best, std::abs(ya - yb));
          }
          ygap = std::max(ygap, best);
        }
      }
      if (ygap > 0) b.metal += ygap + 2 * ec.tech.via_weight();
    }
    out[net] = b;
  }
  (void)hi;
  return out;
}

}  // namespace

long long placement_hpwl_sum(const EncodedCell& ec, const std::vector<long long>& lo) {
  long long sum = 0;
  for (const auto& [net, pts] : fixed_net_points(ec, lo)) sum += hpwl_nm(pts);
  return sum;
}

SubtreeBound make_rlbt_hook(const EncodedCell& ec) {
  SubtreeBound sb;
  for (const auto& [id, dv] : ec.devices) {
    sb.trigger_vars.push_back(dv.flip);
    for (const auto& [c, at] : dv.at) sb.trigger_vars.push_back(at);
  }
  // Captures the encoded cell by pointer: the caller keeps it alive for the
  // duration of the solve.
  const EncodedCell* cell = &ec;
  sb.eval = [cell](const std::vector<long long>& lo,
                   const std::vector<long long>& hi) -> long long {
    const ObjectiveWeights& wt = cell->weights;
    long long bound = wt.cw * lo[cell->cw];
    Nm via_w = cell->tech.via_weight();
    auto bounds = placement_net_bounds(*cell, lo, hi);
    for (const auto& [net, edges] : cell->wire) {
      long long fixed_metal = 0;
      for (const auto& [e, var] : edges) {
        if (lo[var] > 0) fixed_metal += cell->grid.edges()[e].length;
      }
      for (const auto& [e, var] : cell->via.at(net)) {
        if (lo[var] > 0) fixed_metal += via_w;
      }
      auto it = bounds.find(net);
      bound += wt.wl * std::max(it == bounds.end() ? 0 : it->second.metal, fixed_metal);
    }
    for (const auto& [c, v] : cell->share_gate) bound -= wt.sgd * hi[v];
    for (const auto& [key, v] : cell->share_sd) bound -= wt.sgd * hi[v];
    for (const auto& [c, v] : cell->brk) bound -= wt.dbx * c * hi[v];
    for (int v : cell->m2_row) bound += wt.m2 * lo[v];
    return bound;
  };
  return sb;
}

GapDecision gap_termination(const GapPolicy& policy, long long objective_bound,
                            long long lower_bound, double elapsed_s) {
  if (elapsed_s > policy.time_limit_s) return GapDecision::Stop;
  return gap_reached(policy, objective_bound, lower_bound) ? GapDecision::Stop
                                                           : GapDecision::Continue;
}

}  // namespace cellforge
