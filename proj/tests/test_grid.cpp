#include <set>

#include "cellforge/grid.hpp"
#include "doctest.h"

using namespace cellforge;

TEST_CASE("column sets: arithmetic progression on vertical layers") {
  auto cfg = default_tech(45, 0);
  auto cols = build_column_sets(cfg, 90);
  CHECK(cols[0] == std::vector<Nm>{0, 45, 90});
  CHECK(cols[2] == std::vector<Nm>{0, 45, 90});
}

TEST_CASE("column sets: horizontal layers merge their neighbours") {
  auto cfg = default_tech(30, 0);
  auto cols = build_column_sets(cfg, 90);
  CHECK(cols[2] == std::vector<Nm>{0, 30, 60, 90});
  CHECK(cols[1] == std::vector<Nm>{0, 30, 45, 60, 90});
  // set-union oracle
  std::set<Nm> expect(cols[0].begin(), cols[0].end());
  expect.insert(cols[2].begin(), cols[2].end());
  CHECK(std::vector<Nm>(expect.begin(), expect.end()) == cols[1]);
  // C4 = C3: the implicit fifth layer is empty
  CHECK(cols[3] == cols[2]);
}

TEST_CASE("offset column set avoids cell boundaries") {
  auto cfg = default_tech(27, 9);
  auto cols = build_column_sets(cfg, 315);
  CHECK(cols[2].size() == 12);
  for (Nm c : cols[2]) {
    CHECK(c != 0);
    CHECK(c != 315);
  }
}

TEST_CASE("grid counts match closed forms") {
  auto cfg = default_tech(45, 0);
  GridGraph g(cfg, 45);  // 1x1 CPP cell
  // 2 columns per layer, 4 rows
  for (int layer = 1; layer <= 4; ++layer) {
    int count = 0;
    for (const auto& v : g.vertices()) count += v.layer == layer;
    CHECK(count == 2 * 4);
  }
  // horizontal layers: |R| * (|C|-1) edges; vertical: |C| * (|R|-1)
  CHECK(g.edges_of_layer(2).size() == 4 * 1);
  CHECK(g.edges_of_layer(4).size() == 4 * 1);
  CHECK(g.edges_of_layer(1).size() == 2 * 3);
  CHECK(g.edges_of_layer(3).size() == 2 * 3);
}

TEST_CASE("irregular L2 spacing equals the union of neighbour gaps") {
  auto cfg = default_tech(30, 0);
  GridGraph g(cfg, 135);
  std::multiset<Nm> gaps;
  const auto& c2 = g.columns(2);
  for (size_t i = 1; i < c2.size(); ++i) gaps.insert(c2[i] - c2[i - 1]);
  CHECK(gaps == std::multiset<Nm>{15, 15, 15, 30, 30, 30});
  // horizontal edge lengths take at most |distinct gaps| values
  std::set<Nm> lens;
  for (int e : g.edges_of_layer(2)) lens.insert(g.edges()[e].length);
  std::set<Nm> distinct(gaps.begin(), gaps.end());
  CHECK(lens == distinct);
}

TEST_CASE("vias exist exactly where adjacent layers share (row, col)") {
  auto cfg = default_tech(30, 0);
  GridGraph g(cfg, 90);
  // brute-force pairing oracle between L2 and L3
  std::set<std::pair<Nm, Nm>> expect;
  for (Nm r : g.rows()) {
    for (Nm c : g.columns(3)) expect.insert({r, c});
  }
  std::set<std::pair<Nm, Nm>> got;
  for (int e : g.via_edges(2)) {
    const auto& va = g.vertex(g.edges()[e].a);
    const auto& vb = g.vertex(g.edges()[e].b);
    CHECK(va.layer == 2);
    CHECK(vb.layer == 3);
    CHECK(va.row == vb.row);
    CHECK(va.col == vb.col);
    got.insert({va.row, va.col});
  }
  CHECK(got == expect);
}

TEST_CASE("arc view doubles every edge with full incidence") {
  auto cfg = default_tech(30, 15);
  GridGraph g(cfg, 135);
  auto av = g.arc_view();
  CHECK(av.arcs.size() == 2 * g.edges().size());
  std::vector<int> degree(g.vertices().size(), 0);
  for (const auto& e : g.edges()) {
    ++degree[e.a];
    ++degree[e.b];
  }
  for (size_t v = 0; v < g.vertices().size(); ++v) {
    CHECK(av.out[v].size() == static_cast<size_t>(degree[v]));
    CHECK(av.in[v].size() == static_cast<size_t>(degree[v]));
    for (int a : av.out[v]) CHECK(av.arcs[a].from == static_cast<int>(v));
    for (int a : av.in[v]) CHECK(av.arcs[a].to == static_cast<int>(v));
  }
  // path reversal maps arcs bijectively: arc 2k and 2k+1 oppose
  for (size_t k = 0; k < g.edges().size(); ++k) {
    CHECK(av.arcs[2 * k].from == av.arcs[2 * k + 1].to);
    CHECK(av.arcs[2 * k].to == av.arcs[2 * k + 1].from);
  }
}

TEST_CASE("deterministic construction") {
  auto cfg = default_tech(27, 9);
  GridGraph a(cfg, 180), b(cfg, 180);
  CHECK(a.dump() == b.dump());
}

TEST_CASE("boundary usability: dummies excluded, interior within CW") {
  auto cfg = default_tech(30, 0);
  GridGraph g(cfg, 180);  // canvas 4 CPP
  CHECK_FALSE(g.column_usable(kLayerM1, 0, 4));
  CHECK(g.column_usable(kLayerM1, 30, 1));
  CHECK_FALSE(g.column_usable(kLayerM1, 45, 1));   // on the CW=1 boundary
  CHECK(g.column_usable(kLayerM0, 45, 1));         // M0 may touch the edge
  CHECK(g.column_usable(kLayerM1, 60, 2));
  CHECK_FALSE(g.column_usable(kLayerM1, 90, 2));
  // usable M1 columns at width w match the resource count
  for (int w = 1; w <= 4; ++w) {
    int usable = 0;
    for (Nm c : g.columns(3)) usable += g.column_usable(kLayerM1, c, w) ? 1 : 0;
    CHECK(usable == count_m1_resources(w, cfg));
  }
}

TEST_CASE("empty column set is a configuration error") {
  auto cfg = default_tech(45, 0);
  CHECK_THROWS_AS(build_column_sets(cfg, 0), TechError);
}
