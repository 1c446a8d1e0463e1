#include <sstream>

#include "cellforge/encode.hpp"
#include "cellforge/layout.hpp"
#include "cellforge/solver.hpp"
#include "doctest.h"
#include "support/oracle.hpp"

using namespace cellforge;

namespace {
std::string data_path(const std::string& name) {
  return std::string(CELLFORGE_DATA_DIR) + "/" + name;
}

SolveResult solve_cell(const EncodedCell& ec, GapPolicy policy = {}) {
  SolveRequest req;
  req.model = &ec.model;
  req.policy = policy;
  return solve(req);
}
}  // namespace

TEST_CASE("inverter encodes with the expected variable families") {
  auto nl = load_netlist(data_path("INV_X1.sp"));
  auto cfg = oracle::bare_tech(45, 0, 1);
  auto ec = encode_cell(nl, cfg);

  CHECK(ec.w_total == 90);
  CHECK(ec.interior_cols == std::vector<int>{1});
  CHECK(ec.devices.size() == 2);
  // single interior column: placements are forced by propagation
  CHECK(ec.commodities.size() == 2);  // A has 1 sink, ZN has 1 sink
  CHECK(ec.model.check_well_formed().empty());

  // two-terminal nets, one source each; merge arcs exist for both nets
  int merge_arcs = 0;
  for (const auto& a : ec.arcs) {
    if (a.kind == ArcKind::MergeGate || a.kind == ArcKind::MergeSd) ++merge_arcs;
  }
  CHECK(merge_arcs >= 4);  // both directions for A (gate) and ZN (diffusion)
}

TEST_CASE("inverter solves to a one-column cell with zero metal") {
  auto nl = load_netlist(data_path("INV_X1.sp"));
  auto cfg = oracle::bare_tech(45, 0, 1);
  auto ec = encode_cell(nl, cfg);
  auto r = solve_cell(ec);
  REQUIRE(r.status == SolveStatus::Optimal);
  REQUIRE(ec.model.verify(r.assignment).empty());

  auto layout = extract_layout(ec, r.assignment);
  CHECK(layout.width_cpp == 2);
  CHECK(layout.segments.empty());  // both nets merge through the MOL column
  auto m = compute_metrics(layout, cfg);
  CHECK(m.cw_cpp == 2);
  CHECK(m.wirelength_nm == 0);
  CHECK(m.m2_tracks == 0);
  CHECK(m.sgd == 1);  // the shared gate column; vertical S/D merges do not count
  CHECK(recompose_objective(m, ec.weights) == r.objective_bound);
  CHECK(audit_layout(layout, cfg).clean());
}

TEST_CASE("zero-sink net generates no flow commodities") {
  // A net touching a single device terminal has no sinks to route.
  std::istringstream in(
      "cell TOY\npin A in\npower VDD VSS\n"
      "fet M0 nmos g=A s=VSS d=VSS w=1\nend\n");
  auto nl = parse_netlist(in);
  auto cfg = oracle::bare_tech(45, 0, 1);
  auto ec = encode_cell(nl, cfg);
  CHECK(ec.commodities.empty());
}

TEST_CASE("mismatched stacked gates force a cut and metal routing") {
  // P gate net differs from N gate net in the same column only if the solver
  // stacks them; with one interior column it must, so a gate cut is forced.
  std::istringstream in(
      "cell TGBIT\npin A in\npin B in\npower VDD VSS\n"
      "fet MP0 pmos g=A s=VDD d=X w=1\n"
      "fet MN0 nmos g=B s=VSS d=X w=1\nend\n");
  auto nl = parse_netlist(in);
  auto cfg = oracle::bare_tech(45, 0, 1);
  auto ec = encode_cell(nl, cfg);
  auto r = solve_cell(ec);
  REQUIRE(r.status == SolveStatus::Optimal);
  auto layout = extract_layout(ec, r.assignment);
  REQUIRE(layout.devices[0].col == 1);
  REQUIRE(layout.devices[1].col == 1);
  bool gate_cut = false;
  for (const auto& c : layout.cuts) gate_cut |= c.kind == CutShape::Gate && c.col == 1;
  CHECK(gate_cut);
  CHECK(audit_layout(layout, cfg).clean());
}

TEST_CASE("shared-slot terminals on the same vertex need no flow") {
  // NAND2 internal net lands on one shared S/D vertex when the N devices
  // abut; the solver should find a zero-metal connection for it.
  auto nl = load_netlist(data_path("NAND2_X1.sp"));
  auto cfg = oracle::bare_tech(45, 0, 1);
  auto ec = encode_cell(nl, cfg);
  auto r = solve_cell(ec);
  REQUIRE(r.status == SolveStatus::Optimal);
  auto layout = extract_layout(ec, r.assignment);
  CHECK(layout.width_cpp == 3);
  auto rep = audit_layout(layout, cfg);
  CHECK(rep.clean());
  // net0 contributes no metal: its two terminals share the diffusion slot
  for (const auto& s : layout.segments) CHECK(s.net != "net0");
}

TEST_CASE("solver optimum matches the brute-force oracle on small cells") {
  for (const char* cell : {"INV_X1.sp", "BUF_X1.sp"}) {
    for (Nm mp3 : {45, 30}) {
      auto nl = load_netlist(data_path(cell));
      auto cfg = oracle::bare_tech(mp3, 0, 1);
      int expect = oracle::min_feasible_width(nl, cfg);
      auto ec = encode_cell(nl, cfg);
      auto r = solve_cell(ec);
      REQUIRE(r.status == SolveStatus::Optimal);
      auto layout = extract_layout(ec, r.assignment);
      INFO(cell, " mp3=", mp3);
      CHECK(layout.width_cpp == expect);
    }
  }
}

TEST_CASE("objective recomposition equals the solver objective") {
  for (const char* cell : {"INV_X1.sp", "BUF_X1.sp", "NAND2_X1.sp"}) {
    auto nl = load_netlist(data_path(cell));
    auto cfg = oracle::bare_tech(30, 0, 1);
    auto ec = encode_cell(nl, cfg);
    auto r = solve_cell(ec);
    REQUIRE(r.status == SolveStatus::Optimal);
    auto layout = extract_layout(ec, r.assignment);
    auto m = compute_metrics(layout, cfg);
    CHECK(recompose_objective(m, ec.weights) == r.objective_bound);
    CHECK(audit_layout(layout, cfg).clean());
  }
}
