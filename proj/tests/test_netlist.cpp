#include <sstream>

#include "cellforge/netlist.hpp"
#include "doctest.h"

using namespace cellforge;

namespace {
std::string data_path(const std::string& name) {
  return std::string(CELLFORGE_DATA_DIR) + "/" + name;
}
}  // namespace

TEST_CASE("inverter parses to 2 devices, 2 signal nets, 2 pins") {
  auto n = load_netlist(data_path("INV_X1.sp"));
  CHECK(n.name == "INV_X1");
  CHECK(n.transistors.size() == 2);
  CHECK(n.nets() == std::vector<std::string>{"A", "ZN"});
  CHECK(n.pins.size() == 2);
  CHECK(n.find_pin("A")->dir == PinDir::In);
  CHECK(n.find_pin("ZN")->dir == PinDir::Out);
  CHECK(n.power_nets == std::set<std::string>{"VDD", "VSS"});
  CHECK(n.w_p_units() == 1);
  CHECK(n.w_n_units() == 1);
}

TEST_CASE("DFFHQN_X1 parses to 24 devices and 17 signal nets") {
  auto n = load_netlist(data_path("DFFHQN_X1.sp"));
  CHECK(n.transistors.size() == 24);
  CHECK(n.nets().size() == 17);
  CHECK(derive_terminals(n).size() == 17);
}

TEST_CASE("BUF_X16 parses to 48 devices and 5 signal nets") {
  auto n = load_netlist(data_path("BUF_X16.sp"));
  CHECK(n.transistors.size() == 48);
  CHECK(n.nets().size() == 5);
}

TEST_CASE("accumulated widths feed the cell-width formula") {
  auto n = load_netlist(data_path("NAND2_X1.sp"));
  CHECK(n.w_p_units() == 2);
  CHECK(n.w_n_units() == 2);
}

TEST_CASE("canonical dump round-trips") {
  for (const char* cell :
       {"INV_X1.sp", "NAND2_X1.sp", "NOR2_X1.sp", "DFFHQN_X1.sp", "MUX2TG.sp"}) {
    auto n = load_netlist(data_path(cell));
    std::istringstream in(dump_netlist(n));
    auto back = parse_netlist(in);
    CHECK(back == n);
    CHECK(dump_netlist(back) == dump_netlist(n));
  }
}

TEST_CASE("terminal derivation designates one driver per net") {
  auto n = load_netlist(data_path("INV_X1.sp"));
  auto terms = derive_terminals(n);
  REQUIRE(terms.count("ZN"));
  // Two drain terminals; the lexicographically smaller device id drives.
  CHECK(terms["ZN"].source.transistor_id == "MN0");
  CHECK(terms["ZN"].source.role == TermRole::Drain);
  CHECK(terms["ZN"].sinks.size() == 1);
  // Gate-only net: falls back to a gate terminal.
  CHECK(terms["A"].source.role == TermRole::Gate);
  CHECK(terms["A"].sinks.size() == 1);

  auto nand = load_netlist(data_path("NAND2_X1.sp"));
  auto nt = derive_terminals(nand);
  CHECK(nt["net0"].sinks.size() == 1);  // 2-terminal net: one source, one sink
  CHECK(nt["ZN"].sinks.size() == 2);
}

TEST_CASE("terminal sets cover every device terminal exactly once") {
  auto n = load_netlist(data_path("DFFHQN_X1.sp"));
  auto terms = derive_terminals(n);
  size_t covered = 0;
  for (const auto& [net, nt] : terms) {
    CHECK(std::find(nt.sinks.begin(), nt.sinks.end(), nt.source) == nt.sinks.end());
    covered += 1 + nt.sinks.size();
  }
  size_t expected = 0;
  for (const auto& t : n.transistors) {
    for (TermRole r : {TermRole::Gate, TermRole::Source, TermRole::Drain}) {
      if (!n.is_power(t.net_of(r))) ++expected;
    }
  }
  CHECK(covered == expected);
}

TEST_CASE("folding splits wide devices into unit fingers") {
  std::istringstream in(
      "cell WIDE\npin A in\npin Z out\npower VDD VSS\n"
      "fet MP0 pmos g=A s=VDD d=Z w=3\n"
      "fet MN0 nmos g=A s=VSS d=Z w=3\nend\n");
  auto n = parse_netlist(in);
  CHECK(n.transistors.size() == 2);
  auto folded = fold_transistors(n);
  CHECK(folded.transistors.size() == 6);
  CHECK(folded.w_p_units() == 3);
  for (const auto& t : folded.transistors) CHECK(t.width_units == 1);
  // identical nets preserved
  CHECK(folded.transistors[0].gate_net == "A");
  CHECK(folded.transistors[0].id == "MP0.f0");
}

TEST_CASE("parse errors carry line numbers") {
  std::istringstream bad1(".SUBCKT X A VDD VSS\nMP0 Z A VDD VDD PMOS w=0\n.ENDS\n");
  CHECK_THROWS_WITH_AS(parse_netlist(bad1), doctest::Contains("zero-width"), NetlistError);

  std::istringstream bad2(".SUBCKT X A Z VDD VSS\nMN0 Z A VSS VSS NMOS w=1\n.ENDS\n");
  // Port A is fine (gate), but Z... both used. Undeclared pin net:
  std::istringstream bad3(".SUBCKT X A Q VDD VSS\nMN0 Z A VSS VSS NMOS w=1\n.ENDS\n");
  CHECK_THROWS_WITH_AS(parse_netlist(bad3), doctest::Contains("no device terminal"),
                       NetlistError);

  std::istringstream bad4(".SUBCKT X A Z VDD VSS\nMN0 Z A VSS VSS FOO w=1\n.ENDS\n");
  CHECK_THROWS_WITH_AS(parse_netlist(bad4), doctest::Contains("line 2"), NetlistError);

  std::istringstream bad5("garbage\n");
  CHECK_THROWS_AS(parse_netlist(bad5), NetlistError);

  std::istringstream bad6(".SUBCKT X A Z VDD VSS\nMN0 Z A VSS VSS NMOS w=1\n");
  CHECK_THROWS_WITH_AS(parse_netlist(bad6), doctest::Contains(".ENDS"), NetlistError);
}
