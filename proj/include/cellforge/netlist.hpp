#pragma once

#include <iosfwd>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cellforge/geom.hpp"

namespace cellforge {

enum class MosKind { PMOS, NMOS };
enum class PinDir { In, Out, InOut };
enum class TermRole { Gate, Source, Drain };

const char* to_string(MosKind k);
const char* to_string(PinDir d);
const char* to_string(TermRole r);

struct Transistor {
  std::string id;
  MosKind kind = MosKind::NMOS;
  std::string gate_net;
  std::string source_net;
  std::string drain_net;
  int width_units = 1;  // diffusion width in placement-grid units

  const std::string& net_of(TermRole r) const;
};

struct Pin {
  std::string net;
  PinDir dir = PinDir::InOut;
};

class NetlistError : public std::runtime_error {
 public:
  NetlistError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what
                                    : what),
        line(line) {}
  int line;
};

struct Netlist {
  std::string name;
  std::vector<Transistor> transistors;
  std::vector<Pin> pins;                // external pins, subset of nets()
  std::set<std::string> power_nets;     // VDD/VSS-class nets, never routed

  // Signal nets (power/ground excluded), sorted. Every member has >= 1
  // device terminal.
  std::vector<std::string> nets() const;
  bool is_power(const std::string& net) const { return power_nets.count(net) > 0; }
  const Pin* find_pin(const std::string& net) const;
  const Transistor* find_transistor(const std::string& id) const;

  // Accumulated diffusion widths in grid units.
  long long w_p_units() const;
  long long w_n_units() const;

  void validate() const;  // throws NetlistError
};

// One device terminal.
struct TermRef {
  std::string transistor_id;
  TermRole role = TermRole::Gate;

  auto operator<=>(const TermRef&) const = default;
};

struct NetTerminals {
  std::string net;
  TermRef source;             // designated driver s_n
  std::vector<TermRef> sinks; // T_n, canonical order
};

// Parses the restricted SPICE .SUBCKT dialect (M-cards: name drain gate
// source bulk type [w=n]) or, when the first non-comment token is "cell",
// the structured-text dump format produced by dump_netlist().
Netlist parse_netlist(std::istream& in);
Netlist load_netlist(const std::string& path);

// Canonical structured-text dump; parse_netlist(dump_netlist(n)) == n.
std::string dump_netlist(const Netlist& n);

bool operator==(const Netlist& a, const Netlist& b);

// Splits every transistor wider than max_units into width-1 fingers with
// identical nets ("<id>.f0", "<id>.f1", ...). Explicit pre-pass; the encoder
// requires unit-width devices.
Netlist fold_transistors(const Netlist& n, int max_units = 1);

// One entry per signal net; source = lexicographically smallest
// (device id, role) among source/drain terminals, falling back to gates for
// gate-only nets. Role tie order: gate < source < drain.
std::map<std::string, NetTerminals> derive_terminals(const Netlist& n);

}  // namespace cellforge
