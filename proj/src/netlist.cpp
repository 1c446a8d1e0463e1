#include "cellforge/netlist.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <tuple>

namespace cellforge {

const char* to_string(MosKind k) { return k == MosKind::PMOS ? "pmos" : "nmos"; }

const char* to_string(PinDir d) {
  switch (d) {
    case PinDir::In: return "in";
    case PinDir::Out: return "out";
    default: return "inout";
  }
}

const char* to_string(TermRole r) {
  switch (r) {
    case TermRole::Gate: return "g";
    case TermRole::Source: return "s";
    default: return "d";
  }
}

const std::string& Transistor::net_of(TermRole r) const {
  switch (r) {
    case TermRole::Gate: return gate_net;
    case TermRole::Source: return source_net;
    default: return drain_net;
  }
}

std::vector<std::string> Netlist::nets() const {
  std::set<std::string> s;
  for (const auto& t : transistors) {
    for (TermRole r : {TermRole::Gate, TermRole::Source, TermRole::Drain}) {
      if (!is_power(t.net_of(r))) s.insert(t.net_of(r));
    }
  }
  return {s.begin(), s.end()};
}

const Pin* Netlist::find_pin(const std::string& net) const {
  for (const auto& p : pins) {
    if (p.net == net) return &p;
  }
  return nullptr;
}

const Transistor* Netlist::find_transistor(const std::string& id) const {
  for (const auto& t : transistors) {
    if (t.id == id) return &t;
  }
  return nullptr;
}

long long Netlist::w_p_units() const {
  long long w = 0;
  for (const auto& t : transistors) {
    if (t.kind == MosKind::PMOS) w += t.width_units;
  }
  return w;
}

long long Netlist::w_n_units() const {
  long long w = 0;
  for (const auto& t : transistors) {
    if (t.kind == MosKind::NMOS) w += t.width_units;
  }
  return w;
}

void Netlist::validate() const {
  std::set<std::string> ids;
  for (const auto& t : transistors) {
    if (t.width_units < 1) throw NetlistError(0, "zero-width device '" + t.id + "'");
    if (!ids.insert(t.id).second) throw NetlistError(0, "duplicate device id '" + t.id + "'");
  }
  auto signal = nets();
  std::set<std::string> signal_set(signal.begin(), signal.end());
  for (const auto& p : pins) {
    if (is_power(p.net)) throw NetlistError(0, "pin '" + p.net + "' is a power net");
    if (!signal_set.count(p.net)) {
      throw NetlistError(0, "pin net '" + p.net + "' has no device terminal");
    }
  }
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::string upper(std::string s) {
  for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return s;
}

std::vector<std::string> tokens(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string t;
  while (ss >> t) out.push_back(t);
  return out;
}

bool default_power_name(const std::string& net) {
  std::string u = upper(net);
  return u == "VDD" || u == "VSS" || u == "VCC" || u == "GND";
}

int parse_width(const std::string& tok, int line) {
  // Accepts "w=3"; bare integers in the structured format use stoi directly.
  auto eq = tok.find('=');
  std::string v = eq == std::string::npos ? tok : tok.substr(eq + 1);
  try {
    size_t pos = 0;
    int w = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing");
    return w;
  } catch (const std::exception&) {
    throw NetlistError(line, "bad width '" + tok + "'");
  }
}

Netlist parse_spice(std::istream& in) {
  Netlist n;
  std::vector<std::string> ports;
  std::map<std::string, PinDir> pin_dirs;
  bool in_subckt = false;
  bool done = false;

  std::string raw;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    // SPICE comments: '*' in column 1 except *.PININFO, '$' anywhere.
    auto dollar = line.find('$');
    if (dollar != std::string::npos) line.erase(dollar);
    auto toks = tokens(line);
    if (toks.empty()) continue;
    std::string head = upper(toks[0]);

    if (head == "*.PININFO") {
      for (size_t i = 1; i < toks.size(); ++i) {
        auto colon = toks[i].find(':');
        if (colon == std::string::npos) {
          throw NetlistError(lineno, "pininfo entry needs NAME:DIR");
        }
        std::string net = toks[i].substr(0, colon);
        std::string dir = upper(toks[i].substr(colon + 1));
        if (dir == "I") pin_dirs[net] = PinDir::In;
        else if (dir == "O") pin_dirs[net] = PinDir::Out;
        else if (dir == "B") pin_dirs[net] = PinDir::InOut;
        else throw NetlistError(lineno, "pin direction must be I, O or B");
      }
      continue;
    }
    if (head[0] == '*') continue;
    if (done) throw NetlistError(lineno, "content after .ENDS");

    if (head == ".SUBCKT") {
      if (in_subckt) throw NetlistError(lineno, "nested .SUBCKT not supported");
      if (toks.size() < 2) throw NetlistError(lineno, ".SUBCKT needs a name");
      in_subckt = true;
      n.name = toks[1];
      ports.assign(toks.begin() + 2, toks.end());
      continue;
    }
    if (head == ".ENDS") {
      if (!in_subckt) throw NetlistError(lineno, ".ENDS without .SUBCKT");
      done = true;
      continue;
    }
    if (head[0] == '.') throw NetlistError(lineno, "unsupported card '" + toks[0] + "'");

    if (head[0] == 'M' || head[0] == 'X') {
      // Mname drain gate source bulk type [w=n]
      if (toks.size() < 6) {
        throw NetlistError(lineno, "M-card needs: name drain gate source bulk type");
      }
      Transistor t;
      t.id = toks[0];
      t.drain_net = toks[1];
      t.gate_net = toks[2];
      t.source_net = toks[3];
      // toks[4] is the bulk terminal: parsed and ignored.
      std::string type = upper(toks[5]);
      if (type.find("PMOS") != std::string::npos || type.find("PFET") != std::string::npos) {
        t.kind = MosKind::PMOS;
      } else if (type.find("NMOS") != std::string::npos || type.find("NFET") != std::string::npos) {
        t.kind = MosKind::NMOS;
      } else {
        throw NetlistError(lineno, "unknown device type '" + toks[5] + "'");
      }
      for (size_t i = 6; i < toks.size(); ++i) {
        if (upper(toks[i]).rfind("W=", 0) == 0) t.width_units = parse_width(toks[i], lineno);
      }
      if (t.width_units < 1) throw NetlistError(lineno, "zero-width device '" + t.id + "'");
      n.transistors.push_back(t);
      continue;
    }
    throw NetlistError(lineno, "unrecognized card '" + toks[0] + "'");
  }
  if (!in_subckt) throw NetlistError(0, "no .SUBCKT found");
  if (!done) throw NetlistError(0, "missing .ENDS");

  for (const auto& p : ports) {
    if (default_power_name(p)) n.power_nets.insert(p);
  }
  std::set<std::string> seen;
  for (const auto& p : ports) {
    if (n.is_power(p) || !seen.insert(p).second) continue;
    Pin pin;
    pin.net = p;
    auto it = pin_dirs.find(p);
    if (it != pin_dirs.end()) pin.dir = it->second;
    n.pins.push_back(pin);
  }
  for (const auto& [net, dir] : pin_dirs) {
    if (!n.find_pin(net) && !n.is_power(net)) {
      throw NetlistError(0, "pininfo names '" + net + "' which is not a port");
    }
  }
  n.validate();
  return n;
}

Netlist parse_structured(std::istream& in) {
  Netlist n;
  std::string raw;
  int lineno = 0;
  bool have_cell = false;
  bool done = false;
  while (std::getline(in, raw)) {
    ++lineno;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    auto toks = tokens(raw);
    if (toks.empty()) continue;
    if (done) throw NetlistError(lineno, "content after end");
    const std::string& head = toks[0];
    if (head == "cell") {
      if (toks.size() != 2) throw NetlistError(lineno, "cell needs a name");
      n.name = toks[1];
      have_cell = true;
    } else if (head == "pin") {
      if (toks.size() != 3) throw NetlistError(lineno, "pin needs: net dir");
      Pin p;
      p.net = toks[1];
      if (toks[2] == "in") p.dir = PinDir::In;
      else if (toks[2] == "out") p.dir = PinDir::Out;
      else if (toks[2] == "inout") p.dir = PinDir::InOut;
      else throw NetlistError(lineno, "pin dir must be in/out/inout");
      n.pins.push_back(p);
    } else if (head == "power") {
      for (size_t i = 1; i < toks.size(); ++i) n.power_nets.insert(toks[i]);
    } else if (head == "fet") {
      // fet <id> <pmos|nmos> g=<net> s=<net> d=<net> w=<units>
      if (toks.size() < 6) throw NetlistError(lineno, "fet needs: id kind g= s= d= [w=]");
      Transistor t;
      t.id = toks[1];
      if (toks[2] == "pmos") t.kind = MosKind::PMOS;
      else if (toks[2] == "nmos") t.kind = MosKind::NMOS;
      else throw NetlistError(lineno, "fet kind must be pmos or nmos");
      for (size_t i = 3; i < toks.size(); ++i) {
        const std::string& a = toks[i];
        if (a.rfind("g=", 0) == 0) t.gate_net = a.substr(2);
        else if (a.rfind("s=", 0) == 0) t.source_net = a.substr(2);
        else if (a.rfind("d=", 0) == 0) t.drain_net = a.substr(2);
        else if (a.rfind("w=", 0) == 0) t.width_units = parse_width(a, lineno);
        else throw NetlistError(lineno, "unknown fet attribute '" + a + "'");
      }
      if (t.gate_net.empty() || t.source_net.empty() || t.drain_net.empty()) {
        throw NetlistError(lineno, "fet '" + t.id + "' missing g/s/d net");
      }
      if (t.width_units < 1) throw NetlistError(lineno, "zero-width device '" + t.id + "'");
      n.transistors.push_back(t);
    } else if (head == "end") {
      done = true;
    } else {
      throw NetlistError(lineno, "unknown directive '" + head + "'");
    }
  }
  if (!have_cell) throw NetlistError(0, "no cell header");
  if (!done) throw NetlistError(0, "missing end");
  n.validate();
  return n;
}

}  // namespace

Netlist parse_netlist(std::istream& in) {
  // Peek at the first meaningful token to pick the dialect.
  std::stringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  std::stringstream probe(text);
  std::string line;
  while (std::getline(probe, line)) {
    auto toks = tokens(line);
    if (toks.empty() || toks[0][0] == '*' || toks[0][0] == '#') continue;
    std::stringstream again(text);
    if (toks[0] == "cell") return parse_structured(again);
    return parse_spice(again);
  }
  throw NetlistError(0, "empty netlist");
}

Netlist load_netlist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NetlistError(0, "cannot open netlist: " + path);
  try {
    return parse_netlist(in);
  } catch (const NetlistError& e) {
    throw NetlistError(e.line, path + ": " + e.what());
  }
}

std::string dump_netlist(const Netlist& n) {
  std::ostringstream os;
  os << "cell " << n.name << "\n";
  for (const auto& p : n.pins) os << "pin " << p.net << " " << to_string(p.dir) << "\n";
  if (!n.power_nets.empty()) {
    os << "power";
    for (const auto& p : n.power_nets) os << " " << p;
    os << "\n";
  }
  for (const auto& t : n.transistors) {
    os << "fet " << t.id << " " << to_string(t.kind) << " g=" << t.gate_net
       << " s=" << t.source_net << " d=" << t.drain_net << " w=" << t.width_units
       << "\n";
  }
  os << "end\n";
  return os.str();
}

bool operator==(const Netlist& a, const Netlist& b) {
  auto key = [](const Transistor& t) {
    return std::tuple(t.id, t.kind, t.gate_net, t.source_net, t.drain_net, t.width_units);
  };
  if (a.name != b.name || a.power_nets != b.power_nets) return false;
  if (a.transistors.size() != b.transistors.size() || a.pins.size() != b.pins.size()) {
    return false;
  }
  for (size_t i = 0; i < a.transistors.size(); ++i) {
    if (key(a.transistors[i]) != key(b.transistors[i])) return false;
  }
  for (size_t i = 0; i < a.pins.size(); ++i) {
    if (a.pins[i].net != b.pins[i].net || a.pins[i].dir != b.pins[i].dir) return false;
  }
  return true;
}

Netlist fold_transistors(const Netlist& n, int max_units) {
  Netlist out = n;
  out.transistors.clear();
  for (const auto& t : n.transistors) {
    if (t.width_units <= max_units) {
      out.transistors.push_back(t);
      continue;
    }
    for (int f = 0; f < t.width_units; f += max_units) {
      Transistor finger = t;
      finger.id = t.id + ".f" + std::to_string(f / max_units);
      finger.width_units = std::min(max_units, t.width_units - f);
      out.transistors.push_back(finger);
    }
  }
  return out;
}

std::map<std::string, NetTerminals> derive_terminals(const Netlist& n) {
  std::map<std::string, std::vector<TermRef>> by_net;
  for (const auto& t : n.transistors) {
    for (TermRole r : {TermRole::Gate, TermRole::Source, TermRole::Drain}) {
      if (!n.is_power(t.net_of(r))) by_net[t.net_of(r)].push_back({t.id, r});
    }
  }
  auto role_rank = [](TermRole r) {
    return r == TermRole::Gate ? 0 : (r == TermRole::Source ? 1 : 2);
  };
  auto cmp = [&](const TermRef& a, const TermRef& b) {
    if (a.transistor_id != b.transistor_id) return a.transistor_id < b.transistor_id;
    return role_rank(a.role) < role_rank(b.role);
  };

  std::map<std::string, NetTerminals> out;
  for (auto& [net, terms] : by_net) {
    if (terms.empty()) throw NetlistError(0, "net '" + net + "' has no terminals");
    std::sort(terms.begin(), terms.end(), cmp);
    NetTerminals nt;
    nt.net = net;
    // Prefer a driving (source/drain) terminal as s_n; gate-only nets fall
    // back to the first gate.
    size_t src = terms.size();
    for (size_t i = 0; i < terms.size(); ++i) {
      if (terms[i].role != TermRole::Gate) {
        src = i;
        break;
      }
    }
    if (src == terms.size()) src = 0;
    nt.source = terms[src];
    for (size_t i = 0; i < terms.size(); ++i) {
      if (i != src) nt.sinks.push_back(terms[i]);
    }
    out[net] = nt;
  }
  return out;
}

}  // namespace cellforge
