#include "cellforge/tech.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cellforge {

std::string format_nm(Nm v) { return std::to_string(v); }

const LayerRules& DesignRuleSet::layer(int i) const {
  static const LayerRules kEmpty;
  auto it = by_layer.find(i);
  return it == by_layer.end() ? kEmpty : it->second;
}

bool DesignRuleSet::all_zero() const {
  for (const auto& [i, r] : by_layer) {
    if (r.mar_length || r.eol_spacing || r.via_separation_radius ||
        r.shr_distance || !r.prl.empty()) {
      return false;
    }
  }
  return true;
}

Nm TechConfig::mp(int i) const {
  auto it = pitch.find(i);
  if (it == pitch.end()) throw TechError("no pitch for layer " + std::to_string(i));
  return it->second;
}

Nm TechConfig::delta(int i) const {
  auto it = offset.find(i);
  return it == offset.end() ? 0 : it->second;
}

void TechConfig::validate() const {
  for (int i = 1; i <= kLayerCount; ++i) {
    if (mp(i) <= 0) throw TechError("pitch of layer " + std::to_string(i) + " must be positive");
    Nm d = delta(i);
    if (d < 0 || d >= mp(i)) {
      throw TechError("offset of layer " + std::to_string(i) + " out of [0, pitch)");
    }
  }
  if (mp(2) != mp(4)) throw TechError("horizontal layers must share pitch (mp2 != mp4)");
  if (row_count < 2 || row_count % 2 != 0) {
    throw TechError("row_count must be even and >= 2");
  }
  if (max_diffusion_breaks < 0) throw TechError("max_diffusion_breaks must be >= 0");
  if (min_cut_width_cpp != 1 && min_cut_width_cpp != 2) {
    throw TechError("min_cut_width_cpp must be 1 or 2");
  }
  if (min_pin_opening < 0) throw TechError("min_pin_opening must be >= 0");
  auto admissible = enumerate_offsets(mp(1), mp(3));
  if (std::find(admissible.begin(), admissible.end(), delta(3)) == admissible.end()) {
    throw TechError("delta3=" + std::to_string(delta(3)) +
                    " is not an admissible offset for this gear ratio");
  }
  for (const auto& [i, r] : rules.by_layer) {
    if (r.mar_length < 0 || r.eol_spacing < 0 || r.via_separation_radius < 0 ||
        r.shr_distance < 0) {
      throw TechError("design-rule distances must be >= 0");
    }
    for (size_t k = 1; k < r.prl.size(); ++k) {
      if (r.prl[k].run_length < r.prl[k - 1].run_length) {
        throw TechError("prl table must be sorted by run length");
      }
    }
  }
}

std::vector<Nm> enumerate_offsets(Nm mp1, Nm mp3) {
  Nm g = std::gcd(mp1, mp3);
  std::vector<Nm> out;
  for (Nm d = 0; d < mp3; d += g) out.push_back(d);
  return out;
}

Nm total_cell_width(Nm w_p, Nm w_n, int c_db, Nm mp1) {
  return std::max(w_p, w_n) + static_cast<Nm>(c_db) * mp1;
}

int count_m1_resources(int width_cpp, const TechConfig& cfg) {
  Nm w = static_cast<Nm>(width_cpp) * cfg.mp(1);
  int n = 0;
  for (Nm c = cfg.delta(3); c <= w; c += cfg.mp(3)) {
    if (c > 0 && c < w) ++n;
  }
  return n;
}

bool check_placement_alignment(int width_cpp, const TechConfig& cfg,
                               Nm global_origin_offset) {
  (void)width_cpp;  // every column aligns iff the first one does
  Nm o = global_origin_offset;
  if (o < 0) return false;
  // Local poly columns sit at o + delta1 + k*mp1, the global poly grid at
  // multiples of mp1; likewise for M1 with delta3 and mp3.
  if ((o + cfg.delta(1)) % cfg.mp(1) != 0) return false;
  if ((o + cfg.delta(3)) % cfg.mp(3) != 0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Config file I/O

namespace {

struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

long long to_int(const KeyValue& kv) {
  try {
    size_t pos = 0;
    long long v = std::stoll(kv.value, &pos);
    if (pos != kv.value.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw TechError("line " + std::to_string(kv.line) + ": '" + kv.key +
                    "' expects an integer, got '" + kv.value + "'");
  }
}

bool to_bool(const KeyValue& kv) {
  if (kv.value == "true" || kv.value == "1") return true;
  if (kv.value == "false" || kv.value == "0") return false;
  throw TechError("line " + std::to_string(kv.line) + ": '" + kv.key +
                  "' expects true/false");
}

int layer_suffix(const std::string& name, const KeyValue& kv) {
  if (name == "poly") return kLayerPlace;
  if (name == "m0") return kLayerM0;
  if (name == "m1") return kLayerM1;
  if (name == "m2") return kLayerM2;
  throw TechError("line " + std::to_string(kv.line) + ": unknown layer '" + name + "'");
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace

TechConfig parse_tech_config(std::istream& in) {
  TechConfig cfg;
  cfg.pitch = {{1, 45}, {2, 30}, {3, 45}, {4, 30}};
  cfg.offset = {{1, 0}, {2, 0}, {3, 0}, {4, 0}};

  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw TechError("line " + std::to_string(lineno) + ": expected 'key = value'");
    }
    KeyValue kv{trim(line.substr(0, eq)), trim(line.substr(eq + 1)), lineno};

    std::vector<std::string> parts;
    std::stringstream ss(kv.key);
    std::string part;
    while (std::getline(ss, part, '.')) parts.push_back(part);

    if (parts.size() == 2 && parts[0] == "pitch") {
      cfg.pitch[layer_suffix(parts[1], kv)] = to_int(kv);
    } else if (parts.size() == 2 && parts[0] == "offset") {
      cfg.offset[layer_suffix(parts[1], kv)] = to_int(kv);
    } else if (kv.key == "rows") {
      cfg.row_count = static_cast<int>(to_int(kv));
    } else if (kv.key == "max_diffusion_breaks") {
      cfg.max_diffusion_breaks = static_cast<int>(to_int(kv));
    } else if (kv.key == "min_cut_width_cpp") {
      cfg.min_cut_width_cpp = static_cast<int>(to_int(kv));
    } else if (kv.key == "via_wl_weight") {
      cfg.via_wl_weight = to_int(kv);
    } else if (parts.size() == 2 && parts[0] == "pins") {
      if (parts[1] == "enabled") cfg.m0_pins_enabled = to_bool(kv);
      else if (parts[1] == "separation") cfg.pin_separation_enabled = to_bool(kv);
      else if (parts[1] == "theta") cfg.min_pin_opening = static_cast<int>(to_int(kv));
      else throw TechError("line " + std::to_string(lineno) + ": unknown key '" + kv.key + "'");
    } else if (parts.size() == 2 && parts[0] == "weights") {
      long long v = to_int(kv);
      if (parts[1] == "cw") cfg.weights.cw = v;
      else if (parts[1] == "wl") cfg.weights.wl = v;
      else if (parts[1] == "sgd") cfg.weights.sgd = v;
      else if (parts[1] == "dbx") cfg.weights.dbx = v;
      else if (parts[1] == "m2") cfg.weights.m2 = v;
      else throw TechError("line " + std::to_string(lineno) + ": unknown key '" + kv.key + "'");
    } else if (parts.size() == 3 && parts[0] == "rule") {
      LayerRules& r = cfg.rules.by_layer[layer_suffix(parts[1], kv)];
      if (parts[2] == "min_length") r.mar_length = to_int(kv);
      else if (parts[2] == "eol") r.eol_spacing = to_int(kv);
      else if (parts[2] == "via_separation") r.via_separation_radius = to_int(kv);
      else if (parts[2] == "shr") r.shr_distance = to_int(kv);
      else if (parts[2] == "prl") {
        // "runlen:spacing,runlen:spacing,..."
        std::stringstream ps(kv.value);
        std::string tier;
        while (std::getline(ps, tier, ',')) {
          auto colon = tier.find(':');
          if (colon == std::string::npos) {
            throw TechError("line " + std::to_string(lineno) + ": prl tier needs 'run:spacing'");
          }
          PrlEntry e;
          e.run_length = std::stoll(trim(tier.substr(0, colon)));
          e.spacing = std::stoll(trim(tier.substr(colon + 1)));
          r.prl.push_back(e);
        }
      } else {
        throw TechError("line " + std::to_string(lineno) + ": unknown key '" + kv.key + "'");
      }
    } else {
      throw TechError("line " + std::to_string(lineno) + ": unknown key '" + kv.key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

TechConfig load_tech_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw TechError("cannot open tech config: " + path);
  try {
    return parse_tech_config(in);
  } catch (const TechError& e) {
    throw TechError(path + ": " + e.what());
  }
}

std::string dump_tech_config(const TechConfig& cfg) {
  std::ostringstream os;
  auto layer_name = [](int i) {
    switch (i) {
      case kLayerPlace: return "poly";
      case kLayerM0: return "m0";
      case kLayerM1: return "m1";
      default: return "m2";
    }
  };
  for (int i = 1; i <= kLayerCount; ++i) {
    os << "pitch." << layer_name(i) << " = " << cfg.mp(i) << "\n";
  }
  for (int i = 1; i <= kLayerCount; ++i) {
    if (cfg.delta(i)) os << "offset." << layer_name(i) << " = " << cfg.delta(i) << "\n";
  }
  os << "rows = " << cfg.row_count << "\n";
  os << "max_diffusion_breaks = " << cfg.max_diffusion_breaks << "\n";
  os << "min_cut_width_cpp = " << cfg.min_cut_width_cpp << "\n";
  if (cfg.via_wl_weight >= 0) os << "via_wl_weight = " << cfg.via_wl_weight << "\n";
  os << "pins.enabled = " << (cfg.m0_pins_enabled ? "true" : "false") << "\n";
  os << "pins.separation = " << (cfg.pin_separation_enabled ? "true" : "false") << "\n";
  os << "pins.theta = " << cfg.min_pin_opening << "\n";
  os << "weights.cw = " << cfg.weights.cw << "\n";
  os << "weights.wl = " << cfg.weights.wl << "\n";
  os << "weights.sgd = " << cfg.weights.sgd << "\n";
  os << "weights.dbx = " << cfg.weights.dbx << "\n";
  os << "weights.m2 = " << cfg.weights.m2 << "\n";
  for (const auto& [i, r] : cfg.rules.by_layer) {
    const char* n = layer_name(i);
    if (r.mar_length) os << "rule." << n << ".min_length = " << r.mar_length << "\n";
    if (r.eol_spacing) os << "rule." << n << ".eol = " << r.eol_spacing << "\n";
    if (r.via_separation_radius)
      os << "rule." << n << ".via_separation = " << r.via_separation_radius << "\n";
    if (r.shr_distance) os << "rule." << n << ".shr = " << r.shr_distance << "\n";
    if (!r.prl.empty()) {
      os << "rule." << n << ".prl = ";
      for (size_t k = 0; k < r.prl.size(); ++k) {
        if (k) os << ",";
        os << r.prl[k].run_length << ":" << r.prl[k].spacing;
      }
      os << "\n";
    }
  }
  return os.str();
}

TechConfig default_tech(Nm mp3, Nm delta3) {
  TechConfig cfg;
  cfg.pitch = {{1, 45}, {2, 30}, {3, mp3}, {4, 30}};
  cfg.offset = {{1, 0}, {2, 0}, {3, delta3}, {4, 0}};
  cfg.row_count = 4;
  cfg.max_diffusion_breaks = 1;
  cfg.min_cut_width_cpp = 1;
  LayerRules metal;
  metal.mar_length = 40;
  metal.eol_spacing = 40;
  metal.via_separation_radius = 40;
  cfg.rules.by_layer[kLayerM0] = metal;
  cfg.rules.by_layer[kLayerM1] = metal;
  cfg.rules.by_layer[kLayerM2] = metal;
  cfg.validate();
  return cfg;
}

}  // namespace cellforge
