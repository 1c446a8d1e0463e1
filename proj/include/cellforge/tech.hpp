#pragma once

#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "cellforge/geom.hpp"

namespace cellforge {

// One (parallel-run-length, required-spacing) tier of a PRL table, sorted by
// run length ascending.
struct PrlEntry {
  Nm run_length = 0;
  Nm spacing = 0;
};

struct LayerRules {
  Nm mar_length = 0;             // minimum metal-segment length
  Nm eol_spacing = 0;            // end-of-line spacing to adjacent-track ends
  Nm via_separation_radius = 0;  // Euclidean radius between vias landing here
  Nm shr_distance = 0;           // step-height: aligned ends on adjacent tracks
  std::vector<PrlEntry> prl;     // parallel-run-length tiers
};

struct DesignRuleSet {
  std::map<int, LayerRules> by_layer;

  const LayerRules& layer(int i) const;
  bool all_zero() const;
};

// Weights of the objective
//   minimize  l0*CW + l1*WL - l2*SGD - l3*DBX + l4*M2
// CW must dominate, hence the large default on l0.
struct ObjectiveWeights {
  long long cw = 1000;
  long long wl = 1;
  long long sgd = 1;
  long long dbx = 1;
  long long m2 = 1;
};

class TechError : public std::runtime_error {
 public:
  explicit TechError(const std::string& what) : std::runtime_error(what) {}
};

// Immutable after load; derived quantities are recomputed, never cached.
struct TechConfig {
  std::map<int, Nm> pitch;   // mp^i, layer index -> pitch in nm
  std::map<int, Nm> offset;  // delta^i, offset of leftmost track from x=0
  int row_count = 4;         // t, horizontal routing rows (2F4T -> 4)
  int max_diffusion_breaks = 1;  // c_db
  DesignRuleSet rules;
  ObjectiveWeights weights;
  int min_pin_opening = 0;      // Theta
  int min_cut_width_cpp = 2;    // gate-cut minimum width in CPP
  bool m0_pins_enabled = true;  // PS/MPO pin constraints active
  bool pin_separation_enabled = true;
  Nm via_wl_weight = -1;  // wirelength charged per M0-M1/M1-M2 via; -1 -> mp^2

  Nm mp(int i) const;
  Nm delta(int i) const;
  Nm via_weight() const { return via_wl_weight >= 0 ? via_wl_weight : mp(2); }

  // Throws TechError when an invariant is broken (pitch<=0, offset out of
  // range, mp2 != mp4, inadmissible delta^3, cut width not in {1,2}).
  void validate() const;
};

// All admissible M1 offsets for a gear ratio: k*gcd(mp1, mp3) below mp3,
// ascending, starting at 0.
std::vector<Nm> enumerate_offsets(Nm mp1, Nm mp3);

// Eq-style total width: max(w_p, w_n) + c_db * mp1. Inputs in nm.
Nm total_cell_width(Nm w_p, Nm w_n, int c_db, Nm mp1);

// Number of usable (non-dummy) M1 columns inside a cell of the given CPP
// width. A column is dummy iff it sits exactly on a cell boundary.
int count_m1_resources(int width_cpp, const TechConfig& cfg);

// True iff every local poly and M1 column lands on the global grid (same
// pitches, offset 0 at the chip origin) when the cell's left edge is at
// `global_origin_offset`.
bool check_placement_alignment(int width_cpp, const TechConfig& cfg,
                               Nm global_origin_offset);

// Structured-text config: `key = value` lines with dotted sections,
// '#' comments. Unknown keys are an error.
TechConfig parse_tech_config(std::istream& in);
TechConfig load_tech_config(const std::string& path);
std::string dump_tech_config(const TechConfig& cfg);

// Bundled 2F4T-like default. mp1=45; mp3 selects the gear ratio; the M0/M2
// pitch is an assumption (30 nm), not published ground truth.
TechConfig default_tech(Nm mp3 = 45, Nm delta3 = 0);

}  // namespace cellforge
