#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "cellforge/encode.hpp"

namespace cellforge {

struct PlacedDevice {
  std::string id;
  MosKind kind = MosKind::NMOS;
  int col = 0;  // poly column ordinal
  bool flip = false;
  std::string gate_net, source_net, drain_net;

  const std::string& left_net() const { return flip ? drain_net : source_net; }
  const std::string& right_net() const { return flip ? source_net : drain_net; }
};

// Axis-aligned metal piece on one track. Horizontal layers: track = row y,
// lo/hi = x extent. Vertical layers: track = column x, lo/hi = y extent.
struct Segment {
  int layer = 2;
  Nm track = 0;
  Nm lo = 0;
  Nm hi = 0;
  std::string net;

  Nm length() const { return hi - lo; }
};

// Via between lower_layer and lower_layer+1. lower_layer == 1 is a terminal
// contact pad (V0); it carries no wirelength weight.
struct ViaShape {
  int lower_layer = 2;
  Nm row = 0;
  Nm col = 0;
  std::string net;
};

struct CutShape {
  enum Kind { Gate, Lisd };
  Kind kind = Gate;
  int col = 0;  // poly column ordinal (gate) or slot access ordinal (lisd)
};

struct PinShape {
  std::string net;
  Nm row = 0;
  Nm rep_col = 0;                  // representative access x
  std::vector<int> access_tracks;  // usable M1 track ordinals
};

struct Layout {
  std::string cell;
  int width_cpp = 0;
  Nm cpp = 45;
  std::vector<PlacedDevice> devices;
  std::vector<int> break_cols;
  std::vector<CutShape> cuts;
  std::vector<Segment> segments;
  std::vector<ViaShape> vias;
  std::vector<PinShape> pins;
};

struct Metrics {
  int cw_cpp = 0;
  long long wirelength_nm = 0;
  int m2_tracks = 0;
  int sgd = 0;
  int dbx = 0;
  std::map<std::string, int> pin_access;
};

long long recompose_objective(const Metrics& m, const ObjectiveWeights& wt);

// Geometry from a verified assignment. Throws on incomplete assignments.
Layout extract_layout(const EncodedCell& ec, const std::vector<long long>& assignment);

Metrics compute_metrics(const Layout& l, const TechConfig& cfg);

struct AuditIssue {
  std::string rule;  // "mar", "eol", "shr", "via-separation", "prl",
                     // "track-overlap", "boundary", "placement", "cut",
                     // "connectivity", "cycle", "pin-separation", "pin-opening"
  std::string detail;
};

struct AuditReport {
  std::vector<AuditIssue> issues;
  bool clean() const { return issues.empty(); }
  int count(const std::string& rule) const;
};

// Independent geometric re-check of the design rules, placement legality,
// per-net connectivity and the pin constraints. Never consults the
// constraint model.
AuditReport audit_layout(const Layout& l, const TechConfig& cfg);

std::string serialize_layout(const Layout& l);
Layout parse_layout(std::istream& in);
Layout load_layout(const std::string& path);

// Deterministic SVG rendering, layers colour-coded, pins and cuts annotated.
std::string render_svg(const Layout& l, const TechConfig& cfg);

}  // namespace cellforge
