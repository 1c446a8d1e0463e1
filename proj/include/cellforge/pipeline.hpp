#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cellforge/accel.hpp"
#include "cellforge/layout.hpp"
#include "cellforge/solver.hpp"

namespace cellforge {

struct RunConfig {
  TechConfig tech;
  std::string netlist_path;
  bool all_offsets = true;          // enumerate every admissible M1 offset
  std::optional<Nm> fixed_offset;   // used when all_offsets is false
  char objective_set = 'e';         // ablation selector a..e
  bool clustering = false;
  int cluster_kmax = 4;
  bool itp = true;
  bool rlbt = true;
  GapPolicy policy;
  int workers = 1;
  std::uint64_t seed = 1;
  std::string out_dir;              // empty: no files written
  std::string backend;              // empty: reference; else external command
  bool emit_svg = true;
  bool wall_times = false;          // include wall clock in traces (breaks
                                    // byte-for-byte reproducibility)
};

// Objective subsets used by the ablation study: (a) width+wirelength only,
// (b) adds diffusion sharing, (c) adds break placement, (d) adds M2 usage,
// (e) everything.
ObjectiveWeights weights_for_set(const ObjectiveWeights& base, char set);

struct VariantResult {
  Nm offset = 0;
  SolveStatus status = SolveStatus::Unsat;
  long long objective = 0;
  long long lower_bound = 0;
  bool has_layout = false;
  Layout layout;
  Metrics metrics;
  AuditReport audit;
  SolveResult solve;
};

struct CellRun {
  std::string cell;
  int fet_count = 0;
  int net_count = 0;
  std::vector<VariantResult> variants;
};

// One cell across its offset variants: encode, accelerate, solve, extract,
// audit. Writes one bundle directory per variant when out_dir is set.
CellRun run_cell(const RunConfig& cfg);

std::vector<CellRun> run_batch(const RunConfig& base,
                               const std::vector<std::string>& netlists);

// True when every variant ended OPTIMAL or FEASIBLE_GAP within policy.
bool all_within_policy(const std::vector<CellRun>& runs);

// Table-style summary: one row per cell, CPP/WL/#M2/status per variant.
std::string summary_table(const std::vector<CellRun>& runs);

struct AblationRun {
  char set = 'e';
  SolveStatus status = SolveStatus::Unsat;
  int cw = 0;
  long long wl = 0;
  std::vector<TracePoint> trace;
};

// Runs the selected objective sets on one cell and asserts the final
// (CW, WL) agree across sets that reached OPTIMAL.
std::vector<AblationRun> run_ablation(const RunConfig& cfg, const std::string& sets);

std::string trace_csv(const std::vector<TracePoint>& trace, bool wall_times);

// Offset / resource / alignment survey for a list of M1 pitches.
std::string run_gr_study(const TechConfig& base, const std::vector<Nm>& m1_pitches,
                         int width_cpp);

// Encoded model for one netlist under the run options (clustering/ITP
// applied); used by emit-model and cluster-dump style flows.
EncodedCell encode_for_run(const RunConfig& cfg, const Netlist& netlist);

std::string cluster_report(const Netlist& netlist, int k_max, std::uint64_t seed);

}  // namespace cellforge
