#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cellforge/model.hpp"

namespace cellforge {

// Early-termination policy. Relative gap per |obj - lb| / |obj|.
struct GapPolicy {
  double relative_gap = 0.0;
  double time_limit_s = 1e18;
};

// stop iff the gap closed below policy.relative_gap or the time limit passed;
// objective_bound == 0 counts as already optimal.
bool gap_reached(const GapPolicy& policy, long long objective_bound, long long lower_bound);
double relative_gap(long long objective_bound, long long lower_bound);

enum class SolveStatus { Optimal, FeasibleGap, Unsat, Timeout };
const char* to_string(SolveStatus s);

struct TracePoint {
  long long step = 0;  // decision counter; deterministic plotting axis
  double wall_s = 0;
  long long objective = 0;
  long long lower_bound = 0;
};

// Subtree-local objective bound (routing-lower-bound hook). Fires once every
// trigger var is fixed; the returned value bounds the objective within that
// region of the search only.
struct SubtreeBound {
  std::vector<int> trigger_vars;
  std::function<long long(const std::vector<long long>& lo,
                          const std::vector<long long>& hi)>
      eval;
};

struct SolveRequest {
  const ConstraintModel* model = nullptr;
  int workers = 1;
  std::uint64_t seed = 1;
  GapPolicy policy;
  std::map<int, long long> hints;
  std::optional<SubtreeBound> subtree_bound;
};

struct SolveStats {
  long long decisions = 0;
  long long propagations = 0;
  long long conflicts = 0;
  double wall_s = 0;
};

struct SolveResult {
  SolveStatus status = SolveStatus::Unsat;
  std::vector<long long> assignment;  // empty when no incumbent exists
  long long objective_bound = 0;
  long long lower_bound = 0;
  std::vector<TracePoint> trace;
  SolveStats stats;
  // Lower bounds observed at the first incumbent: the node bound actually
  // used for pruning, and the hook's contribution alone.
  bool rlbt_fired = false;
  long long first_incumbent_node_lb = 0;
  long long first_incumbent_rlbt_lb = 0;
  std::string error;  // malformed model: offending constraint id

  bool has_assignment() const { return !assignment.empty(); }
};

// Reference exact backend: DFS branch-and-bound with unit/bounds/cardinality
// propagation and objective pruning. Deterministic for workers == 1 and a
// fixed seed.
SolveResult solve(const SolveRequest& req);

// External backend bridge: model IR on the command's stdin, line protocol
// (status/objective/lower_bound/assign) on its stdout.
SolveResult solve_external(const ConstraintModel& m, const std::string& command);

// Serving side of the same protocol, backed by the reference solver.
void serve_ir(std::istream& in, std::ostream& out, const GapPolicy& policy,
              int workers, std::uint64_t seed);

void write_result(std::ostream& out, const ConstraintModel& m, const SolveResult& r);
SolveResult read_result(std::istream& in, const ConstraintModel& m);

}  // namespace cellforge
