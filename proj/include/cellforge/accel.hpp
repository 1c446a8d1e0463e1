#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "cellforge/encode.hpp"
#include "cellforge/netlist.hpp"
#include "cellforge/solver.hpp"

namespace cellforge {

// Transistor/net graph used for clustering. Power nets are removed, nets of
// degree <= 2 are contracted into direct transistor-transistor edges, and
// surviving net nodes weight their fan-out edges by the net degree.
struct CircuitGraph {
  std::vector<std::string> names;  // transistor ids, then retained net names
  int transistor_count = 0;
  struct WEdge {
    int a = -1;
    int b = -1;
    double length = 1.0;  // desired embedding distance
  };
  std::vector<WEdge> edges;
};

CircuitGraph build_circuit_graph(const Netlist& netlist);

struct ClusterSet {
  std::vector<std::vector<std::string>> clusters;  // transistor ids, each 2..k_max
  std::vector<std::string> noise;
  int k_min = 2;
  int k_max = 4;
  std::uint64_t seed = 1;

  bool empty() const { return clusters.empty(); }
};

// Spring-model 2-D embedding (stress majorization over weighted graph
// distances). Deterministic under a fixed seed: seeded circular start,
// stress delta < 1e-6 or 500 iterations.
std::vector<std::array<double, 2>> spring_embedding(const CircuitGraph& g,
                                                    std::uint64_t seed,
                                                    int max_iters = 500,
                                                    double tol = 1e-6,
                                                    bool* converged = nullptr);

// Density-based hierarchical clustering over Euclidean distances in the
// embedding; label -1 marks noise.
std::vector<int> density_cluster_labels(const std::vector<std::array<double, 2>>& pts,
                                        int min_cluster_size);

// Full pipeline: embed, cluster, split clusters above k_max at their weakest
// density link, drop fragments below k_min into the noise set. Falls back to
// an empty ClusterSet when the embedding does not converge.
ClusterSet embed_and_cluster(const CircuitGraph& g, int k_min, int k_max,
                             std::uint64_t seed);

ClusterSet cluster_netlist(const Netlist& netlist, int k_max, std::uint64_t seed);

// Contiguous-diffusion constraints: per cluster, bounding-box span equals the
// dominant type's total width; complementary devices stay inside the span.
void add_cluster_constraints(EncodedCell& ec, const ClusterSet& clusters);

// Groups of electrically identical devices (same kind, gate, source, drain).
std::vector<std::vector<std::string>> identical_groups(const Netlist& netlist);

// Canonical ordering chain x_1 <= x_2 <= ... over each identical group.
void add_itp_constraints(EncodedCell& ec);

// Terminal positions of one net under a fixed placement.
struct NetPoints {
  std::vector<Nm> xs;
  std::vector<Nm> ys;
  bool mergeable = false;  // some column stacks P and N terminals of this net
};

// Half-perimeter lower bound per net: the x-span always; the y-span only when
// no column-aligned P/N pair could short the net through the MOL strand.
long long hpwl_nm(const NetPoints& p);

// Sum of per-net HPWL under the placement fixed in [lo, hi]; requires every
// at/flip var to be fixed.
long long placement_hpwl_sum(const EncodedCell& ec, const std::vector<long long>& lo);

// Subtree objective bound for the solver: fires once placement is fixed,
// bounding the wirelength term by max(HPWL sum, already-fixed metal).
SubtreeBound make_rlbt_hook(const EncodedCell& ec);

enum class GapDecision { Continue, Stop };

// Early-termination rule on the relative gap; objective_bound == 0 is treated
// as a closed gap. Monotone: once Stop, tighter bounds still Stop.
GapDecision gap_termination(const GapPolicy& policy, long long objective_bound,
                            long long lower_bound, double elapsed_s = 0.0);

}  // namespace cellforge
