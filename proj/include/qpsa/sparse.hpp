#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpsa/dense.hpp"
#include "qpsa/hamiltonian.hpp"

namespace qpsa {

// Undirected simple graph as adjacency lists (used by the sparse pipeline).
struct Graph {
  int n = 0;
  std::vector<std::vector<int>> adj;

  static Graph from_hamiltonian(const LocalHamiltonian& h);
  static Graph from_edges(int n, const std::vector<std::pair<int, int>>& edges);
  std::vector<std::pair<int, int>> edge_list() const;
};

struct TreeDecomposition {
  std::vector<std::vector<int>> bags;      // sorted vertex subsets
  std::vector<std::pair<int, int>> edges;  // tree edges over bag ids
  int width() const;
};

struct TdViolation {
  std::string property;  // "vertex-cover", "edge-cover", "running-intersection"
  int witness_a = -1, witness_b = -1;
};

// Min-fill elimination ordering heuristic; always returns a valid
// decomposition (no width optimality claim).
TreeDecomposition tree_decompose_heuristic(const Graph& g);

// Checks all three tree-decomposition properties exactly; empty result means
// valid.
std::vector<TdViolation> validate_tree_decomposition(const Graph& g,
                                                     const TreeDecomposition& td);

struct BakerLayering {
  std::vector<int> layer_of;                    // BFS layer per vertex
  int offset = 0;                               // chosen interlacing offset
  std::vector<std::pair<int, int>> removed_edges;
  std::vector<std::vector<int>> components;     // after boundary-edge removal
  double removed_weight = 0.0;
  double total_weight = 0.0;
};

// BFS layering from a seed-chosen root (per component); removes the edges
// crossing layer boundaries j -> j+1 with j = offset (mod kparam+1), at the
// offset of minimum removed weight. Guarantees removed <= total/(kparam+1).
BakerLayering baker_layering(const Graph& g, int kparam, std::uint64_t seed,
                             const std::vector<double>& edge_weights = {});

struct ClusterPartition {
  std::vector<std::vector<int>> clusters;       // cover all vertices
  std::vector<int> removed_vertices;            // realized as edge removals
  std::vector<std::pair<int, int>> removed_edges;
  int cluster_of(int v) const;
  std::vector<int> cluster_index;               // filled by the pipeline
};

// Recursively removes balanced bag separators until every component has at
// most r vertices; r must be >= width+1. Removed vertices get an add-back
// pass and end up as singleton clusters. Verifies the removed-vertex bound
// c_s * (width+1) * n / r.
inline constexpr double kSeparatorConstant = 4.0;  // c_s
ClusterPartition recursive_separators(const Graph& g, const TreeDecomposition& td,
                                      int r);

inline constexpr int kClusterQubitCap = 14;

struct ClusterSolveReport {
  double value = 0.0;                 // sum over clusters (energy or free energy)
  double weyl_budget = 0.0;           // sum of removed term norms
  double cross_term_energy = 0.0;     // removed terms evaluated on marginals
  double state_value = 0.0;           // energy / free energy of the clustered state
  std::vector<double> cluster_values;
};

// Exact ground state (or Gibbs state) per cluster of the pruned Hamiltonian
// H'. state_value evaluates the full H on the clustered product state,
// including removed terms through the per-cluster marginals.
ClusterSolveReport cluster_gs(const LocalHamiltonian& h,
                              const ClusterPartition& p);
ClusterSolveReport cluster_fe(const LocalHamiltonian& h,
                              const ClusterPartition& p, double beta);

struct SparsePipelineReport {
  BakerLayering layering;
  TreeDecomposition td;
  int td_width = 0;
  ClusterPartition partition;
  ClusterSolveReport solve;
};

// Full pipeline: Baker layering -> min-fill tree decomposition per component
// -> recursive separators -> cluster-exact solve. kparam < 0 picks
// ceil(4/eps)-style default from r.
SparsePipelineReport sparse_gs(const LocalHamiltonian& h, int kparam, int r,
                               std::uint64_t seed);
SparsePipelineReport sparse_fe(const LocalHamiltonian& h, int kparam, int r,
                               double beta, std::uint64_t seed);

}  // namespace qpsa
