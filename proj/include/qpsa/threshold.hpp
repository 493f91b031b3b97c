#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "qpsa/cut.hpp"
#include "qpsa/estimators.hpp"

namespace qpsa {

// Symmetric weighted graph with zero diagonal.
class WeightedGraph {
 public:
  WeightedGraph(int n, MatrixXd weights);
  static WeightedGraph from_edges(int n,
                                  const std::vector<std::array<double, 3>>& edges);
  static WeightedGraph from_json_file(const std::string& path);
  static WeightedGraph from_json_text(const std::string& text);

  int n() const { return n_; }
  const MatrixXd& weights() const { return w_; }
  // Effective degree d_u = sum_v |J_uv|.
  const VectorXd& degrees() const { return deg_; }
  // |J|_1 over all ordered pairs.
  double weight_l1() const { return l1_; }

 private:
  int n_;
  MatrixXd w_;
  VectorXd deg_;
  double l1_;
};

struct ThresholdProfile {
  VectorXd eigenvalues;           // of D^{-1/2} J D^{-1/2}, ascending
  std::vector<int> kept_vertices; // isolated vertices dropped
  double t_of(double delta) const;  // sum of lambda^2 over |lambda| >= delta
};

ThresholdProfile threshold_rank(const WeightedGraph& g, double delta);

// Degree-weighted cut decomposition per the low-threshold-rank regularity
// construction: spectral truncation of J_D at eps/2 followed by extraction of
// symmetric degree-cut pieces alpha * (d_S d_T^T + d_T d_S^T) until the
// residual inf->1 value is at most eps * |J|_1 (exact for n <= 14).
struct DegreeCutPiece {
  std::vector<int> s, t;  // t == s for the symmetric single form
  double coeff = 0.0;
};

struct DegreeCutDecomposition {
  int n = 0;
  std::vector<DegreeCutPiece> pieces;
  double residual_inf_one = 0.0;
  bool residual_exact = false;
  bool target_met = true;
  double target = 0.0;
  MatrixXd residual;  // J - sum(pieces)
};

DegreeCutDecomposition threshold_cut_decompose(const WeightedGraph& g,
                                               double eps, std::uint64_t seed);

struct QmcReport {
  double estimate = 0.0;       // relaxation value (maximization)
  ProductState witness;
  double witness_value = 0.0;  // Tr[H rho] of the expanded witness
  double budget = 0.0;
  double threshold_rank_t = 0.0;
  double pitch = 0.0;          // Delta = c_delta * eps^3 / t^{3/2} * |J|_1
  std::int64_t feasible_guesses = 0;
  bool used_direct_fallback = false;
};

inline constexpr double kQmcPitchConstant = 1.0;  // c_delta

// Quantum Max-Cut estimator on low-threshold-rank graphs: one shared cut
// structure for the X/Y/Z colors with degree-weighted compressed constraints;
// maximization runs with the energy sign flipped internally. Requires
// non-negative edge weights.
QmcReport qmc_estimate(const WeightedGraph& g, double eps, std::uint64_t seed,
                       const EstimateOptions& opts = {});

}  // namespace qpsa
