#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qpsa/pauli_decomposition.hpp"

namespace qpsa {

// Exact enumeration caps for the cut-norm style searches.
inline constexpr int kCutNormExactCap = 20;     // matrix cut norm, 2^n states
inline constexpr int kInfOneExactCap = 20;      // matrix inf->1 norm
inline constexpr int kTensorExactCap = 10;      // tensor cut finder
inline constexpr int kTensorInfOneExactCap = 14;

struct CutResult {
  double value = 0.0;
  std::vector<int> s;
  std::vector<int> t;
};

// ||M||_C = max(A+, (-A)+) with the maximizing subsets; exhaustive over 2^n
// row subsets with column sums conditioned on the row set. n <= 20.
CutResult cut_norm_exact(const MatrixXd& m);

// Certified lower bound on ||M||_C from alternating maximization over
// indicator vectors; restart 0 starts from the full sets, the rest are
// random. Deterministic given seed.
CutResult cut_norm_heuristic(const MatrixXd& m, int restarts,
                             std::uint64_t seed);

// ||M||_{inf->1} = max_{x,y in {+-1}} x^T M y, exact for n <= 20.
double inf_one_norm_exact(const MatrixXd& m);
// Upper bound n * sigma_max(M), for matrices beyond the exact cap.
double inf_one_norm_upper(const MatrixXd& m);

// One cut piece: coeff on S_1 x ... x S_k (k = 2 for matrices).
struct CutPiece {
  std::vector<int> colors;             // owning color tuple (empty if plain)
  std::vector<std::vector<int>> sides; // k sorted vertex subsets
  double coeff = 0.0;
};

struct ResidualStats {
  double cut_value = 0.0;   // detected cut value of the residual
  bool cut_exact = false;   // exhaustive (vs heuristic lower bound)
  double frobenius = 0.0;
  double max_abs_diag = 0.0;
  double inf_one_offdiag = 0.0; // certified bound, exact when flagged
  bool inf_one_exact = false;
};

struct CutDecomposition {
  int n = 0;
  int k = 2;
  std::vector<CutPiece> pieces;
  ResidualStats residual;
  bool target_met = true;
  double target = 0.0;           // eps * n * ||M||_F (or tensor analog)
  double input_frobenius = 0.0;
  // ||W||_F after each extraction step (projection property check).
  std::vector<double> frobenius_log;

  double coeff_sq_sum() const;
  // Materialize the residual W = M - sum(pieces) for a matrix decomposition.
  MatrixXd residual_matrix(const MatrixXd& m) const;
};

// Width cap constant: width <= ceil(c_w / eps^2) for matrices and
// ceil(c_w / eps^{2k-2}) for tensors.
inline constexpr double kWidthCapConstant = 8.0;

// Frieze-Kannan style decomposition: repeatedly subtract the mean over the
// best detected cut of the residual until its cut value is at most
// eps * n * ||M||_F or the width cap is reached (flagged "target-unmet").
CutDecomposition fk_decompose(const MatrixXd& m, double eps,
                              std::uint64_t seed);

// k-dimensional analog for ColorTensor data, k in {2, 3}; residual target
// eps * N^{1/2} * ||M||_F with N = n^k.
CutDecomposition tensor_fk_decompose(const ColorTensor& m, double eps,
                                     std::uint64_t seed);

// Exhaustive tensor inf->1 value max_{x_j in {+-1}} |sum W prod x| (n <= 14);
// diag_free skips entries with repeated indices.
double tensor_inf_one_exact(const ColorTensor& m, bool diag_free);

// Best single cut of a tensor: exact for n <= kTensorExactCap, alternating
// heuristic otherwise.
CutResult tensor_cut_find(const ColorTensor& m, int restarts,
                          std::uint64_t seed, std::vector<std::vector<int>>* sides);

}  // namespace qpsa
