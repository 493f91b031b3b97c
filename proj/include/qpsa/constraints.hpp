#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "qpsa/ham_cut.hpp"
#include "qpsa/product_state.hpp"

namespace qpsa {

// One two-sided affine row: lo <= sum_j weight_j * x[var_index_j] <= hi,
// where x is the flattened per-atom Bloch vector (atom-major).
struct AffineRow {
  std::vector<int> var_index;
  std::vector<double> weight;
  double lo = 0.0;
  double hi = 0.0;

  double value(const VectorXd& x) const;
};

// Subset-magnetization constraint set over per-atom Bloch vectors: affine
// rows plus one PSD constraint per atom. Atom weights are |A_a| (or
// estimates) and scale the rows that reference atoms.
class ConstraintSet {
 public:
  ConstraintSet(int atom_count, int d);

  int atom_count() const { return atoms_; }
  int d() const { return d_; }
  int bloch_dim() const { return bloch_dim_; }
  int var_count() const { return atoms_ * bloch_dim_; }
  int var_of(int atom, int component) const {  // component in [1, d^2-1]
    return atom * bloch_dim_ + (component - 1);
  }

  void add_row(AffineRow row) { rows_.push_back(std::move(row)); }
  const std::vector<AffineRow>& rows() const { return rows_; }

  // Max violation over rows and PSD constraints at x (0 when feasible).
  double violation(const VectorXd& x) const;
  bool satisfied(const VectorXd& x, double tol) const {
    return violation(x) <= tol;
  }

  // Bloch vector of an atom inside the flattened variable vector.
  VectorXd atom_block(const VectorXd& x, int atom) const;

 private:
  int atoms_, d_, bloch_dim_;
  std::vector<AffineRow> rows_;
};

enum class FeasStatus { kFeasible, kInfeasible, kUndecided };

struct FeasibilityResult {
  FeasStatus status = FeasStatus::kInfeasible;
  VectorXd witness;   // valid when feasible, satisfies all constraints <= 1e-7
  int iterations = 0;
  bool undecided_flag = false;  // undecided mapped to infeasible-for-estimation
};

struct FeasOptions {
  double tol = 1e-9;          // working feasibility tolerance
  double inner_radius = 1e-3; // ellipsoid cutoff r_in = c_r * gamma
  int projection_iters = 600;
};

inline constexpr double kInnerRadiusConstant = 0.1;  // c_r

// Alternating-projection fast path followed by an ellipsoid search with
// separation oracles (affine rows -> their hyperplane, PSD -> Bloch-ball
// gradient for qubits / minimum-eigenvector hyperplane for d > 2). Declares
// infeasible only once the ellipsoid cannot contain a ball of radius
// opts.inner_radius. Witnesses are verified post hoc.
FeasibilityResult check_feasible(const ConstraintSet& cs,
                                 const FeasOptions& opts);

struct MaxEntropyResult {
  double entropy = 0.0;      // sum_a w_a S(rho_a) at the witness, natural log
  VectorXd witness;
  double duality_gap = 0.0;  // certified Frank-Wolfe gap at termination
  int iterations = 0;
};

// Maximize sum_a weight_a * S(rho(alpha_a)) over the constraint set by
// Frank-Wolfe ascent (feasible iterates, exact line search on the segment),
// certified by a Lagrangian bound on the linearized subproblem. Requires a
// feasible starting point (checked first; throws InputError otherwise).
MaxEntropyResult max_entropy(const ConstraintSet& cs,
                             const std::vector<double>& atom_weights,
                             double tol, const FeasOptions& feas_opts);

}  // namespace qpsa
