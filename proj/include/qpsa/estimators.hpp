#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qpsa/constraints.hpp"
#include "qpsa/ham_cut.hpp"

namespace qpsa {

// One guessed quantity: the weighted magnetization of a cut side in a fixed
// Pauli component. Identity components are not guessed; their value is the
// exact side weight.
struct GuessAxis {
  int side_index = 0;
  int component = 0;            // Pauli index; 0 means fixed/identity
  double slack = 0.0;           // constraint half-width (gamma*n or Delta)
  double side_weight = 0.0;     // sum of atom weights in the side
  bool guessed = false;
  double fixed_value = 0.0;     // used when !guessed
  std::vector<double> candidates;  // pruned grid, ascending
};

// The relaxation model shared by the ground-state, free-energy and QMC
// estimators: atlas, atom weights, guess axes grouped by side, and the cut
// pieces expressed through axis references.
class GuessModel {
 public:
  struct PieceRef {
    double coeff = 0.0;
    std::vector<int> axis;  // one axis id per side of the piece
  };
  // Piece given by explicit sides: (vertex set, Pauli component) per slot.
  struct ExplicitPiece {
    double coeff = 0.0;
    std::vector<std::pair<std::vector<int>, int>> sides;
  };

  GuessModel(const HamiltonianCutDecomposition& hcd, double gamma,
             std::vector<double> atom_weights_override = {});
  // Degree-weighted variant (QMC): rows and magnetizations weight vertices by
  // `vertex_weights`; grid of pitch `pitch` in [-range_bound, range_bound].
  GuessModel(int n, int d, double constant,
             const std::vector<ExplicitPiece>& pieces,
             const std::vector<double>& vertex_weights, double pitch,
             double range_bound);

  int n() const { return n_; }
  int d() const { return d_; }
  double constant() const { return constant_; }
  const RefinementAtlas& atlas() const { return atlas_; }
  const std::vector<double>& atom_weights() const { return atom_weights_; }
  const std::vector<GuessAxis>& axes() const { return axes_; }
  const std::vector<PieceRef>& pieces() const { return pieces_; }
  double gamma() const { return gamma_; }

  // Number of guess tuples after per-side joint pruning.
  double enumeration_size() const;

  // Estimate sum_pieces coeff * prod(axis values) + constant for an
  // assignment of all axes (guessed ones from `values` by axis id).
  double estimate_value(const std::vector<double>& axis_values) const;

  // Constraint set for a guess (rows only for guessed axes).
  ConstraintSet constraints_for(const std::vector<double>& axis_values) const;

  // Axis assignment whose guessed entries are the grid-rounded true
  // magnetizations of a product state (coverage direction of the feasibility
  // claims). Returns nullopt if a rounded value escapes the pruned grid.
  std::optional<std::vector<double>> axis_values_of(const ProductState& s) const;

  // Iterate over all guesses (joint-pruned); callback gets the axis values.
  // Throws EnumerationCapError if the pruned count exceeds `cap`.
  void enumerate(double cap,
                 const std::function<void(const std::vector<double>&)>& fn) const;

 private:
  void build_axes(const std::vector<ExplicitPiece>& pieces, double pitch,
                  double range_bound, int grid_radius);
  int n_ = 0, d_ = 0;
  double constant_ = 0.0;
  double gamma_ = 0.0;
  RefinementAtlas atlas_;
  std::vector<double> atom_weights_;
  std::vector<double> vertex_weights_;
  std::vector<GuessAxis> axes_;
  std::vector<PieceRef> pieces_;
  // Guessed axes grouped by side with jointly admissible value tuples.
  std::vector<std::vector<int>> side_groups_;
  std::vector<std::vector<std::vector<double>>> side_tuples_;
};

struct BudgetBreakdown {
  double regularity = 0.0;   // certified |Tr[(H-H_D)rho]| bound
  double diagonal = 0.0;     // repeated-index correction sum |d| * overlaps
  double grid = 0.0;         // 8 * sqrt(sum d^2) * n^2 * gamma * sqrt(s)
  double thermal = 0.0;      // entropy-solver tolerance * n / beta
  double product_gap = 0.0;  // 2 * min_l explicit entanglement-breaking bound
  double total() const {
    return regularity + diagonal + grid + thermal + product_gap;
  }
};

struct EstimateOptions {
  double enum_cap = 1e7;
  bool allow_direct_fallback = false;
  int direct_restarts = 64;
  int direct_iters = 400;
  double entropy_tol = 1e-4;  // fraction of sum of weights (fe only)
};

struct GsEstimateReport {
  double v_hat = 0.0;
  ProductState witness;
  double witness_energy = 0.0;
  std::int64_t feasible_guesses = 0;
  std::int64_t total_guesses = 0;
  BudgetBreakdown budget;
  bool used_direct_fallback = false;
  double eps = 0.0, gamma = 0.0;
};

struct FeEstimateReport {
  double f_hat = 0.0;
  ProductState witness;
  double witness_free_energy = 0.0;
  std::int64_t feasible_guesses = 0;
  std::int64_t total_guesses = 0;
  BudgetBreakdown budget;
  bool used_direct_fallback = false;
  double eps = 0.0, gamma = 0.0, beta = 0.0;
};

// V-hat: minimum of the guess estimate over feasible subset-magnetization
// constraint sets, with the expanded witness of the argmin.
GsEstimateReport gs_estimate(const LocalHamiltonian& h, double eps,
                             double gamma, std::uint64_t seed,
                             const EstimateOptions& opts = {});

// Free-energy variant: minimizes guess energy - max_entropy/beta.
FeEstimateReport fe_estimate(const LocalHamiltonian& h, double beta,
                             double eps, double gamma, std::uint64_t seed,
                             const EstimateOptions& opts = {});

// Projected gradient descent on the Bloch polynomial from random starts.
// Objective is non-increasing within each run.
std::pair<double, ProductState> gs_direct(const PauliDecomposition& pd,
                                          int restarts, int iters,
                                          std::uint64_t seed);

// Copy each atom's Bloch vector to all its vertices.
ProductState expand_witness(const RefinementAtlas& atlas,
                            const VectorXd& compressed, int d);

// Method of conditional expectations: sweep qudits in index order, replacing
// each factor by the minimizing eigenstate of its effective local field.
// Never increases the energy (up to 1e-9).
ProductState round_to_pure(const ProductState& s, const PauliDecomposition& pd);

}  // namespace qpsa
