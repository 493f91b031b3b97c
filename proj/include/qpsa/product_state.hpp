#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "qpsa/pauli.hpp"

namespace qpsa {

// Product of single-qudit density matrices, stored as one generalized Bloch
// coefficient vector per qudit: rho_u = I/d + (alpha_u . sigma)/d with
// alpha_u in R^{d^2-1} (components indexed by the non-identity basis ops).
class ProductState {
 public:
  ProductState(int n, int d);

  int n() const { return n_; }
  int d() const { return d_; }

  // Row u holds alpha_u; columns are Pauli indices 1..d^2-1 shifted by -1.
  MatrixXd& alphas() { return alphas_; }
  const MatrixXd& alphas() const { return alphas_; }

  double alpha(int u, int pauli_index) const {
    return pauli_index == 0 ? 1.0 : alphas_(u, pauli_index - 1);
  }

  // Density matrix of qudit u.
  MatrixXcd density(int u) const;

  // PSD check: for d=2 the Bloch ball, otherwise the minimum eigenvalue of
  // each rho_u. tol is the allowed violation (default matches the invariant).
  bool is_valid(double tol = 1e-9) const;

  // Clip each qudit into the PSD set (renormalize ball overshoot for d=2,
  // eigenvalue clipping for d>2). Used to round numerical solver output.
  void clip_to_physical();

  // Sum of von Neumann entropies of the factors (natural log).
  double entropy() const;

  static ProductState maximally_mixed(int n, int d);
  // Haar-ish random pure product state (deterministic given seed).
  static ProductState random_pure(int n, int d, std::uint64_t seed);
  // Random mixed product state.
  static ProductState random_mixed(int n, int d, std::uint64_t seed);

  // Bloch coefficients of a given d x d density matrix.
  static VectorXd bloch_of(const MatrixXcd& rho, const PauliBasis& basis);

 private:
  int n_, d_;
  MatrixXd alphas_;
};

}  // namespace qpsa
