#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "qpsa/hamiltonian.hpp"
#include "qpsa/product_state.hpp"

namespace qpsa {

// Size caps for the dense oracles (d^n), configuration constants.
inline constexpr std::int64_t kPureStateDimCap = std::int64_t(1) << 22;
inline constexpr std::int64_t kMixedStateDimCap = std::int64_t(1) << 12;
// Dense eigensolves switch to Lanczos above this dimension.
inline constexpr std::int64_t kDenseEigenDimCap = 4096;

// Dense n-qudit state: unit vector (pure) or Hermitian PSD trace-1 matrix
// (mixed). Constructors enforce the documented dimension caps.
class DenseState {
 public:
  static DenseState pure(VectorXcd psi, int n, int d);
  static DenseState mixed(MatrixXcd rho, int n, int d);

  bool is_pure() const { return pure_; }
  int n() const { return n_; }
  int d() const { return d_; }
  std::int64_t dim() const { return dim_; }

  const VectorXcd& vector() const { return psi_; }
  const MatrixXcd& matrix() const { return rho_; }
  // Density-matrix view (forms |psi><psi| for pure states; mixed cap applies).
  MatrixXcd density() const;

 private:
  DenseState() = default;
  bool pure_ = true;
  int n_ = 0, d_ = 0;
  std::int64_t dim_ = 0;
  VectorXcd psi_;
  MatrixXcd rho_;
};

// d^n x d^n matrix of H (mixed-state cap applies).
MatrixXcd assemble_dense(const LocalHamiltonian& h);

// y = H x without materializing H (pure-state cap applies).
void apply_hamiltonian(const LocalHamiltonian& h, const VectorXcd& x,
                       VectorXcd& y);

// Minimum eigenvalue and a unit eigenvector; dense solve for small
// dimensions, Lanczos above. Verifies ||Hv - lambda v|| <= 1e-8.
std::pair<double, DenseState> exact_ground(const LocalHamiltonian& h);

// -(1/beta) ln Tr[e^{-beta H}] via the full spectrum (mixed cap).
double exact_free_energy(const LocalHamiltonian& h, double beta);

// Gibbs state e^{-beta H}/Z (mixed cap).
DenseState gibbs_state(const LocalHamiltonian& h, double beta);

// Von Neumann entropy (natural log) of a density matrix.
double von_neumann_entropy(const MatrixXcd& rho);

// Partial trace keeping the qudits in `keep` (ascending); d = local dim.
MatrixXcd partial_trace_keep(const MatrixXcd& rho, int n, int d,
                             const std::vector<int>& keep);

// Tr[H rho] for a dense state.
double dense_energy(const LocalHamiltonian& h, const DenseState& state);

// Single-qudit marginals of a dense state as a product state (Bloch form).
ProductState marginals_of(const DenseState& state);

}  // namespace qpsa
