#pragma once

#include <Eigen/Dense>
#include <map>
#include <utility>
#include <vector>

#include "qpsa/hamiltonian.hpp"
#include "qpsa/product_state.hpp"

namespace qpsa {

// Coefficients of one term in the generalized Pauli basis.
struct TermCoefficients {
  std::vector<int> support;
  // (color tuple, real coefficient), identity tuple kept separately.
  std::vector<std::pair<std::vector<int>, double>> entries;
  double identity_coeff = 0.0;
};

// Tensor of coefficients for one k-local color tuple, entries only on sorted
// vertex tuples u_1 < ... < u_k. Flat row-major storage over [n]^k.
struct ColorTensor {
  std::vector<int> colors;
  int n = 0;
  int k = 0;
  std::vector<double> values;

  double at(const std::vector<int>& idx) const;
  double& at(const std::vector<int>& idx);
  double frobenius() const;
};

// Pauli-basis decomposition of a LocalHamiltonian. For 2-local instances the
// per-color data is exposed as n x n interaction matrices over unordered
// color pairs a <= b: entry (u, v) is the coefficient of sigma^a_u sigma^b_v,
// with equal-color coefficients split over both orientations so that
//   Tr[H rho] = const + sum_{a<=b} sum_{u != v} K^{ab}_{uv} alpha^a_u alpha^b_v
// for every product state.
class PauliDecomposition {
 public:
  int n() const { return n_; }
  int d() const { return d_; }
  int k() const { return k_; }
  double constant() const { return constant_; }
  const std::vector<TermCoefficients>& term_coefficients() const {
    return coeffs_;
  }

  // 2-local: unordered pair colors with a nonzero matrix.
  const std::map<std::pair<int, int>, MatrixXd>& pair_matrices() const {
    return pair_matrices_;
  }
  // Ordered view J^{ab}; satisfies J^{ab} = (J^{ba})^T.
  MatrixXd matrix(int a, int b) const;

  // k-local (k <= 3): color tensors with a nonzero entry.
  const std::vector<ColorTensor>& tensors() const { return tensors_; }

  // Rebuild the term matrices from the coefficients (round-trip check).
  LocalHamiltonian assemble() const;

  friend PauliDecomposition pauli_decompose(const LocalHamiltonian& h);

 private:
  int n_ = 0, d_ = 0, k_ = 0;
  double constant_ = 0.0;
  std::vector<TermCoefficients> coeffs_;
  std::map<std::pair<int, int>, MatrixXd> pair_matrices_;
  std::vector<ColorTensor> tensors_;
};

// h^c_e = d^{-k} Tr[h_e sigma^c_e]. Throws InputError for non-Hermitian terms
// and unsupported local dimensions.
PauliDecomposition pauli_decompose(const LocalHamiltonian& h);

// Tr[H rho] for a product state, evaluated as the Bloch polynomial.
double product_energy(const PauliDecomposition& pd, const ProductState& s);

// Tr[H rho] - sum_u S(rho_u)/beta (natural-log entropy).
double product_free_energy(const PauliDecomposition& pd, const ProductState& s,
                           double beta);

// Gradient of product_energy with respect to the Bloch coefficients.
MatrixXd product_energy_gradient(const PauliDecomposition& pd,
                                 const ProductState& s);

}  // namespace qpsa
