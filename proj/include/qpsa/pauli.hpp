#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace qpsa {

using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;
using cplx = std::complex<double>;

// Generalized single-qudit Pauli basis for local dimension d = 2^b: the d^2
// tensor powers of {I, X, Y, Z}. Operators are Hermitian and unitary with
// Tr[P_a P_b] = d * delta_ab. Index 0 is always the identity.
class PauliBasis {
 public:
  explicit PauliBasis(int d);

  int d() const { return d_; }
  int count() const { return d_ * d_; }
  // Number of qubit factors, log2(d).
  int factors() const { return b_; }

  const MatrixXcd& op(int index) const { return ops_[index]; }

  // Pauli operator on k qudits for a color tuple (c_1..c_k): op(c_1) x ... x
  // op(c_k), ordered so that position j acts on the j-th qudit of the support.
  MatrixXcd op_tuple(const std::vector<int>& colors) const;

  static bool is_power_of_two(int d) { return d >= 2 && (d & (d - 1)) == 0; }

 private:
  int d_;
  int b_;
  std::vector<MatrixXcd> ops_;
};

// Kronecker product helpers.
MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b);
VectorXcd kron(const VectorXcd& a, const VectorXcd& b);

// Eigenvector of the single-qubit Pauli sigma_b (b in {1,2,3}) with
// eigenvalue +1 (outcome=0) or -1 (outcome=1).
VectorXcd pauli_eigenvector(int b, int outcome);

}  // namespace qpsa
