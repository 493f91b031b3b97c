#include "qpsa/pauli.hpp"

#include "qpsa/errors.hpp"

namespace qpsa {

namespace {

MatrixXcd qubit_pauli(int i) {
  MatrixXcd p(2, 2);
  const cplx I(0, 1);
  switch (i) {
    case 0: p << 1, 0, 0, 1; break;
    case 1: p << 0, 1, 1, 0; break;
    case 2: p << 0, -I, I, 0; break;
    default: p << 1, 0, 0, -1; break;
  }
  return p;
}

}  // namespace

PauliBasis::PauliBasis(int d) : d_(d) {
  if (!is_power_of_two(d)) {
    throw InputError("unsupported local dimension " + std::to_string(d) +
                     ": must be a power of 2");
  }
  b_ = 0;
  for (int x = d; x > 1; x >>= 1) ++b_;
  ops_.reserve(d * d);
  for (int index = 0; index < d * d; ++index) {
    // Base-4 digits of the index select the qubit factor operators; digit 0
    // is the most significant factor so index 0 is the identity.
    MatrixXcd op = MatrixXcd::Identity(1, 1);
    int rem = index;
    std::vector<int> digits(b_);
    for (int j = b_ - 1; j >= 0; --j) {
      digits[j] = rem % 4;
      rem /= 4;
    }
    for (int j = 0; j < b_; ++j) op = kron(op, qubit_pauli(digits[j]));
    ops_.push_back(std::move(op));
  }
}

MatrixXcd PauliBasis::op_tuple(const std::vector<int>& colors) const {
  MatrixXcd op = MatrixXcd::Identity(1, 1);
  for (int c : colors) op = kron(op, ops_[c]);
  return op;
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

VectorXcd kron(const VectorXcd& a, const VectorXcd& b) {
  VectorXcd out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a(i) * b;
  return out;
}

VectorXcd pauli_eigenvector(int b, int outcome) {
  VectorXcd v(2);
  const double s = 1.0 / std::sqrt(2.0);
  const cplx I(0, 1);
  switch (b) {
    case 1: v << s, (outcome == 0 ? s : -s); break;
    case 2: v << s, (outcome == 0 ? I * s : -I * s); break;
    default: v << (outcome == 0 ? 1.0 : 0.0), (outcome == 0 ? 0.0 : 1.0); break;
  }
  return v;
}

}  // namespace qpsa
