#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qpsa/hamiltonian.hpp"

namespace qpsa_test {

using qpsa::cplx;
using qpsa::MatrixXcd;

inline MatrixXcd pauli_xx() {
  MatrixXcd m(4, 4);
  m << 0, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 1, 0, 0, 0;
  return m;
}

inline MatrixXcd pauli_yy() {
  MatrixXcd m(4, 4);
  m << 0, 0, 0, -1, 0, 0, 1, 0, 0, 1, 0, 0, -1, 0, 0, 0;
  return m;
}

inline MatrixXcd pauli_zz() {
  MatrixXcd m(4, 4);
  m << 1, 0, 0, 0, 0, -1, 0, 0, 0, 0, -1, 0, 0, 0, 0, 1;
  return m;
}

inline MatrixXcd pauli_z1() {
  MatrixXcd m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

// Heisenberg interaction XX + YY + ZZ (spectral norm 3).
inline MatrixXcd heisenberg4() { return pauli_xx() + pauli_yy() + pauli_zz(); }

inline qpsa::LocalHamiltonian two_qubit_heisenberg() {
  return qpsa::LocalHamiltonian(2, 2, 2, {{{0, 1}, heisenberg4()}});
}

inline qpsa::LocalHamiltonian single_qubit_z() {
  return qpsa::LocalHamiltonian(1, 2, 1, {{{0}, pauli_z1()}});
}

// Complete-graph Heisenberg with every term (XX+YY+ZZ)/3.
inline qpsa::LocalHamiltonian complete_heisenberg(int n) {
  std::vector<std::pair<int, int>> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) edges.emplace_back(u, v);
  return qpsa::gen_from_edges(n, edges);
}

}  // namespace qpsa_test
