#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "qpsa/pauli.hpp"

namespace qpsa {

// One k-local interaction: a Hermitian d^k x d^k matrix acting on a strictly
// increasing tuple of qudit indices.
struct LocalTerm {
  std::vector<int> support;
  MatrixXcd matrix;

  double spectral_norm() const;
};

// H = sum_e h_e on n qudits of local dimension d (a power of 2), with at most
// one term per support tuple. Derived norms are cached on construction.
class LocalHamiltonian {
 public:
  LocalHamiltonian(int n, int d, int k, std::vector<LocalTerm> terms);

  int n() const { return n_; }
  int d() const { return d_; }
  int k() const { return k_; }
  const std::vector<LocalTerm>& terms() const { return terms_; }
  int term_count() const { return int(terms_.size()); }

  // J_e = ||h_e||_inf per term, in term order.
  const std::vector<double>& term_norms() const { return term_norms_; }
  // |J|_1 = sum_e J_e.
  double strength_l1() const { return strength_l1_; }
  // ||J||_F = sqrt(sum_e J_e^2).
  double strength_frobenius() const { return strength_frob_; }

  // Interaction-strength matrix J_uv = ||H_uv||_inf for 2-local instances
  // (symmetric, zero diagonal). Throws for k != 2.
  MatrixXd strength_matrix() const;

  static LocalHamiltonian from_json_file(const std::string& path);
  static LocalHamiltonian from_json_text(const std::string& text);
  std::string to_json_text() const;
  void to_json_file(const std::string& path) const;

 private:
  int n_, d_, k_;
  std::vector<LocalTerm> terms_;
  std::vector<double> term_norms_;
  double strength_l1_ = 0.0;
  double strength_frob_ = 0.0;
};

// Instance generators used by the CLI and the tests. All are deterministic
// given the seed and emit terms with ||h_e||_inf <= 1.
LocalHamiltonian gen_complete_random(int n, std::uint64_t seed);
LocalHamiltonian gen_grid_heisenberg(int rows, int cols);
LocalHamiltonian gen_planarish_random(int rows, int cols, std::uint64_t seed);
// Heisenberg interaction (XX+YY+ZZ)/3 on each edge of an explicit edge list.
LocalHamiltonian gen_from_edges(int n,
                                const std::vector<std::pair<int, int>>& edges);
// Quantum Max-Cut Hamiltonian (w/2)(I - XX - YY - ZZ) per weighted edge.
LocalHamiltonian qmc_hamiltonian(int n,
                                 const std::vector<std::array<double, 3>>& edges);

}  // namespace qpsa
