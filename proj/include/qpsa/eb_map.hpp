#pragma once

#include <cstdint>
#include <vector>

#include "qpsa/dense.hpp"
#include "qpsa/pauli_decomposition.hpp"

namespace qpsa {

// One sampled configuration of the entanglement-breaking map: measured set C,
// a Pauli basis per measured qubit factor, and the resulting separable state
// eta_{C,b} (averaged over outcomes), summarized by its energy and entropy.
struct EbTrial {
  std::vector<int> measured;            // C, ascending
  std::vector<std::vector<int>> bases;  // per measured qudit, per qubit factor
  double energy_eta = 0.0;              // Tr[H eta_{C,b}]
  double entropy_eta = 0.0;             // S(eta_{C,b})
};

struct EbReport {
  int l = 0;
  int trials = 0;
  double energy_rho = 0.0;    // Tr[H rho]
  double entropy_rho = 0.0;   // S(rho)
  double mean_abs_diff = 0.0; // mean over trials of |Tr[H(rho - eta_{C,b})]|
  double abs_mean_diff = 0.0; // |Tr[H rho] - mean Tr[H eta]| (sigma estimate)
  double explicit_bound = 0.0; // (2kl/n)|J|_1 + (6k d^{3k} log d/sqrt(l)) n^{k/2} ||J||_F
  double min_entropy_margin = 0.0; // min over trials of S(eta) - S(rho)
  std::vector<EbTrial> trial_log;
};

// Samples m ~ Uniform{0..l}, a measured set C of size m, and a Pauli basis
// per measured qubit factor; enumerates outcomes exactly and forms
// eta_{C,b} = E_z [psi_z (x) marginals]. Requires d a power of two and the
// dense mixed-state cap. For d = 2 the proof factor log d is taken as 1.
EbReport eb_experiment(const LocalHamiltonian& h, const DenseState& rho, int l,
                       int trials, std::uint64_t seed);

}  // namespace qpsa
