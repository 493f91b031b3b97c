#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qpsa/hamiltonian.hpp"

namespace qpsa {

// Uniform q-subset of the qudits (without replacement), reindexed 0..q-1 in
// ascending original order; keeps only terms with support inside the sample.
LocalHamiltonian subsample(const LocalHamiltonian& h, int q,
                           std::uint64_t seed);
// Also exposes the chosen subset.
LocalHamiltonian subsample(const LocalHamiltonian& h, int q,
                           std::uint64_t seed, std::vector<int>& subset_out);

enum class VscSolver { kExact, kDirect, kRelaxation };

struct SubsampleReport {
  int q = 0;
  int trials = 0;
  double reference = 0.0;            // full-instance value
  std::vector<double> estimates;     // per trial, (n/q)^k * value(H_Q)
  double mean = 0.0;
  double sd = 0.0;
  double max_dev = 0.0;              // max |estimate - reference|
  // Per-color residual cut values of the sampled W_Q (relaxation path only).
  std::vector<double> sampled_residual_cuts;
};

struct VscOptions {
  double eps = 0.5;      // decomposition accuracy (relaxation path)
  double gamma = 0.25;   // guess grid pitch (relaxation path)
  int direct_restarts = 32;
  int direct_iters = 300;
  // Worker threads for the trial loop. Per-trial seeds are pre-split and
  // results land in indexed slots, so any thread count reduces identically.
  int threads = 1;
};

SubsampleReport vsc_experiment(const LocalHamiltonian& h, int q, int trials,
                               VscSolver solver, std::uint64_t seed,
                               const VscOptions& opts = {});

}  // namespace qpsa
