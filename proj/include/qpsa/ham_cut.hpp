#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "qpsa/cut.hpp"
#include "qpsa/pauli_decomposition.hpp"

namespace qpsa {

// Multi-colored cut decomposition of a local Hamiltonian: one matrix (or
// tensor) decomposition per nonzero color, plus the constant offset. The
// assembled H_D always excludes entries with repeated vertex indices.
struct HamiltonianCutDecomposition {
  int n = 0, d = 0, k = 0;
  double constant = 0.0;
  double strength_frobenius = 0.0;  // ||J||_F of the instance
  // Color key: pair (a,b) for k=2 (a<=b), tuple for k=3.
  std::vector<std::vector<int>> color_keys;
  std::vector<CutDecomposition> color_decomps;
  bool all_targets_met = true;

  // All pieces across colors, tagged with their color tuple.
  std::vector<CutPiece> all_pieces() const;
  // Certified bound on |Tr[(H-H_D)rho]| over all product states, from the
  // per-color off-diagonal inf->1 residual norms.
  double product_gap_bound() const;
  // sum over pieces of |coeff| * (number of repeated-index entries in the
  // piece box): the guess-vs-energy diagonal correction.
  double diagonal_correction() const;
  // sqrt(sum of squared piece coefficients) and total width.
  double coeff_length() const;
  int total_width() const;

  // Energy of a product state under the assembled H_D (+ constant).
  double energy(const ProductState& s) const;

  std::string to_json_text() const;
};

// Runs fk_decompose (or the tensor variant for k=3) on every nonzero color.
// Per-color seeds are split deterministically from `seed`.
HamiltonianCutDecomposition ham_cut_decompose(const LocalHamiltonian& h,
                                              double eps, std::uint64_t seed);
HamiltonianCutDecomposition ham_cut_decompose(const PauliDecomposition& pd,
                                              double eps, std::uint64_t seed);

// Common refinement of all cut sides: vertex -> atom id, each side an exact
// union of atoms. Exact (capped at 24 distinct sides).
class RefinementAtlas {
 public:
  static constexpr int kMaxSides = 24;

  // Builds the refinement from the decomposition's distinct sides.
  explicit RefinementAtlas(const HamiltonianCutDecomposition& hcd);
  // Direct construction from explicit sides over [0, n).
  RefinementAtlas(int n, std::vector<std::vector<int>> sides);

  int n() const { return n_; }
  int atom_count() const { return int(atom_members_.size()); }
  int atom_of(int vertex) const { return atom_of_[vertex]; }
  const std::vector<std::vector<int>>& atom_members() const {
    return atom_members_;
  }
  const std::vector<std::vector<int>>& sides() const { return sides_; }
  // Atoms contained in side i (every side is a union of atoms).
  std::vector<int> atoms_in_side(int side_index) const;
  // Index of a side equal to the given set, if present.
  std::optional<int> side_index_of(const std::vector<int>& side) const;

 private:
  void build();
  int n_ = 0;
  std::vector<std::vector<int>> sides_;
  std::vector<int> atom_of_;
  std::vector<std::vector<int>> atom_members_;
  std::vector<std::uint32_t> atom_signature_;
};

struct AtomSizeEstimate {
  std::vector<double> sizes;
  bool exact = true;
  int samples_used = 0;
};

// Exact counting for n <= 1e5, otherwise uniform vertex sampling with a
// Hoeffding-determined sample count so that every |est - |A_a|| <=
// target_err * n with probability >= 1 - delta_fail.
AtomSizeEstimate estimate_atom_sizes(const RefinementAtlas& atlas,
                                     double target_err, double delta_fail,
                                     std::uint64_t seed,
                                     bool force_sampling = false);

}  // namespace qpsa
