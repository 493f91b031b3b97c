#include "qpsa/ham_cut.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include <json.hpp>

#include "qpsa/errors.hpp"
#include "qpsa/rng.hpp"

namespace qpsa {

std::vector<CutPiece> HamiltonianCutDecomposition::all_pieces() const {
  std::vector<CutPiece> out;
  for (size_t c = 0; c < color_decomps.size(); ++c)
    for (const auto& p : color_decomps[c].pieces) {
      CutPiece tagged = p;
      tagged.colors = color_keys[c];
      out.push_back(std::move(tagged));
    }
  return out;
}

double HamiltonianCutDecomposition::product_gap_bound() const {
  double total = 0.0;
  for (const auto& cd : color_decomps) total += cd.residual.inf_one_offdiag;
  return total;
}

namespace {

double intersection_size(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                        std::back_inserter(out));
  return double(out.size());
}

double repeated_tuple_count(const CutPiece& p) {
  if (p.sides.size() == 2) return intersection_size(p.sides[0], p.sides[1]);
  const auto& s1 = p.sides[0];
  const auto& s2 = p.sides[1];
  const auto& s3 = p.sides[2];
  std::vector<int> s12, s23, s13, s123;
  std::set_intersection(s1.begin(), s1.end(), s2.begin(), s2.end(),
                        std::back_inserter(s12));
  std::set_intersection(s2.begin(), s2.end(), s3.begin(), s3.end(),
                        std::back_inserter(s23));
  std::set_intersection(s1.begin(), s1.end(), s3.begin(), s3.end(),
                        std::back_inserter(s13));
  std::set_intersection(s12.begin(), s12.end(), s3.begin(), s3.end(),
                        std::back_inserter(s123));
  return double(s12.size()) * s3.size() + double(s23.size()) * s1.size() +
         double(s13.size()) * s2.size() - 2.0 * s123.size();
}

}  // namespace

double HamiltonianCutDecomposition::diagonal_correction() const {
  double total = 0.0;
  for (size_t c = 0; c < color_decomps.size(); ++c)
    for (const auto& p : color_decomps[c].pieces)
      total += std::abs(p.coeff) * repeated_tuple_count(p);
  return total;
}

double HamiltonianCutDecomposition::coeff_length() const {
  double s = 0.0;
  for (const auto& cd : color_decomps) s += cd.coeff_sq_sum();
  return std::sqrt(s);
}

int HamiltonianCutDecomposition::total_width() const {
  int w = 0;
  for (const auto& cd : color_decomps) w += int(cd.pieces.size());
  return w;
}

double HamiltonianCutDecomposition::energy(const ProductState& s) const {
  double total = constant;
  for (size_t c = 0; c < color_decomps.size(); ++c) {
    const auto& colors = color_keys[c];
    for (const auto& p : color_decomps[c].pieces) {
      if (p.sides.size() == 2) {
        double sx = 0, sy = 0, rep = 0;
        for (int u : p.sides[0]) sx += s.alpha(u, colors[0]);
        for (int v : p.sides[1]) sy += s.alpha(v, colors[1]);
        std::vector<int> inter;
        std::set_intersection(p.sides[0].begin(), p.sides[0].end(),
                              p.sides[1].begin(), p.sides[1].end(),
                              std::back_inserter(inter));
        for (int w : inter) rep += s.alpha(w, colors[0]) * s.alpha(w, colors[1]);
        total += p.coeff * (sx * sy - rep);
      } else {
        const auto& s1 = p.sides[0];
        const auto& s2 = p.sides[1];
        const auto& s3 = p.sides[2];
        auto comp = [&](const std::vector<int>& side, int color) {
          double acc = 0;
          for (int u : side) acc += s.alpha(u, color);
          return acc;
        };
        double sx = comp(s1, colors[0]), sy = comp(s2, colors[1]),
               sz = comp(s3, colors[2]);
        auto pair_sum = [&](const std::vector<int>& a, const std::vector<int>& b,
                            int ca, int cb) {
          std::vector<int> inter;
          std::set_intersection(a.begin(), a.end(), b.begin(), b.end(),
                                std::back_inserter(inter));
          double acc = 0;
          for (int u : inter) acc += s.alpha(u, ca) * s.alpha(u, cb);
          return acc;
        };
        std::vector<int> s12, s123;
        std::set_intersection(s1.begin(), s1.end(), s2.begin(), s2.end(),
                              std::back_inserter(s12));
        std::set_intersection(s12.begin(), s12.end(), s3.begin(), s3.end(),
                              std::back_inserter(s123));
        double triple = 0;
        for (int u : s123)
          triple += s.alpha(u, colors[0]) * s.alpha(u, colors[1]) *
                    s.alpha(u, colors[2]);
        double repeated = pair_sum(s1, s2, colors[0], colors[1]) * sz +
                          pair_sum(s2, s3, colors[1], colors[2]) * sx +
                          pair_sum(s1, s3, colors[0], colors[2]) * sy -
                          2.0 * triple;
        total += p.coeff * (sx * sy * sz - repeated);
      }
    }
  }
  return total;
}

std::string HamiltonianCutDecomposition::to_json_text() const {
  nlohmann::ordered_json doc;
  doc["n"] = n;
  doc["d"] = d;
  doc["k"] = k;
  doc["constant"] = constant;
  doc["strength_frobenius"] = strength_frobenius;
  doc["all_targets_met"] = all_targets_met;
  doc["colors"] = nlohmann::ordered_json::array();
  for (size_t c = 0; c < color_decomps.size(); ++c) {
    nlohmann::ordered_json jc;
    jc["color"] = color_keys[c];
    jc["target"] = color_decomps[c].target;
    jc["target_met"] = color_decomps[c].target_met;
    jc["pieces"] = nlohmann::ordered_json::array();
    for (const auto& p : color_decomps[c].pieces) {
      nlohmann::ordered_json jp;
      jp["sides"] = p.sides;
      jp["coeff"] = p.coeff;
      jc["pieces"].push_back(std::move(jp));
    }
    const auto& r = color_decomps[c].residual;
    jc["residual"] = {{"cut_value", r.cut_value},
                      {"cut_exact", r.cut_exact},
                      {"frobenius", r.frobenius},
                      {"max_abs_diag", r.max_abs_diag},
                      {"inf_one_offdiag", r.inf_one_offdiag},
                      {"inf_one_exact", r.inf_one_exact}};
    doc["colors"].push_back(std::move(jc));
  }
  return doc.dump(2);
}

HamiltonianCutDecomposition ham_cut_decompose(const PauliDecomposition& pd,
                                              double eps, std::uint64_t seed) {
  HamiltonianCutDecomposition out;
  out.n = pd.n();
  out.d = pd.d();
  out.k = pd.k();
  out.constant = pd.constant();
  if (pd.k() == 2) {
    int color_index = 0;
    for (const auto& [key, mat] : pd.pair_matrices()) {
      if (mat.norm() < 1e-14) continue;
      out.color_keys.push_back({key.first, key.second});
      out.color_decomps.push_back(
          fk_decompose(mat, eps, split_seed(seed, 1000 + color_index)));
      out.all_targets_met =
          out.all_targets_met && out.color_decomps.back().target_met;
      ++color_index;
    }
  } else if (pd.k() == 3) {
    int color_index = 0;
    for (const auto& tensor : pd.tensors()) {
      if (tensor.frobenius() < 1e-14) continue;
      out.color_keys.push_back(tensor.colors);
      out.color_decomps.push_back(
          tensor_fk_decompose(tensor, eps, split_seed(seed, 1000 + color_index)));
      out.all_targets_met =
          out.all_targets_met && out.color_decomps.back().target_met;
      ++color_index;
    }
  } else {
    throw SizeLimitError("cut decomposition supports k <= 3 only");
  }
  return out;
}

HamiltonianCutDecomposition ham_cut_decompose(const LocalHamiltonian& h,
                                              double eps, std::uint64_t seed) {
  auto pd = pauli_decompose(h);
  auto out = ham_cut_decompose(pd, eps, seed);
  out.strength_frobenius = h.strength_frobenius();
  return out;
}

// ---------------------------------------------------------------------------
// RefinementAtlas

RefinementAtlas::RefinementAtlas(const HamiltonianCutDecomposition& hcd)
    : n_(hcd.n) {
  std::set<std::vector<int>> distinct;
  for (const auto& cd : hcd.color_decomps)
    for (const auto& p : cd.pieces)
      for (const auto& side : p.sides) distinct.insert(side);
  sides_.assign(distinct.begin(), distinct.end());
  build();
}

RefinementAtlas::RefinementAtlas(int n, std::vector<std::vector<int>> sides)
    : n_(n) {
  std::set<std::vector<int>> distinct(sides.begin(), sides.end());
  sides_.assign(distinct.begin(), distinct.end());
  build();
}

void RefinementAtlas::build() {
  if (int(sides_.size()) > kMaxSides)
    throw SizeLimitError(
        "refinement atlas capped at 24 distinct cut sides; increase eps");
  std::vector<std::uint32_t> signature(n_, 0);
  for (size_t i = 0; i < sides_.size(); ++i)
    for (int v : sides_[i]) {
      if (v < 0 || v >= n_) throw InputError("side vertex out of range");
      signature[v] |= (std::uint32_t(1) << i);
    }
  std::map<std::uint32_t, int> atom_of_signature;
  atom_of_.assign(n_, -1);
  for (int v = 0; v < n_; ++v) {
    auto it = atom_of_signature.find(signature[v]);
    if (it == atom_of_signature.end()) {
      it = atom_of_signature.emplace(signature[v], int(atom_members_.size()))
               .first;
      atom_members_.emplace_back();
      atom_signature_.push_back(signature[v]);
    }
    atom_of_[v] = it->second;
    atom_members_[it->second].push_back(v);
  }
  // Re-number atoms by signature order for a stable layout.
  std::vector<int> order(atom_members_.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return atom_signature_[a] < atom_signature_[b];
  });
  std::vector<int> rank(order.size());
  for (size_t i = 0; i < order.size(); ++i) rank[order[i]] = int(i);
  std::vector<std::vector<int>> members(order.size());
  std::vector<std::uint32_t> sigs(order.size());
  for (size_t i = 0; i < order.size(); ++i) {
    members[rank[i]] = std::move(atom_members_[i]);
    sigs[rank[i]] = atom_signature_[i];
  }
  atom_members_ = std::move(members);
  atom_signature_ = std::move(sigs);
  for (int v = 0; v < n_; ++v) atom_of_[v] = rank[atom_of_[v]];
}

std::vector<int> RefinementAtlas::atoms_in_side(int side_index) const {
  std::vector<int> out;
  for (size_t a = 0; a < atom_members_.size(); ++a)
    if (atom_signature_[a] & (std::uint32_t(1) << side_index))
      out.push_back(int(a));
  return out;
}

std::optional<int> RefinementAtlas::side_index_of(
    const std::vector<int>& side) const {
  auto it = std::find(sides_.begin(), sides_.end(), side);
  if (it == sides_.end()) return std::nullopt;
  return int(it - sides_.begin());
}

AtomSizeEstimate estimate_atom_sizes(const RefinementAtlas& atlas,
                                     double target_err, double delta_fail,
                                     std::uint64_t seed, bool force_sampling) {
  AtomSizeEstimate out;
  const int n = atlas.n();
  const int atoms = atlas.atom_count();
  if (!force_sampling && n <= 100000) {
    out.exact = true;
    out.sizes.resize(atoms);
    for (int a = 0; a < atoms; ++a)
      out.sizes[a] = double(atlas.atom_members()[a].size());
    return out;
  }
  if (target_err <= 0 || delta_fail <= 0 || delta_fail >= 1)
    throw InputError("bad sampling parameters");
  // Hoeffding: P[|p_hat - p| >= t] <= 2 exp(-2 k t^2); union over atoms.
  const double t = target_err;
  const int samples =
      int(std::ceil(std::log(2.0 * atoms / delta_fail) / (2.0 * t * t)));
  Rng rng(split_seed(seed, "atomsizes"));
  std::vector<std::int64_t> counts(atoms, 0);
  for (int i = 0; i < samples; ++i) {
    int v = int(rng.next_below(n));
    counts[atlas.atom_of(v)]++;
  }
  out.exact = false;
  out.samples_used = samples;
  out.sizes.resize(atoms);
  for (int a = 0; a < atoms; ++a)
    out.sizes[a] = double(n) * double(counts[a]) / double(samples);
  return out;
}

}  // namespace qpsa
