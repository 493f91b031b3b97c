#include "qpsa/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <map>

#include "qpsa/errors.hpp"
#include "qpsa/rng.hpp"

namespace qpsa {

namespace {

std::vector<GuessModel::ExplicitPiece> pieces_from_hcd(
    const HamiltonianCutDecomposition& hcd) {
  std::vector<GuessModel::ExplicitPiece> out;
  for (size_t c = 0; c < hcd.color_decomps.size(); ++c) {
    const auto& colors = hcd.color_keys[c];
    for (const auto& p : hcd.color_decomps[c].pieces) {
      GuessModel::ExplicitPiece ep;
      ep.coeff = p.coeff;
      for (size_t j = 0; j < p.sides.size(); ++j)
        ep.sides.emplace_back(p.sides[j], colors[j]);
      out.push_back(std::move(ep));
    }
  }
  return out;
}

std::vector<std::vector<int>> sides_of_pieces(
    const std::vector<GuessModel::ExplicitPiece>& pieces) {
  std::vector<std::vector<int>> sides;
  for (const auto& p : pieces)
    for (const auto& [side, comp] : p.sides) sides.push_back(side);
  return sides;
}

}  // namespace

GuessModel::GuessModel(const HamiltonianCutDecomposition& hcd, double gamma,
                       std::vector<double> atom_weights_override)
    : n_(hcd.n), d_(hcd.d), constant_(hcd.constant), gamma_(gamma),
      atlas_(hcd) {
  if (gamma <= 0 || gamma >= 1) throw InputError("gamma must be in (0, 1)");
  if (atom_weights_override.empty()) {
    atom_weights_.resize(atlas_.atom_count());
    for (int a = 0; a < atlas_.atom_count(); ++a)
      atom_weights_[a] = double(atlas_.atom_members()[a].size());
  } else {
    if (int(atom_weights_override.size()) != atlas_.atom_count())
      throw InputError("atom weight override count mismatch");
    atom_weights_ = std::move(atom_weights_override);
  }
  vertex_weights_.assign(n_, 1.0);
  // Grid I_gamma: multiples of gamma*n out to gamma*floor(1/gamma)*n.
  build_axes(pieces_from_hcd(hcd), gamma * n_, 0.0,
             int(std::floor(1.0 / gamma)));
}

GuessModel::GuessModel(int n, int d, double constant,
                       const std::vector<ExplicitPiece>& pieces,
                       const std::vector<double>& vertex_weights, double pitch,
                       double range_bound)
    : n_(n), d_(d), constant_(constant),
      gamma_(pitch / std::max(range_bound, 1e-30)),
      atlas_(n, sides_of_pieces(pieces)) {
  if (int(vertex_weights.size()) != n)
    throw InputError("vertex weight count mismatch");
  vertex_weights_ = vertex_weights;
  atom_weights_.resize(atlas_.atom_count());
  for (int a = 0; a < atlas_.atom_count(); ++a) {
    double w = 0.0;
    for (int u : atlas_.atom_members()[a]) w += vertex_weights[u];
    atom_weights_[a] = w;
  }
  build_axes(pieces, pitch, range_bound,
             int(std::floor(range_bound / pitch)) + 1);
}

void GuessModel::build_axes(const std::vector<ExplicitPiece>& pieces,
                            double pitch, double range_bound,
                            int grid_radius) {
  (void)range_bound;
  std::map<std::pair<int, int>, int> axis_of;  // (side index, component)
  auto side_weight_of = [&](int side_index) {
    double w = 0.0;
    for (int a : atlas_.atoms_in_side(side_index)) w += atom_weights_[a];
    return w;
  };

  auto make_axis = [&](int side_index, int component) {
    auto key = std::make_pair(side_index, component);
    auto it = axis_of.find(key);
    if (it != axis_of.end()) return it->second;
    GuessAxis ax;
    ax.side_index = side_index;
    ax.component = component;
    ax.side_weight = side_weight_of(side_index);
    if (component == 0) {
      ax.guessed = false;
      ax.fixed_value = ax.side_weight;
    } else {
      ax.guessed = true;
      ax.slack = pitch;
      for (int j = -grid_radius; j <= grid_radius; ++j) {
        double g = j * pitch;
        if (std::abs(g) <= ax.side_weight + ax.slack + 1e-12)
          ax.candidates.push_back(g);
      }
    }
    axes_.push_back(std::move(ax));
    axis_of.emplace(key, int(axes_.size()) - 1);
    return int(axes_.size()) - 1;
  };

  for (const auto& p : pieces) {
    PieceRef ref;
    ref.coeff = p.coeff;
    for (const auto& [side, comp] : p.sides) {
      int side_index = *atlas_.side_index_of(side);
      ref.axis.push_back(make_axis(side_index, comp));
    }
    pieces_.push_back(std::move(ref));
  }

  // Group guessed axes by side and precompute jointly admissible tuples:
  // sum_c max(0, |g_c| - slack)^2 <= side_weight^2 (Cauchy-Schwarz over the
  // joint Bloch balls).
  std::map<int, std::vector<int>> by_side;
  for (size_t i = 0; i < axes_.size(); ++i)
    if (axes_[i].guessed) by_side[axes_[i].side_index].push_back(int(i));
  for (const auto& [side, ids] : by_side) {
    const double wmax = side_weight_of(side);
    std::vector<std::vector<double>> tuples;
    std::vector<int> odo(ids.size(), 0);
    while (true) {
      double excess = 0.0;
      std::vector<double> tup(ids.size());
      for (size_t i = 0; i < ids.size(); ++i) {
        const auto& ax = axes_[ids[i]];
        tup[i] = ax.candidates[odo[i]];
        excess += std::pow(std::max(0.0, std::abs(tup[i]) - ax.slack), 2);
      }
      if (excess <= wmax * wmax + 1e-9) tuples.push_back(std::move(tup));
      int pos = int(ids.size()) - 1;
      while (pos >= 0) {
        if (++odo[pos] < int(axes_[ids[pos]].candidates.size())) break;
        odo[pos] = 0;
        --pos;
      }
      if (pos < 0) break;
    }
    side_groups_.push_back(ids);
    side_tuples_.push_back(std::move(tuples));
  }
}

double GuessModel::enumeration_size() const {
  double total = 1.0;
  for (const auto& tuples : side_tuples_) total *= double(tuples.size());
  return total;
}

double GuessModel::estimate_value(const std::vector<double>& axis_values) const {
  double total = constant_;
  for (const auto& p : pieces_) {
    double prod = p.coeff;
    for (int ax : p.axis) prod *= axis_values[ax];
    total += prod;
  }
  return total;
}

ConstraintSet GuessModel::constraints_for(
    const std::vector<double>& axis_values) const {
  ConstraintSet cs(atlas_.atom_count(), d_);
  for (size_t i = 0; i < axes_.size(); ++i) {
    const auto& ax = axes_[i];
    if (!ax.guessed) continue;
    AffineRow row;
    for (int a : atlas_.atoms_in_side(ax.side_index)) {
      row.var_index.push_back(cs.var_of(a, ax.component));
      row.weight.push_back(atom_weights_[a]);
    }
    row.lo = axis_values[i] - ax.slack;
    row.hi = axis_values[i] + ax.slack;
    cs.add_row(std::move(row));
  }
  return cs;
}

std::optional<std::vector<double>> GuessModel::axis_values_of(
    const ProductState& s) const {
  std::vector<double> values(axes_.size(), 0.0);
  for (size_t i = 0; i < axes_.size(); ++i) {
    const auto& ax = axes_[i];
    if (!ax.guessed) {
      values[i] = ax.fixed_value;
      continue;
    }
    // True vertex-level magnetization, then round to the nearest grid point.
    double mag = 0.0;
    for (int a : atlas_.atoms_in_side(ax.side_index))
      for (int u : atlas_.atom_members()[a])
        mag += vertex_weights_[u] * s.alpha(u, ax.component);
    double best = 0.0, best_dist = std::numeric_limits<double>::max();
    for (double g : ax.candidates) {
      double dist = std::abs(g - mag);
      if (dist < best_dist - 1e-15) {
        best_dist = dist;
        best = g;
      }
    }
    if (best_dist > ax.slack + 1e-9) return std::nullopt;
    values[i] = best;
  }
  return values;
}

void GuessModel::enumerate(
    double cap,
    const std::function<void(const std::vector<double>&)>& fn) const {
  if (enumeration_size() > cap)
    throw EnumerationCapError(
        "guess enumeration size " + std::to_string(enumeration_size()) +
        " exceeds the cap; increase gamma or use direct mode");
  std::vector<double> values(axes_.size(), 0.0);
  for (size_t i = 0; i < axes_.size(); ++i)
    if (!axes_[i].guessed) values[i] = axes_[i].fixed_value;
  if (side_groups_.empty()) {
    fn(values);
    return;
  }
  std::vector<int> odo(side_groups_.size(), 0);
  for (const auto& tuples : side_tuples_)
    if (tuples.empty()) return;  // no admissible guess at all
  while (true) {
    for (size_t gidx = 0; gidx < side_groups_.size(); ++gidx) {
      const auto& ids = side_groups_[gidx];
      const auto& tup = side_tuples_[gidx][odo[gidx]];
      for (size_t i = 0; i < ids.size(); ++i) values[ids[i]] = tup[i];
    }
    fn(values);
    int pos = int(side_groups_.size()) - 1;
    while (pos >= 0) {
      if (++odo[pos] < int(side_tuples_[pos].size())) break;
      odo[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
  }
}

// ---------------------------------------------------------------------------

ProductState expand_witness(const RefinementAtlas& atlas,
                            const VectorXd& compressed, int d) {
  const int bd = d * d - 1;
  ProductState s(atlas.n(), d);
  for (int u = 0; u < atlas.n(); ++u)
    s.alphas().row(u) =
        compressed.segment(atlas.atom_of(u) * bd, bd).transpose();
  return s;
}

ProductState round_to_pure(const ProductState& s,
                           const PauliDecomposition& pd) {
  ProductState out = s;
  const int n = s.n(), d = s.d();
  const int bd = d * d - 1;
  PauliBasis basis(d);
  for (int u = 0; u < n; ++u) {
    // Effective local field: dE/dalpha_u.
    VectorXd field = VectorXd::Zero(bd);
    for (const auto& tc : pd.term_coefficients()) {
      int pos = -1;
      for (size_t j = 0; j < tc.support.size(); ++j)
        if (tc.support[j] == u) pos = int(j);
      if (pos < 0) continue;
      for (const auto& [cols, coeff] : tc.entries) {
        if (cols[pos] == 0) continue;
        double prod = coeff;
        for (size_t j = 0; j < cols.size(); ++j) {
          if (int(j) == pos) continue;
          prod *= out.alpha(tc.support[j], cols[j]);
        }
        field(cols[pos] - 1) += prod;
      }
    }
    VectorXd cur = out.alphas().row(u).transpose();
    const double cur_energy = field.dot(cur);
    bool pure;
    if (d == 2) {
      pure = std::abs(cur.norm() - 1.0) <= 1e-9;
    } else {
      MatrixXcd rho = out.density(u);
      pure = std::abs((rho * rho).trace().real() - 1.0) <= 1e-9;
    }
    if (pure) continue;  // conditional expectations keep pure factors
    VectorXd repl(bd);
    if (field.norm() < 1e-13) {
      repl.setZero();
      repl(bd - 1) = 1.0;  // deterministic sigma_max eigenstate
      if (d > 2) {
        MatrixXcd pure_rho = MatrixXcd::Zero(d, d);
        pure_rho(0, 0) = 1.0;
        repl = ProductState::bloch_of(pure_rho, basis);
      }
    } else if (d == 2) {
      repl = -field / field.norm();
    } else {
      MatrixXcd op = MatrixXcd::Zero(d, d);
      for (int p = 1; p < d * d; ++p) op += field(p - 1) * basis.op(p);
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(op);
      VectorXcd psi = es.eigenvectors().col(0);
      MatrixXcd pure_rho = psi * psi.adjoint();
      repl = ProductState::bloch_of(pure_rho, basis);
    }
    if (field.dot(repl) <= cur_energy + 1e-12) out.alphas().row(u) = repl;
  }
  return out;
}

std::pair<double, ProductState> gs_direct(const PauliDecomposition& pd,
                                          int restarts, int iters,
                                          std::uint64_t seed) {
  const int n = pd.n(), d = pd.d();
  double best = std::numeric_limits<double>::max();
  ProductState best_state(n, d);
  for (int r = 0; r < std::max(1, restarts); ++r) {
    ProductState s = ProductState::random_pure(n, d, split_seed(seed, r));
    double energy = product_energy(pd, s);
    double step = 0.2;
    for (int it = 0; it < iters; ++it) {
      MatrixXd grad = product_energy_gradient(pd, s);
      double gn = grad.norm();
      if (gn < 1e-12) break;
      bool moved = false;
      for (int bt = 0; bt < 20; ++bt) {
        ProductState trial = s;
        trial.alphas() -= step * grad;
        trial.clip_to_physical();
        double e = product_energy(pd, trial);
        if (e < energy - 1e-14) {
          s = std::move(trial);
          energy = e;
          moved = true;
          step *= 1.3;
          break;
        }
        step *= 0.5;
      }
      if (!moved) break;
    }
    if (energy < best) {
      best = energy;
      best_state = s;
    }
  }
  if (restarts <= 0) best = product_energy(pd, best_state);
  return {best, best_state};
}

namespace {

// Explicit entanglement-breaking product-approximation bound, minimized over
// the measured-set size parameter.
double explicit_product_gap(const LocalHamiltonian& h) {
  const int n = h.n(), k = h.k();
  int factors = 0;
  for (int x = h.d(); x > 1; x >>= 1) ++factors;
  double best = std::numeric_limits<double>::infinity();
  for (int l = 1; l < std::max(2, n); ++l) {
    double b = (2.0 * k * l / n) * h.strength_l1() +
               (6.0 * k * std::pow(double(h.d()), 3 * k) * factors /
                std::sqrt(double(l))) *
                   std::pow(double(n), 0.5 * k) * h.strength_frobenius();
    best = std::min(best, b);
  }
  return best;
}

BudgetBreakdown budget_of(const HamiltonianCutDecomposition& hcd,
                          double gamma) {
  BudgetBreakdown b;
  b.regularity = hcd.product_gap_bound();
  b.diagonal = hcd.diagonal_correction();
  const int s = hcd.total_width();
  b.grid = s == 0 ? 0.0
                  : 8.0 * hcd.coeff_length() * double(hcd.n) * double(hcd.n) *
                        gamma * std::sqrt(double(s));
  return b;
}

}  // namespace

GsEstimateReport gs_estimate(const LocalHamiltonian& h, double eps,
                             double gamma, std::uint64_t seed,
                             const EstimateOptions& opts) {
  if (h.k() > 3) throw SizeLimitError("gs_estimate supports k <= 3 only");
  PauliDecomposition pd = pauli_decompose(h);
  HamiltonianCutDecomposition hcd = ham_cut_decompose(pd, eps, seed);
  hcd.strength_frobenius = h.strength_frobenius();
  GuessModel model(hcd, gamma);

  GsEstimateReport report{.witness = ProductState(h.n(), h.d())};
  report.eps = eps;
  report.gamma = gamma;
  report.budget = budget_of(hcd, gamma);

  FeasOptions fopts;
  fopts.inner_radius = kInnerRadiusConstant * gamma;

  bool have = false;
  double best = 0.0;
  VectorXd best_witness;
  std::int64_t feasible = 0, total = 0;
  try {
    model.enumerate(opts.enum_cap, [&](const std::vector<double>& values) {
      ++total;
      ConstraintSet cs = model.constraints_for(values);
      FeasibilityResult feas = check_feasible(cs, fopts);
      if (feas.status != FeasStatus::kFeasible) return;
      ++feasible;
      double value = model.estimate_value(values);
      if (!have || value < best - 1e-15) {
        have = true;
        best = value;
        best_witness = feas.witness;
      }
    });
  } catch (const EnumerationCapError&) {
    if (!opts.allow_direct_fallback) throw;
    std::cerr << "gs_estimate: enumeration cap exceeded, falling back to the "
                 "direct minimizer\n";
    auto [value, state] =
        gs_direct(pd, opts.direct_restarts, opts.direct_iters, seed);
    report.v_hat = value;
    report.witness = state;
    report.witness_energy = value;
    report.used_direct_fallback = true;
    return report;
  }
  if (!have)
    throw std::runtime_error(
        "gs_estimate: no feasible guess (internal invariant violation: every "
        "product state is feasible for some guess)");
  report.v_hat = best;
  report.feasible_guesses = feasible;
  report.total_guesses = total;
  report.witness = expand_witness(model.atlas(), best_witness, h.d());
  report.witness_energy = product_energy(pd, report.witness);
  return report;
}

FeEstimateReport fe_estimate(const LocalHamiltonian& h, double beta,
                             double eps, double gamma, std::uint64_t seed,
                             const EstimateOptions& opts) {
  if (beta <= 0) throw InputError("beta must be positive");
  if (h.k() > 3) throw SizeLimitError("fe_estimate supports k <= 3 only");
  PauliDecomposition pd = pauli_decompose(h);
  HamiltonianCutDecomposition hcd = ham_cut_decompose(pd, eps, seed);
  hcd.strength_frobenius = h.strength_frobenius();
  GuessModel model(hcd, gamma);

  FeEstimateReport report{.witness = ProductState(h.n(), h.d())};
  report.eps = eps;
  report.gamma = gamma;
  report.beta = beta;
  report.budget = budget_of(hcd, gamma);
  report.budget.product_gap = 2.0 * explicit_product_gap(h);

  FeasOptions fopts;
  fopts.inner_radius = kInnerRadiusConstant * gamma;
  double weight_sum = 0.0;
  for (double w : model.atom_weights()) weight_sum += w;

  bool have = false;
  double best = 0.0;
  VectorXd best_witness;
  double max_gap = 0.0;
  std::int64_t feasible = 0, total = 0;
  try {
    model.enumerate(opts.enum_cap, [&](const std::vector<double>& values) {
      ++total;
      ConstraintSet cs = model.constraints_for(values);
      FeasibilityResult feas = check_feasible(cs, fopts);
      if (feas.status != FeasStatus::kFeasible) return;
      ++feasible;
      MaxEntropyResult me =
          max_entropy(cs, model.atom_weights(), opts.entropy_tol, fopts);
      max_gap = std::max(max_gap, me.duality_gap);
      double value = model.estimate_value(values) - me.entropy / beta;
      if (!have || value < best - 1e-15) {
        have = true;
        best = value;
        best_witness = me.witness;
      }
    });
  } catch (const EnumerationCapError&) {
    if (!opts.allow_direct_fallback) throw;
    std::cerr << "fe_estimate: enumeration cap exceeded, falling back to the "
                 "direct minimizer\n";
    auto [value, state] =
        gs_direct(pd, opts.direct_restarts, opts.direct_iters, seed);
    (void)value;
    report.witness = state;
    report.witness_free_energy = product_free_energy(pd, state, beta);
    report.f_hat = report.witness_free_energy;
    report.used_direct_fallback = true;
    return report;
  }
  if (!have)
    throw std::runtime_error(
        "fe_estimate: no feasible guess (internal invariant violation)");
  report.f_hat = best;
  report.feasible_guesses = feasible;
  report.total_guesses = total;
  report.budget.thermal =
      (opts.entropy_tol * weight_sum + max_gap) / beta;
  ProductState witness = expand_witness(model.atlas(), best_witness, h.d());
  witness.clip_to_physical();
  report.witness = witness;
  report.witness_free_energy = product_free_energy(pd, witness, beta);
  return report;
}

}  // namespace qpsa
