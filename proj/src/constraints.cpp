#include "qpsa/constraints.hpp"

#include <algorithm>
#include <cmath>

#include "qpsa/errors.hpp"

namespace qpsa {

double AffineRow::value(const VectorXd& x) const {
  double v = 0.0;
  for (size_t i = 0; i < var_index.size(); ++i) v += weight[i] * x(var_index[i]);
  return v;
}

ConstraintSet::ConstraintSet(int atom_count, int d)
    : atoms_(atom_count), d_(d), bloch_dim_(d * d - 1) {}

VectorXd ConstraintSet::atom_block(const VectorXd& x, int atom) const {
  return x.segment(atom * bloch_dim_, bloch_dim_);
}

namespace {

// PSD violation of one atom block: ||alpha|| - 1 for qubits, -lambda_min(rho)
// for d > 2.
double psd_violation(const VectorXd& alpha, int d) {
  if (d == 2) return alpha.norm() - 1.0;
  PauliBasis basis(d);
  MatrixXcd rho = MatrixXcd::Identity(d, d);
  for (int p = 1; p < d * d; ++p) rho += alpha(p - 1) * basis.op(p);
  rho /= double(d);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  return -es.eigenvalues().minCoeff();
}

void clip_atom(VectorXd& alpha, int d) {
  if (d == 2) {
    double r = alpha.norm();
    if (r > 1.0) alpha /= r;
    return;
  }
  PauliBasis basis(d);
  MatrixXcd rho = MatrixXcd::Identity(d, d);
  for (int p = 1; p < d * d; ++p) rho += alpha(p - 1) * basis.op(p);
  rho /= double(d);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho);
  VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  ev /= ev.sum();
  MatrixXcd fixed = es.eigenvectors() * ev.asDiagonal() *
                    es.eigenvectors().adjoint();
  for (int p = 1; p < d * d; ++p)
    alpha(p - 1) = (basis.op(p) * fixed).trace().real();
}

}  // namespace

double ConstraintSet::violation(const VectorXd& x) const {
  double worst = 0.0;
  for (const auto& row : rows_) {
    double v = row.value(x);
    worst = std::max(worst, v - row.hi);
    worst = std::max(worst, row.lo - v);
  }
  for (int a = 0; a < atoms_; ++a)
    worst = std::max(worst, psd_violation(atom_block(x, a), d_));
  return worst;
}

namespace {

void project_balls(const ConstraintSet& cs, VectorXd& x) {
  const int bd = cs.bloch_dim();
  for (int a = 0; a < cs.atom_count(); ++a) {
    VectorXd alpha = x.segment(a * bd, bd);
    clip_atom(alpha, cs.d());
    x.segment(a * bd, bd) = alpha;
  }
}

// Euclidean projection onto the slab lo <= a.x <= hi.
void project_row(const AffineRow& row, VectorXd& x) {
  double v = row.value(x);
  double target = std::clamp(v, row.lo, row.hi);
  if (target == v) return;
  double norm_sq = 0.0;
  for (double w : row.weight) norm_sq += w * w;
  if (norm_sq < 1e-30) return;
  double shift = (target - v) / norm_sq;
  for (size_t i = 0; i < row.var_index.size(); ++i)
    x(row.var_index[i]) += shift * row.weight[i];
}

bool projection_phase(const ConstraintSet& cs, VectorXd& x, double tol,
                      int iters) {
  for (int it = 0; it < iters; ++it) {
    project_balls(cs, x);
    // Most violated row first, then a full sweep.
    int worst = -1;
    double worst_v = tol;
    for (size_t r = 0; r < cs.rows().size(); ++r) {
      double v = cs.rows()[r].value(x);
      double viol = std::max(v - cs.rows()[r].hi, cs.rows()[r].lo - v);
      if (viol > worst_v) {
        worst_v = viol;
        worst = int(r);
      }
    }
    if (worst < 0) {
      if (cs.violation(x) <= tol) return true;
      continue;
    }
    project_row(cs.rows()[worst], x);
    for (const auto& row : cs.rows()) project_row(row, x);
  }
  project_balls(cs, x);
  return cs.violation(x) <= tol;
}

}  // namespace

FeasibilityResult check_feasible(const ConstraintSet& cs,
                                 const FeasOptions& opts) {
  FeasibilityResult out;
  const int m = cs.var_count();
  VectorXd x = VectorXd::Zero(m);

  // Fast path: alternating projections from the maximally mixed point.
  if (projection_phase(cs, x, opts.tol, opts.projection_iters)) {
    out.status = FeasStatus::kFeasible;
    out.witness = x;
    return out;
  }

  // Ellipsoid search with separation oracles.
  const double outer_radius = cs.d() * std::sqrt(double(m));
  const double r_in = std::max(opts.inner_radius, 1e-9);
  const int max_iters =
      int(std::ceil(2.0 * m * (m + 1) * std::log(outer_radius / r_in))) + 64;
  MatrixXd shape = outer_radius * outer_radius * MatrixXd::Identity(m, m);
  VectorXd c = VectorXd::Zero(m);
  const int bd = cs.bloch_dim();
  PauliBasis basis_for_d(cs.d());

  for (int it = 0; it < max_iters; ++it) {
    out.iterations = it + 1;
    // Separation oracle: most violated constraint at the center.
    int worst_row = -1, worst_atom = -1;
    double worst_v = opts.tol;
    for (size_t r = 0; r < cs.rows().size(); ++r) {
      double v = cs.rows()[r].value(c);
      double viol = std::max(v - cs.rows()[r].hi, cs.rows()[r].lo - v);
      if (viol > worst_v) {
        worst_v = viol;
        worst_row = int(r);
        worst_atom = -1;
      }
    }
    for (int a = 0; a < cs.atom_count(); ++a) {
      double viol = psd_violation(cs.atom_block(c, a), cs.d());
      if (viol > worst_v) {
        worst_v = viol;
        worst_atom = a;
        worst_row = -1;
      }
    }
    if (worst_row < 0 && worst_atom < 0) {
      VectorXd w = c;
      if (cs.violation(w) <= 1e-7) {
        out.status = FeasStatus::kFeasible;
        out.witness = w;
        return out;
      }
    }

    // Build the cut g.y <= b violated at the center.
    VectorXd g = VectorXd::Zero(m);
    double b = 0.0;
    if (worst_row >= 0) {
      const auto& row = cs.rows()[worst_row];
      double v = row.value(c);
      if (v > row.hi) {
        for (size_t i = 0; i < row.var_index.size(); ++i)
          g(row.var_index[i]) = row.weight[i];
        b = row.hi;
      } else {
        for (size_t i = 0; i < row.var_index.size(); ++i)
          g(row.var_index[i]) = -row.weight[i];
        b = -row.lo;
      }
    } else if (worst_atom >= 0) {
      VectorXd alpha = cs.atom_block(c, worst_atom);
      if (cs.d() == 2) {
        VectorXd dir = alpha / std::max(alpha.norm(), 1e-15);
        g.segment(worst_atom * bd, bd) = dir;
        b = 1.0;
      } else {
        MatrixXcd rho = MatrixXcd::Identity(cs.d(), cs.d());
        for (int p = 1; p < cs.d() * cs.d(); ++p)
          rho += alpha(p - 1) * basis_for_d.op(p);
        rho /= double(cs.d());
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho);
        VectorXcd psi = es.eigenvectors().col(0);
        // Tr[psi psi^dag rho(alpha)] >= 0 is affine in alpha.
        for (int p = 1; p < cs.d() * cs.d(); ++p) {
          double w = std::real((psi.adjoint() * basis_for_d.op(p) * psi)(0));
          g(worst_atom * bd + (p - 1)) = -w;
        }
        b = 1.0;
      }
    } else {
      // Center numerically feasible at tol but not at 1e-7: tighten by a
      // plain projection polish.
      VectorXd w = c;
      if (projection_phase(cs, w, 1e-10, 200) && cs.violation(w) <= 1e-7) {
        out.status = FeasStatus::kFeasible;
        out.witness = w;
        return out;
      }
      out.status = FeasStatus::kUndecided;
      out.undecided_flag = true;
      return out;
    }

    const double gpg = g.dot(shape * g);
    if (gpg <= 1e-28) {
      out.status = FeasStatus::kUndecided;
      out.undecided_flag = true;
      return out;
    }
    const double sq = std::sqrt(gpg);
    const double alpha_cut = (g.dot(c) - b) / sq;
    if (alpha_cut >= 1.0) {  // ellipsoid and halfspace are disjoint
      out.status = FeasStatus::kInfeasible;
      return out;
    }
    const double md = double(m);
    const double acl = std::max(alpha_cut, -1.0 / md + 1e-12);
    const double tau = (1.0 + md * acl) / (md + 1.0);
    const double delta = (md * md / (md * md - 1.0)) * (1.0 - acl * acl);
    const double sigma = 2.0 * (1.0 + md * acl) / ((md + 1.0) * (1.0 + acl));
    VectorXd pg = shape * g / sq;
    c -= tau * pg;
    shape = delta * (shape - sigma * pg * pg.transpose());
    shape = 0.5 * (shape + shape.transpose()).eval();
  }
  out.status = FeasStatus::kUndecided;
  out.undecided_flag = true;
  return out;
}

// ---------------------------------------------------------------------------
// Maximum entropy.

namespace {

constexpr double kEigClamp = 1e-12;

double atom_entropy(const VectorXd& alpha, int d) {
  if (d == 2) {
    double r = std::min(alpha.norm(), 1.0 - kEigClamp);
    double p = 0.5 * (1.0 + r), q = 0.5 * (1.0 - r);
    return -p * std::log(p) - q * std::log(q);
  }
  PauliBasis basis(d);
  MatrixXcd rho = MatrixXcd::Identity(d, d);
  for (int p = 1; p < d * d; ++p) rho += alpha(p - 1) * basis.op(p);
  rho /= double(d);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (double ev : es.eigenvalues()) {
    double e = std::max(ev, kEigClamp);
    s -= e * std::log(e);
  }
  return s;
}

VectorXd atom_entropy_grad(const VectorXd& alpha, int d) {
  if (d == 2) {
    double r = alpha.norm();
    if (r < 1e-14) return VectorXd::Zero(alpha.size());
    double rc = std::min(r, 1.0 - kEigClamp);
    return -(std::atanh(rc) / r) * alpha;
  }
  PauliBasis basis(d);
  MatrixXcd rho = MatrixXcd::Identity(d, d);
  for (int p = 1; p < d * d; ++p) rho += alpha(p - 1) * basis.op(p);
  rho /= double(d);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho);
  VectorXd ev = es.eigenvalues().cwiseMax(kEigClamp);
  VectorXd lg = ev.array().log();
  MatrixXcd logrho = es.eigenvectors() * lg.asDiagonal().toDenseMatrix().cast<cplx>() *
                     es.eigenvectors().adjoint();
  VectorXd g(alpha.size());
  for (int p = 1; p < d * d; ++p)
    g(p - 1) = -(basis.op(p) * logrho).trace().real() / double(d);
  return g;
}

double weighted_entropy(const ConstraintSet& cs,
                        const std::vector<double>& w, const VectorXd& x) {
  double s = 0.0;
  for (int a = 0; a < cs.atom_count(); ++a)
    s += w[a] * atom_entropy(cs.atom_block(x, a), cs.d());
  return s;
}

VectorXd weighted_entropy_grad(const ConstraintSet& cs,
                               const std::vector<double>& w,
                               const VectorXd& x) {
  VectorXd g(cs.var_count());
  const int bd = cs.bloch_dim();
  for (int a = 0; a < cs.atom_count(); ++a)
    g.segment(a * bd, bd) = w[a] * atom_entropy_grad(cs.atom_block(x, a), cs.d());
  return g;
}

// Lagrangian upper bound on max_{y in K} g.y: minimize over row multipliers
// mu the value sum_r (mu_r > 0 ? mu_r hi_r : mu_r lo_r) + sum_a ||(g - A^T
// mu)_a||, by subgradient descent. Any mu gives a certified bound.
double linear_upper_bound(const ConstraintSet& cs, const VectorXd& g) {
  const int rows = int(cs.rows().size());
  const int bd = cs.bloch_dim();
  auto dual_value = [&](const VectorXd& mu, VectorXd* subgrad) {
    VectorXd resid = g;
    for (int r = 0; r < rows; ++r) {
      const auto& row = cs.rows()[r];
      for (size_t i = 0; i < row.var_index.size(); ++i)
        resid(row.var_index[i]) -= mu(r) * row.weight[i];
    }
    double value = 0.0;
    VectorXd unit = VectorXd::Zero(cs.var_count());
    for (int a = 0; a < cs.atom_count(); ++a) {
      double nrm = resid.segment(a * bd, bd).norm();
      value += nrm;
      if (nrm > 1e-15)
        unit.segment(a * bd, bd) = resid.segment(a * bd, bd) / nrm;
    }
    if (subgrad) {
      for (int r = 0; r < rows; ++r) {
        const auto& row = cs.rows()[r];
        double av = 0.0;
        for (size_t i = 0; i < row.var_index.size(); ++i)
          av += row.weight[i] * unit(row.var_index[i]);
        (*subgrad)(r) = (mu(r) > 0 ? row.hi : row.lo) - av;
      }
    }
    for (int r = 0; r < rows; ++r)
      value += mu(r) > 0 ? mu(r) * cs.rows()[r].hi : mu(r) * cs.rows()[r].lo;
    return value;
  };

  VectorXd mu = VectorXd::Zero(rows);
  double best = dual_value(mu, nullptr);
  if (rows == 0) return best;
  double step = 1.0;
  VectorXd sg(rows);
  for (int it = 0; it < 200; ++it) {
    double v = dual_value(mu, &sg);
    best = std::min(best, v);
    mu -= step / std::sqrt(double(it + 1)) * sg;
    // Clamping is unnecessary: mu is a free sign-split variable.
  }
  best = std::min(best, dual_value(mu, nullptr));
  return best;
}

}  // namespace

MaxEntropyResult max_entropy(const ConstraintSet& cs,
                             const std::vector<double>& atom_weights,
                             double tol, const FeasOptions& feas_opts) {
  if (int(atom_weights.size()) != cs.atom_count())
    throw InputError("atom weight count mismatch");
  double weight_sum = 0.0;
  for (double w : atom_weights) weight_sum += w;

  // Unconstrained: the maximally mixed assignment is exactly optimal.
  if (cs.rows().empty()) {
    MaxEntropyResult out;
    out.witness = VectorXd::Zero(cs.var_count());
    out.entropy = weight_sum * std::log(double(cs.d()));
    out.duality_gap = 0.0;
    return out;
  }

  FeasibilityResult feas = check_feasible(cs, feas_opts);
  if (feas.status != FeasStatus::kFeasible)
    throw InputError("max_entropy called on an infeasible constraint set");

  VectorXd x = feas.witness;
  const double gap_target = std::max(tol * std::max(weight_sum, 1.0), 1e-12);
  MaxEntropyResult out;

  double fx = weighted_entropy(cs, atom_weights, x);
  for (int it = 0; it < 2000; ++it) {
    out.iterations = it + 1;
    VectorXd g = weighted_entropy_grad(cs, atom_weights, x);
    double upper = linear_upper_bound(cs, g);
    out.duality_gap = upper - g.dot(x);
    if (out.duality_gap <= gap_target) break;

    // Frank-Wolfe style candidate: ball-optimal direction repaired into K.
    VectorXd y = VectorXd::Zero(cs.var_count());
    const int bd = cs.bloch_dim();
    for (int a = 0; a < cs.atom_count(); ++a) {
      VectorXd ga = g.segment(a * bd, bd);
      double nrm = ga.norm();
      if (nrm > 1e-15) y.segment(a * bd, bd) = ga / nrm;
    }
    bool y_ok = projection_phase(cs, y, feas_opts.tol, 300);

    bool progressed = false;
    if (y_ok && g.dot(y - x) > 0) {
      // Exact concave line search on the feasible segment.
      double lo = 0.0, hi = 1.0;
      for (int ls = 0; ls < 60; ++ls) {
        double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        double f1 = weighted_entropy(cs, atom_weights, x + m1 * (y - x));
        double f2 = weighted_entropy(cs, atom_weights, x + m2 * (y - x));
        if (f1 < f2)
          lo = m1;
        else
          hi = m2;
      }
      double theta = 0.5 * (lo + hi);
      VectorXd xn = x + theta * (y - x);
      double fn = weighted_entropy(cs, atom_weights, xn);
      if (fn > fx + 1e-15) {
        x = xn;
        fx = fn;
        progressed = true;
      }
    }
    if (!progressed) {
      // Projected gradient fallback with backtracking line search.
      double eta = 0.5;
      for (int bt = 0; bt < 30 && !progressed; ++bt, eta *= 0.5) {
        VectorXd z = x + eta * g;
        if (!projection_phase(cs, z, feas_opts.tol, 300)) continue;
        double fz = weighted_entropy(cs, atom_weights, z);
        if (fz > fx + 1e-15) {
          x = z;
          fx = fz;
          progressed = true;
        }
      }
      if (!progressed) break;  // stationary; gap already reported
    }
  }

  out.witness = x;
  out.entropy = fx;
  return out;
}

}  // namespace qpsa
