#include "qpsa/cut.hpp"

#include <algorithm>
#include <cmath>

#include "qpsa/errors.hpp"
#include "qpsa/rng.hpp"

namespace qpsa {

namespace {

int countr_zero(std::uint64_t x) {
  int c = 0;
  while (!(x & 1)) {
    x >>= 1;
    ++c;
  }
  return c;
}

std::vector<int> mask_to_set(std::uint64_t mask, int n) {
  std::vector<int> out;
  for (int i = 0; i < n; ++i)
    if (mask & (std::uint64_t(1) << i)) out.push_back(i);
  return out;
}

// Deterministic tie-break: prefer smaller cardinality, then lexicographically
// smaller sorted index list.
bool set_less(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

bool pair_less(const std::vector<int>& s1, const std::vector<int>& t1,
               const std::vector<int>& s2, const std::vector<int>& t2) {
  if (set_less(s1, s2)) return true;
  if (set_less(s2, s1)) return false;
  return set_less(t1, t2);
}

}  // namespace

CutResult cut_norm_exact(const MatrixXd& m) {
  const int n = int(m.rows());
  if (n > kCutNormExactCap)
    throw SizeLimitError("cut_norm_exact capped at n <= 20; use cut_norm_heuristic");
  const int cols = int(m.cols());
  VectorXd colsum = VectorXd::Zero(cols);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff() * n * cols);
  const double tie = 1e-12 * scale;

  CutResult best;  // 0 at S = T = {} is a valid starting point
  auto consider = [&](double value, std::uint64_t smask, bool negate) {
    if (value < best.value - tie) return;
    const bool strictly_better = value > best.value + tie;
    std::vector<int> s = mask_to_set(smask, n);
    std::vector<int> t;
    for (int j = 0; j < cols; ++j) {
      double c = negate ? -colsum(j) : colsum(j);
      if (c > tie) t.push_back(j);
    }
    if (strictly_better || pair_less(s, t, best.s, best.t)) {
      best.value = std::max(best.value, value);
      best.s = std::move(s);
      best.t = std::move(t);
    }
  };

  std::uint64_t smask = 0;
  const std::uint64_t total = std::uint64_t(1) << n;
  for (std::uint64_t step = 0;; ++step) {
    double pos = 0, neg = 0;
    for (int j = 0; j < cols; ++j) {
      if (colsum(j) > 0) pos += colsum(j);
      if (colsum(j) < 0) neg -= colsum(j);
    }
    consider(pos, smask, false);
    consider(neg, smask, true);
    if (step + 1 == total) break;
    const int flip = countr_zero(step + 1);
    const std::uint64_t bit = std::uint64_t(1) << flip;
    if (smask & bit)
      colsum -= m.row(flip);
    else
      colsum += m.row(flip);
    smask ^= bit;
  }
  return best;
}

CutResult cut_norm_heuristic(const MatrixXd& m, int restarts,
                             std::uint64_t seed) {
  const int n = int(m.rows());
  const int cols = int(m.cols());
  Rng rng(split_seed(seed, "cutheur"));
  CutResult best;

  auto ascend = [&](VectorXd t, double sign) {
    VectorXd s = VectorXd::Zero(n);
    double value = 0.0;
    for (int round = 0; round < 200; ++round) {
      VectorXd c = sign * (m * t);
      for (int i = 0; i < n; ++i) s(i) = c(i) > 0 ? 1.0 : 0.0;
      VectorXd r = sign * (m.transpose() * s);
      for (int j = 0; j < cols; ++j) t(j) = r(j) > 0 ? 1.0 : 0.0;
      double v = sign * s.dot(m * t);
      if (v <= value + 1e-14) {
        value = std::max(value, v);
        break;
      }
      value = v;
    }
    if (value > best.value) {
      best.value = value;
      best.s.clear();
      best.t.clear();
      for (int i = 0; i < n; ++i)
        if (s(i) > 0.5) best.s.push_back(i);
      for (int j = 0; j < cols; ++j)
        if (t(j) > 0.5) best.t.push_back(j);
    }
  };

  for (int r = 0; r < std::max(1, restarts); ++r) {
    VectorXd t(cols);
    if (r == 0)
      t.setOnes();
    else
      for (int j = 0; j < cols; ++j) t(j) = rng.next_below(2) ? 1.0 : 0.0;
    ascend(t, +1.0);
    ascend(t, -1.0);
  }
  return best;
}

double inf_one_norm_exact(const MatrixXd& m) {
  const int n = int(m.rows());
  if (n > kInfOneExactCap)
    throw SizeLimitError("inf_one_norm_exact capped at n <= 20");
  const int cols = int(m.cols());
  // x_0 fixed to +1 by symmetry.
  VectorXd colsum = m.row(0).transpose();
  for (int i = 1; i < n; ++i) colsum += m.row(i);  // start at x = all ones
  std::uint64_t xmask = (std::uint64_t(1) << (n - 1)) - 1;  // bits for rows 1..n-1
  double best = colsum.cwiseAbs().sum();
  const std::uint64_t total = std::uint64_t(1) << (n - 1);
  for (std::uint64_t step = 1; step < total; ++step) {
    const int flip = countr_zero(step) + 1;
    const std::uint64_t bit = std::uint64_t(1) << (flip - 1);
    if (xmask & bit)
      colsum -= 2.0 * m.row(flip);
    else
      colsum += 2.0 * m.row(flip);
    xmask ^= bit;
    best = std::max(best, colsum.cwiseAbs().sum());
  }
  return best;
}

double inf_one_norm_upper(const MatrixXd& m) {
  Eigen::JacobiSVD<MatrixXd> svd(m);
  return double(m.rows()) * svd.singularValues()(0);
}

double CutDecomposition::coeff_sq_sum() const {
  double s = 0.0;
  for (const auto& p : pieces) s += p.coeff * p.coeff;
  return s;
}

MatrixXd CutDecomposition::residual_matrix(const MatrixXd& m) const {
  MatrixXd w = m;
  for (const auto& p : pieces)
    for (int u : p.sides[0])
      for (int v : p.sides[1]) w(u, v) -= p.coeff;
  return w;
}

namespace {

void matrix_residual_stats(const MatrixXd& w, CutDecomposition& out,
                           std::uint64_t seed) {
  const int n = int(w.rows());
  out.residual.frobenius = w.norm();
  out.residual.max_abs_diag = w.diagonal().cwiseAbs().maxCoeff();
  if (n <= kCutNormExactCap) {
    CutResult c = cut_norm_exact(w);
    out.residual.cut_value = c.value;
    out.residual.cut_exact = true;
  } else {
    CutResult c = cut_norm_heuristic(w, 32, seed);
    out.residual.cut_value = c.value;
    out.residual.cut_exact = false;
  }
  MatrixXd wo = w;
  wo.diagonal().setZero();
  if (n <= kInfOneExactCap) {
    out.residual.inf_one_offdiag = inf_one_norm_exact(wo);
    out.residual.inf_one_exact = true;
  } else {
    out.residual.inf_one_offdiag = inf_one_norm_upper(wo);
    out.residual.inf_one_exact = false;
  }
}

}  // namespace

CutDecomposition fk_decompose(const MatrixXd& m, double eps,
                              std::uint64_t seed) {
  if (eps <= 0) throw InputError("eps must be positive");
  const int n = int(m.rows());
  CutDecomposition out;
  out.n = n;
  out.k = 2;
  out.input_frobenius = m.norm();
  out.target = eps * n * out.input_frobenius;
  const int width_cap = int(std::ceil(kWidthCapConstant / (eps * eps)));

  MatrixXd w = m;
  for (int iter = 0;; ++iter) {
    CutResult cut = n <= kCutNormExactCap
                        ? cut_norm_exact(w)
                        : cut_norm_heuristic(w, 32, split_seed(seed, iter));
    if (cut.value <= out.target + 1e-12) {
      out.target_met = true;
      break;
    }
    if (iter >= width_cap) {
      out.target_met = false;
      break;
    }
    if (cut.s.empty() || cut.t.empty()) {  // no progress possible
      out.target_met = false;
      break;
    }
    double sum = 0.0;
    for (int u : cut.s)
      for (int v : cut.t) sum += w(u, v);
    const double coeff = sum / (double(cut.s.size()) * double(cut.t.size()));
    for (int u : cut.s)
      for (int v : cut.t) w(u, v) -= coeff;
    CutPiece piece;
    piece.sides = {cut.s, cut.t};
    piece.coeff = coeff;
    out.pieces.push_back(std::move(piece));
    out.frobenius_log.push_back(w.norm());
  }
  matrix_residual_stats(w, out, split_seed(seed, "stats"));
  return out;
}

// ---------------------------------------------------------------------------
// Tensor (k = 3) machinery.

namespace {

// Zero all entries with a repeated vertex index.
ColorTensor zero_repeated(const ColorTensor& m) {
  ColorTensor out = m;
  const int n = m.n;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      out.values[(std::size_t(a) * n + a) * n + b] = 0.0;
      out.values[(std::size_t(a) * n + b) * n + a] = 0.0;
      out.values[(std::size_t(b) * n + a) * n + a] = 0.0;
    }
  return out;
}

MatrixXd tensor_as_matrix(const ColorTensor& m) {
  MatrixXd out(m.n, m.n);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) out(i, j) = m.values[std::size_t(i) * m.n + j];
  return out;
}

}  // namespace

double tensor_inf_one_exact(const ColorTensor& m, bool diag_free) {
  if (m.k == 2) {
    MatrixXd w = tensor_as_matrix(m);
    if (diag_free) w.diagonal().setZero();
    return inf_one_norm_exact(w);
  }
  const int n = m.n;
  if (n > kTensorInfOneExactCap)
    throw SizeLimitError("tensor_inf_one_exact capped at n <= 14");
  const ColorTensor src = diag_free ? zero_repeated(m) : m;
  // A(x1)[i2, i3] = sum_i1 x1_i1 W[i1, i2, i3]; Gray walk over x1 with the
  // inner maximization over x2 done by a second Gray walk on column sums.
  MatrixXd a = MatrixXd::Zero(n, n);
  for (int i1 = 0; i1 < n; ++i1)
    for (int i2 = 0; i2 < n; ++i2)
      for (int i3 = 0; i3 < n; ++i3)
        a(i2, i3) += src.values[(std::size_t(i1) * n + i2) * n + i3];

  auto inner = [&](const MatrixXd& mat) {
    VectorXd colsum = VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) colsum += mat.row(i).transpose();
    double best = colsum.cwiseAbs().sum();
    std::uint64_t mask = (std::uint64_t(1) << n) - 1;
    const std::uint64_t total = std::uint64_t(1) << (n - 1);
    for (std::uint64_t step = 1; step < total; ++step) {
      const int flip = countr_zero(step) + 1;
      const std::uint64_t bit = std::uint64_t(1) << flip;
      if (mask & bit)
        colsum -= 2.0 * mat.row(flip).transpose();
      else
        colsum += 2.0 * mat.row(flip).transpose();
      mask ^= bit;
      best = std::max(best, colsum.cwiseAbs().sum());
    }
    return best;
  };

  double best = inner(a);
  std::uint64_t x1 = (std::uint64_t(1) << n) - 1;
  const std::uint64_t total = std::uint64_t(1) << (n - 1);
  for (std::uint64_t step = 1; step < total; ++step) {
    const int flip = countr_zero(step) + 1;
    const std::uint64_t bit = std::uint64_t(1) << flip;
    const double sgn = (x1 & bit) ? -2.0 : 2.0;
    for (int i2 = 0; i2 < n; ++i2)
      for (int i3 = 0; i3 < n; ++i3)
        a(i2, i3) += sgn * src.values[(std::size_t(flip) * n + i2) * n + i3];
    x1 ^= bit;
    best = std::max(best, inner(a));
  }
  return best;
}

CutResult tensor_cut_find(const ColorTensor& m, int restarts,
                          std::uint64_t seed,
                          std::vector<std::vector<int>>* sides) {
  const int n = m.n;
  auto box_sum = [&](const std::vector<int>& s1, const std::vector<int>& s2,
                     const std::vector<int>& s3) {
    double sum = 0.0;
    for (int a : s1)
      for (int b : s2)
        for (int c : s3) sum += m.values[(std::size_t(a) * n + b) * n + c];
    return sum;
  };

  std::vector<std::vector<int>> best_sides(3);
  double best = 0.0;

  if (n <= kTensorExactCap) {
    // Exact: enumerate S1, then an exact matrix cut on the contraction.
    const std::uint64_t total = std::uint64_t(1) << n;
    MatrixXd b = MatrixXd::Zero(n, n);
    std::uint64_t mask = 0;
    for (std::uint64_t step = 0;; ++step) {
      if (mask) {
        CutResult inner = cut_norm_exact(b);
        if (inner.value > best + 1e-15) {
          best = inner.value;
          best_sides[0] = mask_to_set(mask, n);
          best_sides[1] = inner.s;
          best_sides[2] = inner.t;
          // cut_norm_exact reports max(A+, (-A)+); recover the sign later.
        }
      }
      if (step + 1 == total) break;
      const int flip = countr_zero(step + 1);
      const std::uint64_t bit = std::uint64_t(1) << flip;
      const double sgn = (mask & bit) ? -1.0 : 1.0;
      for (int i2 = 0; i2 < n; ++i2)
        for (int i3 = 0; i3 < n; ++i3)
          b(i2, i3) += sgn * m.values[(std::size_t(flip) * n + i2) * n + i3];
      mask ^= bit;
    }
  } else {
    Rng rng(split_seed(seed, "tcut"));
    for (int r = 0; r < std::max(1, restarts); ++r) {
      for (double sign : {+1.0, -1.0}) {
        std::vector<std::vector<int>> cur(3);
        for (int side = 1; side <= 2; ++side) {
          cur[side].clear();
          for (int i = 0; i < n; ++i)
            if (r == 0 || rng.next_below(2)) cur[side].push_back(i);
        }
        double value = 0.0;
        for (int round = 0; round < 60; ++round) {
          bool changed = false;
          for (int side = 0; side < 3; ++side) {
            std::vector<int> next;
            for (int i = 0; i < n; ++i) {
              std::vector<int> probe = {i};
              const std::vector<int>& a = side == 0 ? probe : cur[0];
              const std::vector<int>& b2 = side == 1 ? probe : cur[1];
              const std::vector<int>& c = side == 2 ? probe : cur[2];
              if (sign * box_sum(side == 0 ? probe : a, b2, c) > 0)
                next.push_back(i);
            }
            if (next != cur[side]) changed = true;
            cur[side] = std::move(next);
          }
          double v = sign * box_sum(cur[0], cur[1], cur[2]);
          if (!changed || v <= value + 1e-14) {
            value = std::max(value, v);
            break;
          }
          value = v;
        }
        if (value > best) {
          best = value;
          best_sides = cur;
        }
      }
    }
  }
  if (sides) *sides = best_sides;
  CutResult out;
  out.value = best;
  if (!best_sides[0].empty()) out.s = best_sides[0];
  if (best_sides.size() > 1 && !best_sides[1].empty()) out.t = best_sides[1];
  return out;
}

CutDecomposition tensor_fk_decompose(const ColorTensor& m, double eps,
                                     std::uint64_t seed) {
  if (eps <= 0) throw InputError("eps must be positive");
  if (m.k != 2 && m.k != 3)
    throw InputError("tensor decomposition supports k in {2, 3} only");
  if (m.k == 2) {
    return fk_decompose(tensor_as_matrix(m), eps, seed);
  }
  const int n = m.n;
  CutDecomposition out;
  out.n = n;
  out.k = 3;
  out.input_frobenius = m.frobenius();
  const double sqrt_n = std::pow(double(n), 1.5);  // N^{1/2}, N = n^3
  out.target = eps * sqrt_n * out.input_frobenius;
  const int width_cap =
      int(std::ceil(kWidthCapConstant / std::pow(eps, 2.0 * m.k - 2.0)));

  ColorTensor w = m;
  for (int iter = 0;; ++iter) {
    std::vector<std::vector<int>> sides;
    CutResult cut = tensor_cut_find(w, 32, split_seed(seed, iter), &sides);
    if (cut.value <= out.target + 1e-12) {
      out.target_met = true;
      break;
    }
    if (iter >= width_cap) {
      out.target_met = false;
      break;
    }
    if (sides[0].empty() || sides[1].empty() || sides[2].empty()) {
      out.target_met = false;
      break;
    }
    double sum = 0.0;
    for (int a : sides[0])
      for (int b : sides[1])
        for (int c : sides[2]) sum += w.values[(std::size_t(a) * n + b) * n + c];
    const double box =
        double(sides[0].size()) * double(sides[1].size()) * double(sides[2].size());
    const double coeff = sum / box;
    for (int a : sides[0])
      for (int b : sides[1])
        for (int c : sides[2])
          w.values[(std::size_t(a) * n + b) * n + c] -= coeff;
    CutPiece piece;
    piece.sides = sides;
    piece.coeff = coeff;
    out.pieces.push_back(std::move(piece));
    out.frobenius_log.push_back(w.frobenius());
  }

  out.residual.frobenius = w.frobenius();
  double maxdiag = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      maxdiag = std::max(maxdiag,
                         std::abs(w.values[(std::size_t(a) * n + a) * n + b]));
      maxdiag = std::max(maxdiag,
                         std::abs(w.values[(std::size_t(a) * n + b) * n + a]));
      maxdiag = std::max(maxdiag,
                         std::abs(w.values[(std::size_t(b) * n + a) * n + a]));
    }
  out.residual.max_abs_diag = maxdiag;
  {
    std::vector<std::vector<int>> sides;
    CutResult c = tensor_cut_find(w, 32, split_seed(seed, "stats"), &sides);
    out.residual.cut_value = c.value;
    out.residual.cut_exact = n <= kTensorExactCap;
  }
  if (n <= kTensorInfOneExactCap) {
    out.residual.inf_one_offdiag = tensor_inf_one_exact(w, true);
    out.residual.inf_one_exact = true;
  } else {
    double abs_sum = 0.0;
    for (double v : zero_repeated(w).values) abs_sum += std::abs(v);
    out.residual.inf_one_offdiag = std::min(abs_sum, sqrt_n * w.frobenius());
    out.residual.inf_one_exact = false;
  }
  return out;
}

}  // namespace qpsa
