#include "qpsa/dense.hpp"

#include <algorithm>
#include <cmath>

#include "qpsa/errors.hpp"
#include "qpsa/rng.hpp"

namespace qpsa {

namespace {

std::int64_t dim_of(int n, int d) {
  std::int64_t dim = 1;
  for (int i = 0; i < n; ++i) {
    dim *= d;
    if (dim > kPureStateDimCap) return dim;  // caller checks
  }
  return dim;
}

// Strides of the support qudits and base offsets of every configuration of
// the complement, for a big-endian d-ary index.
struct TermIndexing {
  std::vector<std::int64_t> stride;   // per support qudit
  std::int64_t subdim = 1;            // d^k
  std::vector<std::int64_t> rest_stride;
  std::int64_t rest_dim = 1;

  TermIndexing(const std::vector<int>& support, int n, int d) {
    const int k = int(support.size());
    stride.resize(k);
    for (int j = 0; j < k; ++j) {
      std::int64_t s = 1;
      for (int q = support[j] + 1; q < n; ++q) s *= d;
      stride[j] = s;
      subdim *= d;
    }
    std::vector<bool> on(n, false);
    for (int v : support) on[v] = true;
    for (int q = 0; q < n; ++q)
      if (!on[q]) {
        std::int64_t s = 1;
        for (int p = q + 1; p < n; ++p) s *= d;
        rest_stride.push_back(s);
        rest_dim *= d;
      }
  }

  std::int64_t rest_offset(std::int64_t r, int d) const {
    std::int64_t off = 0;
    for (int j = int(rest_stride.size()) - 1; j >= 0; --j) {
      off += (r % d) * rest_stride[j];
      r /= d;
    }
    return off;
  }

  std::int64_t local_offset(std::int64_t idx, int d) const {
    std::int64_t off = 0;
    for (int j = int(stride.size()) - 1; j >= 0; --j) {
      off += (idx % d) * stride[j];
      idx /= d;
    }
    return off;
  }
};

}  // namespace

DenseState DenseState::pure(VectorXcd psi, int n, int d) {
  std::int64_t dim = dim_of(n, d);
  if (dim > kPureStateDimCap)
    throw SizeLimitError("pure dense state exceeds the d^n <= 2^22 cap");
  if (psi.size() != dim) throw InputError("state vector has wrong dimension");
  double norm = psi.norm();
  if (std::abs(norm - 1.0) > 1e-9) throw InputError("state vector not unit norm");
  DenseState s;
  s.pure_ = true;
  s.n_ = n;
  s.d_ = d;
  s.dim_ = dim;
  s.psi_ = std::move(psi);
  return s;
}

DenseState DenseState::mixed(MatrixXcd rho, int n, int d) {
  std::int64_t dim = dim_of(n, d);
  if (dim > kMixedStateDimCap)
    throw SizeLimitError("mixed dense state exceeds the d^n <= 2^12 cap");
  if (rho.rows() != dim || rho.cols() != dim)
    throw InputError("density matrix has wrong dimension");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-9)
    throw InputError("density matrix not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > 1e-9)
    throw InputError("density matrix trace != 1");
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -1e-9)
    throw InputError("density matrix not PSD within 1e-9");
  DenseState s;
  s.pure_ = false;
  s.n_ = n;
  s.d_ = d;
  s.dim_ = dim;
  s.rho_ = std::move(rho);
  return s;
}

MatrixXcd DenseState::density() const {
  if (!pure_) return rho_;
  if (dim_ > kMixedStateDimCap)
    throw SizeLimitError("density() exceeds the d^n <= 2^12 mixed cap");
  return psi_ * psi_.adjoint();
}

MatrixXcd assemble_dense(const LocalHamiltonian& h) {
  std::int64_t dim = dim_of(h.n(), h.d());
  if (dim > kMixedStateDimCap)
    throw SizeLimitError("assemble_dense exceeds the d^n <= 2^12 cap");
  MatrixXcd out = MatrixXcd::Zero(dim, dim);
  const int n = h.n(), d = h.d();
  for (const auto& term : h.terms()) {
    TermIndexing ix(term.support, n, d);
    for (std::int64_t rest = 0; rest < ix.rest_dim; ++rest) {
      const std::int64_t off = ix.rest_offset(rest, d);
      for (std::int64_t r = 0; r < ix.subdim; ++r) {
        const std::int64_t row = off + ix.local_offset(r, d);
        for (std::int64_t c = 0; c < ix.subdim; ++c) {
          const cplx v = term.matrix(r, c);
          if (v == cplx(0, 0)) continue;
          out(row, off + ix.local_offset(c, d)) += v;
        }
      }
    }
  }
  return out;
}

void apply_hamiltonian(const LocalHamiltonian& h, const VectorXcd& x,
                       VectorXcd& y) {
  const int n = h.n(), d = h.d();
  const std::int64_t dim = x.size();
  y.setZero(dim);
  for (const auto& term : h.terms()) {
    TermIndexing ix(term.support, n, d);
    std::vector<std::int64_t> local(ix.subdim);
    for (std::int64_t r = 0; r < ix.subdim; ++r)
      local[r] = ix.local_offset(r, d);
    std::vector<cplx> amp(ix.subdim);
    for (std::int64_t rest = 0; rest < ix.rest_dim; ++rest) {
      const std::int64_t off = ix.rest_offset(rest, d);
      for (std::int64_t r = 0; r < ix.subdim; ++r) amp[r] = x(off + local[r]);
      for (std::int64_t r = 0; r < ix.subdim; ++r) {
        cplx acc(0, 0);
        for (std::int64_t c = 0; c < ix.subdim; ++c)
          acc += term.matrix(r, c) * amp[c];
        y(off + local[r]) += acc;
      }
    }
  }
}

namespace {

// Lanczos with full reorthogonalization for the minimum eigenpair.
std::pair<double, VectorXcd> lanczos_ground(const LocalHamiltonian& h,
                                            std::int64_t dim) {
  Rng rng(0x51a3c0 ^ dim);
  VectorXcd v(dim);
  for (std::int64_t i = 0; i < dim; ++i)
    v(i) = cplx(rng.next_gaussian(), rng.next_gaussian());
  v.normalize();
  const int max_iters = std::min<std::int64_t>(dim, 320);
  std::vector<VectorXcd> basis;
  std::vector<double> alpha, beta;
  VectorXcd w(dim);
  basis.push_back(v);
  for (int it = 0; it < max_iters; ++it) {
    apply_hamiltonian(h, basis.back(), w);
    double a = std::real(basis.back().dot(w));
    alpha.push_back(a);
    w -= a * basis.back();
    if (basis.size() > 1) w -= beta.back() * basis[basis.size() - 2];
    // Full reorthogonalization keeps the small tridiagonal problem honest.
    for (const auto& b : basis) w -= b.dot(w) * b;
    double bnorm = w.norm();
    // Solve the tridiagonal problem so far.
    int m = int(alpha.size());
    MatrixXd t = MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      t(i, i) = alpha[i];
      if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(t);
    double lam = es.eigenvalues()(0);
    // Residual estimate |beta_m * y_m|.
    double resid = bnorm * std::abs(es.eigenvectors()(m - 1, 0));
    if (resid < 1e-10 || bnorm < 1e-12 || it == max_iters - 1) {
      VectorXcd ground = VectorXcd::Zero(dim);
      for (int i = 0; i < m; ++i) ground += es.eigenvectors()(i, 0) * basis[i];
      ground.normalize();
      return {lam, ground};
    }
    beta.push_back(bnorm);
    basis.push_back(w / bnorm);
  }
  throw std::runtime_error("lanczos did not converge");
}

}  // namespace

std::pair<double, DenseState> exact_ground(const LocalHamiltonian& h) {
  std::int64_t dim = dim_of(h.n(), h.d());
  if (dim > kPureStateDimCap)
    throw SizeLimitError("exact_ground exceeds the d^n <= 2^22 cap");
  double energy;
  VectorXcd ground;
  if (h.term_count() == 0) {
    energy = 0.0;
    ground = VectorXcd::Zero(dim);
    ground(0) = 1.0;
  } else if (dim <= kDenseEigenDimCap) {
    MatrixXcd m = assemble_dense(h);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m);
    energy = es.eigenvalues()(0);
    ground = es.eigenvectors().col(0);
  } else {
    std::tie(energy, ground) = lanczos_ground(h, dim);
  }
  VectorXcd hv(dim);
  apply_hamiltonian(h, ground, hv);
  double resid = (hv - energy * ground).norm();
  if (resid > 1e-8)
    throw std::runtime_error("ground-state residual " + std::to_string(resid) +
                             " exceeds 1e-8");
  return {energy, DenseState::pure(std::move(ground), h.n(), h.d())};
}

double exact_free_energy(const LocalHamiltonian& h, double beta) {
  if (beta <= 0) throw InputError("beta must be positive");
  std::int64_t dim = dim_of(h.n(), h.d());
  if (dim > kMixedStateDimCap)
    throw SizeLimitError("exact_free_energy exceeds the d^n <= 2^12 cap");
  VectorXd evs;
  if (h.term_count() == 0) {
    evs = VectorXd::Zero(dim);
  } else {
    MatrixXcd m = assemble_dense(h);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m, Eigen::EigenvaluesOnly);
    evs = es.eigenvalues();
  }
  const double emin = evs.minCoeff();
  double z = 0.0;
  for (double e : evs) z += std::exp(-beta * (e - emin));
  return emin - std::log(z) / beta;
}

DenseState gibbs_state(const LocalHamiltonian& h, double beta) {
  if (beta <= 0) throw InputError("beta must be positive");
  std::int64_t dim = dim_of(h.n(), h.d());
  if (dim > kMixedStateDimCap)
    throw SizeLimitError("gibbs_state exceeds the d^n <= 2^12 cap");
  MatrixXcd m = h.term_count() ? assemble_dense(h)
                               : MatrixXcd::Zero(dim, dim);
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(m);
  VectorXd evs = es.eigenvalues();
  const double emin = evs.minCoeff();
  VectorXd w(dim);
  for (std::int64_t i = 0; i < dim; ++i) w(i) = std::exp(-beta * (evs(i) - emin));
  w /= w.sum();
  MatrixXcd rho = es.eigenvectors() * w.asDiagonal() *
                  es.eigenvectors().adjoint();
  // Symmetrize away roundoff before the constructor's checks.
  rho = 0.5 * (rho + MatrixXcd(rho.adjoint()));
  return DenseState::mixed(std::move(rho), h.n(), h.d());
}

double von_neumann_entropy(const MatrixXcd& rho) {
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (double ev : es.eigenvalues())
    if (ev > 1e-15) s -= ev * std::log(ev);
  return s;
}

MatrixXcd partial_trace_keep(const MatrixXcd& rho, int n, int d,
                             const std::vector<int>& keep) {
  const int m = int(keep.size());
  std::int64_t kept_dim = 1;
  for (int i = 0; i < m; ++i) kept_dim *= d;
  std::vector<std::int64_t> keep_stride(m);
  for (int j = 0; j < m; ++j) {
    std::int64_t s = 1;
    for (int q = keep[j] + 1; q < n; ++q) s *= d;
    keep_stride[j] = s;
  }
  std::vector<bool> kept(n, false);
  for (int v : keep) kept[v] = true;
  std::vector<std::int64_t> rest_stride;
  for (int q = 0; q < n; ++q)
    if (!kept[q]) {
      std::int64_t s = 1;
      for (int p = q + 1; p < n; ++p) s *= d;
      rest_stride.push_back(s);
    }
  const int rest = int(rest_stride.size());
  std::int64_t rest_dim = 1;
  for (int i = 0; i < rest; ++i) rest_dim *= d;

  MatrixXcd out = MatrixXcd::Zero(kept_dim, kept_dim);
  for (std::int64_t a = 0; a < kept_dim; ++a) {
    std::int64_t abase = 0;
    std::int64_t aa = a;
    for (int j = m - 1; j >= 0; --j) {
      abase += (aa % d) * keep_stride[j];
      aa /= d;
    }
    for (std::int64_t b = 0; b < kept_dim; ++b) {
      std::int64_t bbase = 0;
      std::int64_t bb = b;
      for (int j = m - 1; j >= 0; --j) {
        bbase += (bb % d) * keep_stride[j];
        bb /= d;
      }
      cplx acc(0, 0);
      for (std::int64_t r = 0; r < rest_dim; ++r) {
        std::int64_t roff = 0;
        std::int64_t rr = r;
        for (int j = rest - 1; j >= 0; --j) {
          roff += (rr % d) * rest_stride[j];
          rr /= d;
        }
        acc += rho(abase + roff, bbase + roff);
      }
      out(a, b) = acc;
    }
  }
  return out;
}

double dense_energy(const LocalHamiltonian& h, const DenseState& state) {
  if (state.is_pure()) {
    VectorXcd hv(state.dim());
    apply_hamiltonian(h, state.vector(), hv);
    return std::real(state.vector().dot(hv));
  }
  MatrixXcd m = assemble_dense(h);
  return (m * state.matrix()).trace().real();
}

ProductState marginals_of(const DenseState& state) {
  const int n = state.n(), d = state.d();
  PauliBasis basis(d);
  ProductState s(n, d);
  MatrixXcd rho = state.density();
  for (int u = 0; u < n; ++u) {
    MatrixXcd ru = partial_trace_keep(rho, n, d, {u});
    s.alphas().row(u) = ProductState::bloch_of(ru, basis).transpose();
  }
  return s;
}

}  // namespace qpsa
