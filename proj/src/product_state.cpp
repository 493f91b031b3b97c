#include "qpsa/product_state.hpp"

#include "qpsa/errors.hpp"
#include "qpsa/rng.hpp"

namespace qpsa {

ProductState::ProductState(int n, int d) : n_(n), d_(d) {
  alphas_ = MatrixXd::Zero(n, d * d - 1);
}

MatrixXcd ProductState::density(int u) const {
  PauliBasis basis(d_);
  MatrixXcd rho = MatrixXcd::Identity(d_, d_);
  for (int p = 1; p < d_ * d_; ++p) rho += alphas_(u, p - 1) * basis.op(p);
  return rho / double(d_);
}

bool ProductState::is_valid(double tol) const {
  if (d_ == 2) {
    for (int u = 0; u < n_; ++u)
      if (alphas_.row(u).norm() > 1.0 + tol) return false;
    return true;
  }
  for (int u = 0; u < n_; ++u) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(density(u),
                                                Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tol) return false;
  }
  return true;
}

void ProductState::clip_to_physical() {
  if (d_ == 2) {
    for (int u = 0; u < n_; ++u) {
      double r = alphas_.row(u).norm();
      if (r > 1.0) alphas_.row(u) /= r;
    }
    return;
  }
  PauliBasis basis(d_);
  for (int u = 0; u < n_; ++u) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(density(u));
    VectorXd ev = es.eigenvalues().cwiseMax(0.0);
    ev /= ev.sum();
    MatrixXcd rho = es.eigenvectors() * ev.asDiagonal() *
                    es.eigenvectors().adjoint();
    alphas_.row(u) = bloch_of(rho, basis).transpose();
  }
}

double ProductState::entropy() const {
  double total = 0.0;
  if (d_ == 2) {
    for (int u = 0; u < n_; ++u) {
      double r = std::min(1.0, alphas_.row(u).norm());
      double p = 0.5 * (1.0 + r), q = 0.5 * (1.0 - r);
      if (p > 0) total -= p * std::log(p);
      if (q > 0) total -= q * std::log(q);
    }
    return total;
  }
  for (int u = 0; u < n_; ++u) {
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(density(u),
                                                Eigen::EigenvaluesOnly);
    for (double ev : es.eigenvalues())
      if (ev > 1e-15) total -= ev * std::log(ev);
  }
  return total;
}

ProductState ProductState::maximally_mixed(int n, int d) {
  return ProductState(n, d);
}

ProductState ProductState::random_pure(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  PauliBasis basis(d);
  ProductState s(n, d);
  for (int u = 0; u < n; ++u) {
    VectorXcd psi(d);
    for (int i = 0; i < d; ++i)
      psi(i) = cplx(rng.next_gaussian(), rng.next_gaussian());
    psi.normalize();
    MatrixXcd rho = psi * psi.adjoint();
    s.alphas_.row(u) = bloch_of(rho, basis).transpose();
  }
  return s;
}

ProductState ProductState::random_mixed(int n, int d, std::uint64_t seed) {
  Rng rng(seed);
  PauliBasis basis(d);
  ProductState s(n, d);
  for (int u = 0; u < n; ++u) {
    // Mixture of two random pure states.
    MatrixXcd rho = MatrixXcd::Zero(d, d);
    double w = rng.next_double();
    for (int rep = 0; rep < 2; ++rep) {
      VectorXcd psi(d);
      for (int i = 0; i < d; ++i)
        psi(i) = cplx(rng.next_gaussian(), rng.next_gaussian());
      psi.normalize();
      rho += (rep == 0 ? w : 1.0 - w) * psi * psi.adjoint();
    }
    s.alphas_.row(u) = bloch_of(rho, basis).transpose();
  }
  return s;
}

VectorXd ProductState::bloch_of(const MatrixXcd& rho, const PauliBasis& basis) {
  int d = basis.d();
  VectorXd alpha(d * d - 1);
  for (int p = 1; p < d * d; ++p)
    alpha(p - 1) = (basis.op(p) * rho).trace().real();
  return alpha;
}

}  // namespace qpsa
