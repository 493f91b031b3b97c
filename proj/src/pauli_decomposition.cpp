#include "qpsa/pauli_decomposition.hpp"

#include <cmath>

#include "qpsa/errors.hpp"

namespace qpsa {

namespace {

constexpr double kCoeffDropTol = 1e-13;

std::int64_t ipow(std::int64_t base, int exp) {
  std::int64_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

}  // namespace

double ColorTensor::at(const std::vector<int>& idx) const {
  std::int64_t flat = 0;
  for (int i : idx) flat = flat * n + i;
  return values[flat];
}

double& ColorTensor::at(const std::vector<int>& idx) {
  std::int64_t flat = 0;
  for (int i : idx) flat = flat * n + i;
  return values[flat];
}

double ColorTensor::frobenius() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

PauliDecomposition pauli_decompose(const LocalHamiltonian& h) {
  PauliDecomposition pd;
  pd.n_ = h.n();
  pd.d_ = h.d();
  pd.k_ = h.k();
  const PauliBasis basis(h.d());
  const int ncolors = basis.count();
  const int k = h.k();
  const double scale = 1.0 / double(ipow(h.d(), k));

  // Per-term coefficients h^c_e = d^{-k} Tr[h_e sigma^c_e].
  std::vector<int> colors(k, 0);
  for (const auto& term : h.terms()) {
    TermCoefficients tc;
    tc.support = term.support;
    std::fill(colors.begin(), colors.end(), 0);
    const std::int64_t total = ipow(ncolors, k);
    for (std::int64_t flat = 0; flat < total; ++flat) {
      std::int64_t rem = flat;
      for (int j = k - 1; j >= 0; --j) {
        colors[j] = int(rem % ncolors);
        rem /= ncolors;
      }
      const MatrixXcd sigma = basis.op_tuple(colors);
      const cplx tr = (term.matrix * sigma).trace();
      const double coeff = tr.real() * scale;
      if (std::abs(tr.imag()) * scale > 1e-9)
        throw InputError("non-real Pauli coefficient: term not Hermitian");
      if (std::abs(coeff) < kCoeffDropTol) continue;
      bool identity = true;
      for (int c : colors) identity = identity && (c == 0);
      if (identity) {
        tc.identity_coeff = coeff;
        pd.constant_ += coeff;
      } else {
        tc.entries.emplace_back(colors, coeff);
      }
    }
    pd.coeffs_.push_back(std::move(tc));
  }

  if (k == 2) {
    // Fold onto unordered color pairs a <= b; see the class comment for the
    // orientation and equal-color conventions.
    for (const auto& tc : pd.coeffs_) {
      const int u = tc.support[0], v = tc.support[1];
      for (const auto& [cols, coeff] : tc.entries) {
        int a = cols[0], b = cols[1];
        int x = u, y = v;
        if (a > b) {
          std::swap(a, b);
          std::swap(x, y);
        }
        auto key = std::make_pair(a, b);
        auto it = pd.pair_matrices_.find(key);
        if (it == pd.pair_matrices_.end())
          it = pd.pair_matrices_
                   .emplace(key, MatrixXd::Zero(pd.n_, pd.n_))
                   .first;
        if (a == b) {
          it->second(x, y) += 0.5 * coeff;
          it->second(y, x) += 0.5 * coeff;
        } else {
          it->second(x, y) += coeff;
        }
      }
    }
  } else if (k == 3) {
    std::map<std::vector<int>, int> tensor_index;
    for (const auto& tc : pd.coeffs_) {
      for (const auto& [cols, coeff] : tc.entries) {
        auto it = tensor_index.find(cols);
        if (it == tensor_index.end()) {
          ColorTensor t;
          t.colors = cols;
          t.n = pd.n_;
          t.k = 3;
          t.values.assign(std::size_t(pd.n_) * pd.n_ * pd.n_, 0.0);
          pd.tensors_.push_back(std::move(t));
          it = tensor_index.emplace(cols, int(pd.tensors_.size()) - 1).first;
        }
        pd.tensors_[it->second].at(tc.support) += coeff;
      }
    }
  }
  return pd;
}

MatrixXd PauliDecomposition::matrix(int a, int b) const {
  auto key = std::make_pair(std::min(a, b), std::max(a, b));
  auto it = pair_matrices_.find(key);
  if (it == pair_matrices_.end()) return MatrixXd::Zero(n_, n_);
  return a <= b ? it->second : MatrixXd(it->second.transpose());
}

LocalHamiltonian PauliDecomposition::assemble() const {
  const PauliBasis basis(d_);
  std::vector<LocalTerm> terms;
  const std::int64_t dim = ipow(d_, k_);
  for (const auto& tc : coeffs_) {
    LocalTerm t;
    t.support = tc.support;
    t.matrix = tc.identity_coeff * MatrixXcd::Identity(dim, dim);
    for (const auto& [cols, coeff] : tc.entries)
      t.matrix += coeff * basis.op_tuple(cols);
    terms.push_back(std::move(t));
  }
  return LocalHamiltonian(n_, d_, k_, std::move(terms));
}

double product_energy(const PauliDecomposition& pd, const ProductState& s) {
  if (s.n() != pd.n() || s.d() != pd.d())
    throw InputError("product state dimensions do not match the instance");
  double total = pd.constant();
  for (const auto& tc : pd.term_coefficients()) {
    for (const auto& [cols, coeff] : tc.entries) {
      double prod = coeff;
      for (size_t j = 0; j < cols.size(); ++j)
        prod *= s.alpha(tc.support[j], cols[j]);
      total += prod;
    }
  }
  return total;
}

double product_free_energy(const PauliDecomposition& pd, const ProductState& s,
                           double beta) {
  if (beta <= 0) throw InputError("beta must be positive");
  return product_energy(pd, s) - s.entropy() / beta;
}

MatrixXd product_energy_gradient(const PauliDecomposition& pd,
                                 const ProductState& s) {
  MatrixXd grad = MatrixXd::Zero(s.n(), s.d() * s.d() - 1);
  for (const auto& tc : pd.term_coefficients()) {
    for (const auto& [cols, coeff] : tc.entries) {
      for (size_t j = 0; j < cols.size(); ++j) {
        if (cols[j] == 0) continue;
        double prod = coeff;
        for (size_t i = 0; i < cols.size(); ++i) {
          if (i == j) continue;
          prod *= s.alpha(tc.support[i], cols[i]);
        }
        grad(tc.support[j], cols[j] - 1) += prod;
      }
    }
  }
  return grad;
}

}  // namespace qpsa
