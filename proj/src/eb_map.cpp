#include "qpsa/eb_map.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "qpsa/errors.hpp"
#include "qpsa/rng.hpp"

namespace qpsa {

namespace {

// Digits of `index` base d, big-endian over `len` positions, with `extra`
// inserted as the digit at `pos`.
std::int64_t interleave(std::int64_t index, int extra, int pos, int len, int d) {
  std::int64_t out = 0;
  int src = 0;
  std::vector<int> digits(len - 1);
  for (int j = len - 2; j >= 0; --j) {
    digits[j] = int(index % d);
    index /= d;
  }
  for (int j = 0; j < len; ++j) {
    int digit = (j == pos) ? extra : digits[src++];
    out = out * d + digit;
  }
  return out;
}

double entropy_of_probs(const std::vector<double>& p) {
  double s = 0.0;
  for (double x : p)
    if (x > 1e-15) s -= x * std::log(x);
  return s;
}

}  // namespace

EbReport eb_experiment(const LocalHamiltonian& h, const DenseState& rho, int l,
                       int trials, std::uint64_t seed) {
  if (l < 0) throw InputError("l must be non-negative");
  if (trials < 1) throw InputError("trials must be >= 1");
  const int n = h.n(), d = h.d();
  if (rho.n() != n || rho.d() != d)
    throw InputError("state dimensions do not match the instance");
  const PauliBasis basis(d);
  const int factors = basis.factors();
  const MatrixXcd rho_mat = rho.density();
  const PauliDecomposition pd = pauli_decompose(h);

  EbReport report;
  report.l = l;
  report.trials = trials;
  report.energy_rho = dense_energy(h, rho);
  report.entropy_rho = von_neumann_entropy(rho_mat);

  const int k = h.k();
  const double logd = double(factors);  // log2; equals 1 for qubits
  report.explicit_bound =
      l == 0 ? std::numeric_limits<double>::infinity()
             : (2.0 * k * l / n) * h.strength_l1() +
                   (6.0 * k * std::pow(double(d), 3 * k) * logd / std::sqrt(double(l))) *
                       std::pow(double(n), 0.5 * k) * h.strength_frobenius();

  Rng rng(split_seed(seed, "eb"));
  double sum_abs = 0.0, sum_energy = 0.0, min_margin =
                                              std::numeric_limits<double>::max();

  for (int trial = 0; trial < trials; ++trial) {
    const int m = int(rng.next_below(std::uint64_t(l) + 1));
    // Uniform m-subset via partial Fisher-Yates.
    std::vector<int> pool(n);
    for (int i = 0; i < n; ++i) pool[i] = i;
    for (int i = 0; i < m; ++i)
      std::swap(pool[i], pool[i + int(rng.next_below(n - i))]);
    std::vector<int> measured(pool.begin(), pool.begin() + m);
    std::sort(measured.begin(), measured.end());

    std::vector<std::vector<int>> bases(m);
    for (int i = 0; i < m; ++i) {
      bases[i].resize(factors);
      for (int f = 0; f < factors; ++f)
        bases[i][f] = 1 + int(rng.next_below(3));
    }

    // Per measured qudit: d orthogonal eigenvectors, one per outcome tuple.
    std::vector<std::vector<VectorXcd>> eigvecs(m);
    for (int i = 0; i < m; ++i) {
      eigvecs[i].resize(d);
      for (int z = 0; z < d; ++z) {
        VectorXcd v = VectorXcd::Ones(1);
        int rem = z;
        std::vector<int> outs(factors);
        for (int f = factors - 1; f >= 0; --f) {
          outs[f] = rem % 2;
          rem /= 2;
        }
        for (int f = 0; f < factors; ++f)
          v = kron(v, pauli_eigenvector(bases[i][f], outs[f]));
        eigvecs[i][z] = v;
      }
    }

    std::vector<int> unmeasured;
    std::vector<bool> in_c(n, false);
    for (int v : measured) in_c[v] = true;
    for (int v = 0; v < n; ++v)
      if (!in_c[v]) unmeasured.push_back(v);

    const MatrixXcd rho_c =
        m > 0 ? partial_trace_keep(rho_mat, n, d, measured)
              : MatrixXcd::Ones(1, 1);
    std::vector<MatrixXcd> rho_cu(unmeasured.size());
    for (size_t ui = 0; ui < unmeasured.size(); ++ui) {
      std::vector<int> keep = measured;
      keep.push_back(unmeasured[ui]);
      std::sort(keep.begin(), keep.end());
      rho_cu[ui] = partial_trace_keep(rho_mat, n, d, keep);
    }

    std::int64_t outcome_count = 1;
    for (int i = 0; i < m; ++i) outcome_count *= d;

    double trial_energy = 0.0;
    double cond_entropy = 0.0;
    std::vector<double> probs;
    probs.reserve(outcome_count);

    for (std::int64_t z = 0; z < outcome_count; ++z) {
      std::vector<int> zdig(m);
      std::int64_t rem = z;
      for (int i = m - 1; i >= 0; --i) {
        zdig[i] = int(rem % d);
        rem /= d;
      }
      VectorXcd psi = VectorXcd::Ones(1);
      for (int i = 0; i < m; ++i) psi = kron(psi, eigvecs[i][zdig[i]]);
      const double pz = std::max(0.0, std::real(psi.dot(rho_c * psi)));
      probs.push_back(pz);
      if (pz < 1e-14) continue;

      // Component product state: eigenstates on C, conditional marginals off C.
      ProductState comp(n, d);
      for (int i = 0; i < m; ++i) {
        MatrixXcd pure = eigvecs[i][zdig[i]] * eigvecs[i][zdig[i]].adjoint();
        comp.alphas().row(measured[i]) =
            ProductState::bloch_of(pure, basis).transpose();
      }
      double sum_marginal_entropy = 0.0;
      for (size_t ui = 0; ui < unmeasured.size(); ++ui) {
        const int u = unmeasured[ui];
        std::vector<int> keep = measured;
        keep.push_back(u);
        std::sort(keep.begin(), keep.end());
        const int pos =
            int(std::lower_bound(keep.begin(), keep.end(), u) - keep.begin());
        const int len = m + 1;
        MatrixXcd tau = MatrixXcd::Zero(d, d);
        const std::int64_t cdim = outcome_count;  // d^m
        for (std::int64_t a = 0; a < cdim; ++a) {
          if (std::abs(psi(a)) < 1e-16) continue;
          for (std::int64_t b = 0; b < cdim; ++b) {
            if (std::abs(psi(b)) < 1e-16) continue;
            const cplx w = std::conj(psi(a)) * psi(b);
            for (int s = 0; s < d; ++s)
              for (int t = 0; t < d; ++t)
                tau(s, t) += w * rho_cu[ui](interleave(a, s, pos, len, d),
                                            interleave(b, t, pos, len, d));
          }
        }
        tau /= pz;
        tau = 0.5 * (tau + MatrixXcd(tau.adjoint()));
        comp.alphas().row(u) = ProductState::bloch_of(tau, basis).transpose();
        sum_marginal_entropy += von_neumann_entropy(tau);
      }
      trial_energy += pz * product_energy(pd, comp);
      cond_entropy += pz * sum_marginal_entropy;
    }

    EbTrial t;
    t.measured = measured;
    t.bases = bases;
    t.energy_eta = trial_energy;
    t.entropy_eta = entropy_of_probs(probs) + cond_entropy;
    report.trial_log.push_back(t);

    sum_energy += trial_energy;
    sum_abs += std::abs(report.energy_rho - trial_energy);
    min_margin = std::min(min_margin, t.entropy_eta - report.entropy_rho);
  }

  report.mean_abs_diff = sum_abs / trials;
  report.abs_mean_diff = std::abs(report.energy_rho - sum_energy / trials);
  report.min_entropy_margin = min_margin;
  return report;
}

}  // namespace qpsa
