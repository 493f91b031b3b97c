#include "qpsa/subsample.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "qpsa/cut.hpp"
#include "qpsa/dense.hpp"
#include "qpsa/errors.hpp"
#include "qpsa/estimators.hpp"
#include "qpsa/ham_cut.hpp"
#include "qpsa/rng.hpp"

namespace qpsa {

LocalHamiltonian subsample(const LocalHamiltonian& h, int q,
                           std::uint64_t seed, std::vector<int>& subset_out) {
  if (q < 1 || q > h.n()) throw InputError("q out of range [1, n]");
  Rng rng(split_seed(seed, "subsample"));
  std::vector<int> pool(h.n());
  for (int i = 0; i < h.n(); ++i) pool[i] = i;
  for (int i = 0; i < q; ++i)
    std::swap(pool[i], pool[i + int(rng.next_below(h.n() - i))]);
  subset_out.assign(pool.begin(), pool.begin() + q);
  std::sort(subset_out.begin(), subset_out.end());
  std::vector<int> new_index(h.n(), -1);
  for (int i = 0; i < q; ++i) new_index[subset_out[i]] = i;

  std::vector<LocalTerm> terms;
  for (const auto& t : h.terms()) {
    bool inside = true;
    for (int v : t.support)
      if (new_index[v] < 0) {
        inside = false;
        break;
      }
    if (!inside) continue;
    LocalTerm nt;
    for (int v : t.support) nt.support.push_back(new_index[v]);
    nt.matrix = t.matrix;
    terms.push_back(std::move(nt));
  }
  return LocalHamiltonian(q, h.d(), h.k(), std::move(terms));
}

LocalHamiltonian subsample(const LocalHamiltonian& h, int q,
                           std::uint64_t seed) {
  std::vector<int> unused;
  return subsample(h, q, seed, unused);
}

SubsampleReport vsc_experiment(const LocalHamiltonian& h, int q, int trials,
                               VscSolver solver, std::uint64_t seed,
                               const VscOptions& opts) {
  if (trials < 1) throw InputError("trials must be >= 1");
  SubsampleReport report;
  report.q = q;
  report.trials = trials;

  auto solve = [&](const LocalHamiltonian& inst, std::uint64_t s) {
    switch (solver) {
      case VscSolver::kExact:
        return exact_ground(inst).first;
      case VscSolver::kDirect:
        return gs_direct(pauli_decompose(inst), opts.direct_restarts,
                         opts.direct_iters, s)
            .first;
      default: {
        EstimateOptions eo;
        eo.allow_direct_fallback = true;
        return gs_estimate(inst, opts.eps, opts.gamma, s, eo).v_hat;
      }
    }
  };

  report.reference = solve(h, split_seed(seed, "ref"));
  const double scale = std::pow(double(h.n()) / double(q), h.k());

  // Relaxation path: residual cut values of the sampled error matrices
  // (the sub-matrix regularity check).
  HamiltonianCutDecomposition hcd;
  bool have_hcd = false;
  if (solver == VscSolver::kRelaxation && h.k() == 2) {
    hcd = ham_cut_decompose(h, opts.eps, split_seed(seed, "hcd"));
    have_hcd = true;
  }
  PauliDecomposition pd_full;
  if (have_hcd) pd_full = pauli_decompose(h);

  report.estimates.assign(trials, 0.0);
  auto run_trial = [&](int t) {
    std::vector<int> subset;
    LocalHamiltonian hq = subsample(h, q, split_seed(seed, 7000 + t), subset);
    report.estimates[t] = scale * solve(hq, split_seed(seed, 9000 + t));
    if (have_hcd && t == 0) {
      // W_Q per color: restrict the residual to the sampled rows/columns.
      for (size_t c = 0; c < hcd.color_decomps.size(); ++c) {
        const auto& key = hcd.color_keys[c];
        MatrixXd w = hcd.color_decomps[c].residual_matrix(
            pd_full.matrix(key[0], key[1]));
        MatrixXd wq(q, q);
        for (int i = 0; i < q; ++i)
          for (int j = 0; j < q; ++j) wq(i, j) = w(subset[i], subset[j]);
        CutResult cr = q <= kCutNormExactCap
                           ? cut_norm_exact(wq)
                           : cut_norm_heuristic(wq, 32, split_seed(seed, c));
        report.sampled_residual_cuts.push_back(cr.value);
      }
    }
  };
  const int threads = std::max(1, opts.threads);
  if (threads == 1) {
    for (int t = 0; t < trials; ++t) run_trial(t);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w)
      pool.emplace_back([&] {
        for (int t = next.fetch_add(1); t < trials; t = next.fetch_add(1))
          run_trial(t);
      });
    for (auto& th : pool) th.join();
  }
  double sum = 0.0, sum_sq = 0.0;
  for (double est : report.estimates) {
    sum += est;
    sum_sq += est * est;
    report.max_dev =
        std::max(report.max_dev, std::abs(est - report.reference));
  }
  report.mean = sum / trials;
  const double var =
      std::max(0.0, sum_sq / trials - report.mean * report.mean);
  report.sd = std::sqrt(var);
  return report;
}

}  // namespace qpsa
