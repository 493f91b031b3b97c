#include <doctest.h>

#include <cmath>

#include "qpsa/cut.hpp"
#include "qpsa/errors.hpp"
#include "qpsa/ham_cut.hpp"
#include "qpsa/rng.hpp"
#include "test_helpers.hpp"

using namespace qpsa;
using namespace qpsa_test;

namespace {

MatrixXd random_pm_matrix(int n, std::uint64_t seed) {
  Rng rng(seed);
  MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = rng.next_below(2) ? 1.0 : -1.0;
  return m;
}

// Exhaustive cut norm over all subset pairs (independent oracle).
double cut_norm_bruteforce(const MatrixXd& m) {
  const int n = int(m.rows());
  double best = 0.0;
  for (std::uint64_t s = 0; s < (std::uint64_t(1) << n); ++s)
    for (std::uint64_t t = 0; t < (std::uint64_t(1) << n); ++t) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i)
        if (s & (1ull << i))
          for (int j = 0; j < n; ++j)
            if (t & (1ull << j)) sum += m(i, j);
      best = std::max(best, std::abs(sum));
    }
  return best;
}

}  // namespace

TEST_CASE("cut_norm_exact on tiny matrices") {
  MatrixXd ones = MatrixXd::Ones(2, 2);
  auto r = cut_norm_exact(ones);
  CHECK(r.value == doctest::Approx(4.0));
  CHECK(r.s == std::vector<int>{0, 1});
  CHECK(r.t == std::vector<int>{0, 1});

  MatrixXd pm(2, 2);
  pm << 1, -1, -1, 1;
  CHECK(cut_norm_exact(pm).value == doctest::Approx(1.0));

  CHECK(cut_norm_exact(MatrixXd::Zero(3, 3)).value == doctest::Approx(0.0));
}

TEST_CASE("cut_norm_exact matches the brute-force oracle") {
  for (int rep = 0; rep < 20; ++rep) {
    int n = 2 + rep % 5;
    MatrixXd m = random_pm_matrix(n, 5000 + rep);
    CHECK(cut_norm_exact(m).value ==
          doctest::Approx(cut_norm_bruteforce(m)).epsilon(1e-12));
  }
}

TEST_CASE("cut_norm_exact size cap") {
  CHECK_THROWS_AS(cut_norm_exact(MatrixXd::Zero(21, 21)), SizeLimitError);
}

TEST_CASE("cut_norm_heuristic basics") {
  MatrixXd ones = MatrixXd::Ones(7, 7);
  auto r = cut_norm_heuristic(ones, 1, 1);
  CHECK(r.value == doctest::Approx(49.0));
  CHECK(cut_norm_heuristic(MatrixXd::Zero(5, 5), 4, 2).value ==
        doctest::Approx(0.0));
}

TEST_CASE("heuristic is a lower bound and at least half the optimum") {
  for (int seed = 0; seed < 50; ++seed) {
    MatrixXd m = random_pm_matrix(12, 9100 + seed);
    double exact = cut_norm_exact(m).value;
    double heur = cut_norm_heuristic(m, 32, seed).value;
    CHECK(heur <= exact + 1e-9);
    CHECK(heur >= 0.5 * exact);
  }
}

TEST_CASE("fk_decompose recovers a cut matrix in one piece") {
  const int n = 9;
  MatrixXd m = MatrixXd::Zero(n, n);
  std::vector<int> s{1, 3, 4}, t{0, 2, 6, 8};
  for (int u : s)
    for (int v : t) m(u, v) = 1.7;
  auto cd = fk_decompose(m, 0.25, 11);
  REQUIRE(cd.pieces.size() == 1);
  CHECK(cd.pieces[0].coeff == doctest::Approx(1.7));
  CHECK(cd.pieces[0].sides[0] == s);
  CHECK(cd.pieces[0].sides[1] == t);
  CHECK(cd.residual_matrix(m).norm() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(cd.target_met);
}

TEST_CASE("fk_decompose on the zero matrix returns no pieces") {
  auto cd = fk_decompose(MatrixXd::Zero(6, 6), 0.5, 1);
  CHECK(cd.pieces.empty());
  CHECK(cd.target_met);
}

TEST_CASE("fk_decompose meets the residual target on random sign matrices") {
  for (int rep = 0; rep < 6; ++rep) {
    const int n = 14;
    MatrixXd m = random_pm_matrix(n, 333 + rep);
    for (double eps : {0.3, 0.5}) {
      auto cd = fk_decompose(m, eps, 900 + rep);
      CHECK(cd.target_met);
      MatrixXd w = cd.residual_matrix(m);
      CHECK(cut_norm_exact(w).value <= eps * n * m.norm() + 1e-9);
      // Projection property along the run.
      double prev = m.norm();
      for (double f : cd.frobenius_log) {
        CHECK(f <= prev + 1e-9);
        prev = f;
      }
      // Entrywise reconstruction.
      MatrixXd rebuilt = w;
      for (const auto& p : cd.pieces)
        for (int u : p.sides[0])
          for (int v : p.sides[1]) rebuilt(u, v) += p.coeff;
      CHECK((rebuilt - m).cwiseAbs().maxCoeff() < 1e-9);
    }
  }
}

TEST_CASE("tensor_fk_decompose recovers a cut array and meets targets") {
  ColorTensor t;
  t.n = 6;
  t.k = 3;
  t.values.assign(216, 0.0);
  std::vector<std::vector<int>> sides{{0, 2}, {1, 3}, {4, 5}};
  for (int a : sides[0])
    for (int b : sides[1])
      for (int c : sides[2]) t.values[(a * 6 + b) * 6 + c] = -0.8;
  auto cd = tensor_fk_decompose(t, 0.5, 3);
  REQUIRE(cd.pieces.size() == 1);
  CHECK(cd.pieces[0].coeff == doctest::Approx(-0.8));
  CHECK(cd.residual.frobenius == doctest::Approx(0.0).epsilon(1e-12));

  ColorTensor zero;
  zero.n = 5;
  zero.k = 3;
  zero.values.assign(125, 0.0);
  CHECK(tensor_fk_decompose(zero, 0.5, 1).pieces.empty());
}

TEST_CASE("tensor residual bound holds per the exhaustive check") {
  Rng rng(4242);
  ColorTensor t;
  t.n = 8;
  t.k = 3;
  t.values.assign(512, 0.0);
  for (auto& v : t.values) v = rng.next_below(2) ? 1.0 : -1.0;
  const double eps = 0.75;
  auto cd = tensor_fk_decompose(t, eps, 17);
  // Materialize the residual and check the inf->1 target exhaustively.
  ColorTensor w = t;
  for (const auto& p : cd.pieces)
    for (int a : p.sides[0])
      for (int b : p.sides[1])
        for (int c : p.sides[2]) w.values[(a * 8 + b) * 8 + c] -= p.coeff;
  const double n32 = std::pow(8.0, 1.5);
  CHECK(cd.target_met);
  CHECK(tensor_inf_one_exact(w, false) <= 8.0 * eps * n32 * t.frobenius());
  CHECK(cd.residual.cut_value <= eps * n32 * t.frobenius() + 1e-9);
}

TEST_CASE("ham_cut_decompose trivial and structured cases") {
  // Zero Hamiltonian: empty decomposition.
  LocalHamiltonian zero(4, 2, 2, {});
  auto hcd0 = ham_cut_decompose(zero, 0.5, 1);
  CHECK(hcd0.color_decomps.empty());

  // Single color that is itself a complete bipartite block: H_D = H exactly,
  // so the product-state gap vanishes.
  std::vector<LocalTerm> terms;
  for (int u : {0, 1})
    for (int v : {2, 3})
      terms.push_back({{u, v}, pauli_zz()});
  LocalHamiltonian h(4, 2, 2, terms);
  auto hcd = ham_cut_decompose(h, 0.25, 5);
  auto pd = pauli_decompose(h);
  for (int rep = 0; rep < 20; ++rep) {
    auto s = ProductState::random_mixed(4, 2, 100 + rep);
    CHECK(hcd.energy(s) == doctest::Approx(product_energy(pd, s)).epsilon(1e-9));
  }
  CHECK(hcd.product_gap_bound() < 1e-9);
}

TEST_CASE("ham_cut_decompose product gap on dense random instances") {
  for (int rep = 0; rep < 3; ++rep) {
    const int n = 10;
    const double eps = 0.5;
    auto h = gen_complete_random(n, 4100 + rep);
    auto pd = pauli_decompose(h);
    auto hcd = ham_cut_decompose(h, eps, 4200 + rep);
    hcd.strength_frobenius = h.strength_frobenius();
    double max_gap = 0.0;
    for (int t = 0; t < 100; ++t) {
      auto s = ProductState::random_mixed(n, 2, 50000 + 100 * rep + t);
      max_gap = std::max(max_gap,
                         std::abs(product_energy(pd, s) - hcd.energy(s)));
    }
    CHECK(max_gap <= eps * n * h.strength_frobenius());
    // The certified bound dominates the sampled gaps.
    CHECK(max_gap <= hcd.product_gap_bound() + 1e-9);
    // Per-color diagonal bound from the coefficient-length chain.
    for (size_t c = 0; c < hcd.color_decomps.size(); ++c) {
      const auto& cd = hcd.color_decomps[c];
      int s_width = int(cd.pieces.size());
      if (s_width == 0) continue;
      CHECK(cd.residual.max_abs_diag <=
            std::sqrt(double(s_width)) * cd.input_frobenius / n + 1e-9);
    }
  }
}

TEST_CASE("inf_one_norm_exact agrees with a direct scan") {
  for (int rep = 0; rep < 10; ++rep) {
    int n = 3 + rep % 3;
    MatrixXd m = random_pm_matrix(n, 777 + rep) * 0.3;
    double best = 0.0;
    for (std::uint64_t x = 0; x < (1ull << n); ++x) {
      VectorXd xv(n);
      for (int i = 0; i < n; ++i) xv(i) = (x & (1ull << i)) ? 1.0 : -1.0;
      best = std::max(best, (m.transpose() * xv).cwiseAbs().sum());
    }
    CHECK(inf_one_norm_exact(m) == doctest::Approx(best).epsilon(1e-12));
  }
}
