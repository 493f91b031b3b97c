#include <doctest.h>

#include <cmath>

#include "qpsa/eb_map.hpp"
#include "test_helpers.hpp"

using namespace qpsa;
using namespace qpsa_test;

TEST_CASE("zero Hamiltonian: every trial has zero energy difference") {
  LocalHamiltonian zero(4, 2, 2, {});
  auto ground = exact_ground(complete_heisenberg(4)).second;
  auto report = eb_experiment(zero, ground, 2, 25, 77);
  CHECK(report.energy_rho == doctest::Approx(0.0));
  CHECK(report.mean_abs_diff == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("product state with l = 0 maps to itself") {
  auto h = complete_heisenberg(4);
  auto s = ProductState::random_mixed(4, 2, 5);
  MatrixXcd rho = MatrixXcd::Identity(1, 1);
  for (int u = 0; u < 4; ++u) rho = kron(rho, s.density(u));
  auto state = DenseState::mixed(rho, 4, 2);
  auto report = eb_experiment(h, state, 0, 10, 3);
  CHECK(report.mean_abs_diff < 1e-9);
  CHECK(std::isinf(report.explicit_bound));
  // Marginals of a product state reproduce the factors exactly.
  CHECK(report.min_entropy_margin == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("complete-graph Heisenberg ground state at n = 5") {
  auto h = complete_heisenberg(5);
  auto [energy, ground] = exact_ground(h);
  auto report = eb_experiment(h, ground, 2, 60, 2024);
  CHECK(report.energy_rho == doctest::Approx(energy));
  CHECK(report.entropy_rho == doctest::Approx(0.0).epsilon(1e-8));
  // Entropy never decreases under the map, pointwise in (C, b).
  CHECK(report.min_entropy_margin >= -1e-9);
  // Empirical mean difference within the explicit proof-constant bound.
  CHECK(report.mean_abs_diff <= report.explicit_bound);
  CHECK(int(report.trial_log.size()) == 60);
}

TEST_CASE("entropy monotonicity also holds for the Gibbs state") {
  auto h = complete_heisenberg(4);
  auto rho = gibbs_state(h, 1.5);
  auto report = eb_experiment(h, rho, 2, 30, 91);
  CHECK(report.min_entropy_margin >= -1e-9);
  CHECK(report.mean_abs_diff <= report.explicit_bound);
}
