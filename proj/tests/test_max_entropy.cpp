#include <doctest.h>

#include <cmath>

#include "qpsa/constraints.hpp"
#include "qpsa/errors.hpp"

using namespace qpsa;

TEST_CASE("unconstrained single qubit maximizes at ln 2") {
  ConstraintSet cs(1, 2);
  auto res = max_entropy(cs, {1.0}, 1e-6, {});
  CHECK(res.entropy == doctest::Approx(std::log(2.0)));
  CHECK(res.witness.norm() < 1e-9);
}

TEST_CASE("single qubit pinned to an exact Z magnetization") {
  for (double z : {0.5, -0.3, 0.9}) {
    ConstraintSet cs(1, 2);
    AffineRow row{{cs.var_of(0, 3)}, {1.0}, z, z};
    cs.add_row(row);
    FeasOptions fopts;
    fopts.inner_radius = 1e-6;
    auto res = max_entropy(cs, {1.0}, 1e-6, fopts);
    double p = 0.5 * (1.0 + std::abs(z));
    double expect = -p * std::log(p) - (1 - p) * std::log(1 - p);
    CHECK(res.entropy == doctest::Approx(expect).epsilon(1e-4));
    // The optimum is alpha = (0, 0, z).
    CHECK(res.witness(2) == doctest::Approx(z).epsilon(1e-4));
    CHECK(std::abs(res.witness(0)) < 2e-3);
    CHECK(std::abs(res.witness(1)) < 2e-3);
  }
}

TEST_CASE("binary entropy value at z = 0.5 matches the closed form") {
  ConstraintSet cs(1, 2);
  AffineRow row{{cs.var_of(0, 3)}, {1.0}, 0.5, 0.5};
  cs.add_row(row);
  FeasOptions fopts;
  fopts.inner_radius = 1e-6;
  auto res = max_entropy(cs, {1.0}, 1e-6, fopts);
  CHECK(res.entropy == doctest::Approx(0.562335).epsilon(1e-3));
}

TEST_CASE("two symmetric atoms give a symmetric maximizer") {
  ConstraintSet cs(2, 2);
  AffineRow row{{cs.var_of(0, 3), cs.var_of(1, 3)}, {1.0, 1.0}, 0.8, 1.2};
  cs.add_row(row);
  auto res = max_entropy(cs, {1.0, 1.0}, 1e-7, {});
  CHECK(std::abs(res.witness(2) - res.witness(5)) < 1e-3);
  // Weighted row satisfied by the witness.
  double v = res.witness(2) + res.witness(5);
  CHECK(v >= 0.8 - 1e-6);
  CHECK(v <= 1.2 + 1e-6);
}

TEST_CASE("weighted atoms against a one-dimensional closed form") {
  // Two atoms with weights (3, 1), joint magnetization pinned tightly.
  // Maximize 3 S(z1) + S(z2) st 3 z1 + z2 = 2, solved by a fine scan.
  ConstraintSet cs(2, 2);
  AffineRow row{{cs.var_of(0, 3), cs.var_of(1, 3)}, {3.0, 1.0}, 2.0, 2.0};
  cs.add_row(row);
  FeasOptions fopts;
  fopts.inner_radius = 1e-6;
  auto res = max_entropy(cs, {3.0, 1.0}, 1e-6, fopts);
  auto ent = [](double r) {
    r = std::min(std::abs(r), 1.0 - 1e-12);
    double p = 0.5 * (1 + r);
    return -p * std::log(p) - (1 - p) * std::log(1 - p);
  };
  double best = -1.0;
  for (double z1 = -1.0; z1 <= 1.0; z1 += 1e-4) {
    double z2 = 2.0 - 3.0 * z1;
    if (std::abs(z2) > 1.0) continue;
    best = std::max(best, 3.0 * ent(z1) + ent(z2));
  }
  CHECK(res.entropy == doctest::Approx(best).epsilon(1e-3));
}

TEST_CASE("infeasible constraint set is rejected") {
  ConstraintSet cs(1, 2);
  AffineRow row{{cs.var_of(0, 3)}, {1.0}, 2.0, 3.0};
  cs.add_row(row);
  CHECK_THROWS_AS(max_entropy(cs, {1.0}, 1e-6, {}), InputError);
}
