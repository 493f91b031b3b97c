#include <doctest.h>

#include <cmath>
#include <vector>

#include "qpsa/constraints.hpp"
#include "qpsa/rng.hpp"

using namespace qpsa;

namespace {

struct OracleCase {
  ConstraintSet cs;
  // Active (atom, component) dimensions; all other components may be zero
  // without loss of generality because rows touch only active components.
  std::vector<std::pair<int, int>> dims;
};

// Random small constraint set with a margin: either feasible with a point
// 0.2-deep inside every row, or infeasible with a row shifted 0.05 beyond
// the achievable range.
OracleCase make_case(std::uint64_t seed, bool* expect_feasible) {
  Rng rng(seed);
  const int atoms = 1 + int(rng.next_below(3));
  std::vector<std::vector<int>> active(atoms);  // components per atom
  int total_dims = 0;
  for (int a = 0; a < atoms; ++a) {
    int limit = atoms == 1 ? 3 : (atoms == 2 ? (a == 0 ? 2 : 1) : 1);
    int count = 1 + int(rng.next_below(limit));
    for (int c = 0; c < count; ++c) active[a].push_back(c + 1);
    total_dims += count;
  }
  (void)total_dims;

  OracleCase out{ConstraintSet(atoms, 2), {}};
  for (int a = 0; a < atoms; ++a)
    for (int c : active[a]) out.dims.emplace_back(a, c);

  // Reference point inside the balls.
  std::vector<std::vector<double>> ref(atoms);
  for (int a = 0; a < atoms; ++a) {
    double norm_sq = 0.0;
    for (size_t i = 0; i < active[a].size(); ++i) {
      double v = 2.0 * rng.next_double() - 1.0;
      ref[a].push_back(v);
      norm_sq += v * v;
    }
    double norm = std::sqrt(norm_sq);
    if (norm > 0.9)
      for (auto& v : ref[a]) v *= 0.9 / norm;
  }

  *expect_feasible = rng.next_below(4) != 0;  // 3/4 feasible
  const int rows = 1 + int(rng.next_below(4));
  int poisoned = *expect_feasible ? -1 : int(rng.next_below(rows));
  for (int r = 0; r < rows; ++r) {
    int c = active[0][rng.next_below(active[0].size())];
    AffineRow row;
    double value_at_ref = 0.0, weight_abs = 0.0;
    for (int a = 0; a < atoms; ++a) {
      bool has = std::find(active[a].begin(), active[a].end(), c) !=
                 active[a].end();
      if (!has || rng.next_below(3) == 0) continue;
      double w = 0.5 + 1.5 * rng.next_double();
      row.var_index.push_back(out.cs.var_of(a, c));
      row.weight.push_back(w);
      int idx = int(std::find(active[a].begin(), active[a].end(), c) -
                    active[a].begin());
      value_at_ref += w * ref[a][idx];
      weight_abs += w;
    }
    if (row.var_index.empty()) {
      row.var_index.push_back(out.cs.var_of(0, c));
      row.weight.push_back(1.0);
      int idx = int(std::find(active[0].begin(), active[0].end(), c) -
                    active[0].begin());
      value_at_ref = ref[0][idx];
      weight_abs = 1.0;
    }
    if (r == poisoned) {
      row.lo = weight_abs + 0.05 + rng.next_double();
      row.hi = row.lo + 0.3;
    } else {
      double slack = 0.2 + 0.3 * rng.next_double();
      row.lo = value_at_ref - slack;
      row.hi = value_at_ref + slack;
    }
    out.cs.add_row(std::move(row));
  }
  return out;
}

// Dense grid search over the active components at resolution 0.02.
bool grid_feasible(const OracleCase& oc) {
  const int dims = int(oc.dims.size());
  std::vector<int> odo(dims, 0);
  const int steps = 101;  // -1.00, -0.98, ..., 1.00
  VectorXd x = VectorXd::Zero(oc.cs.var_count());
  while (true) {
    bool ball_ok = true;
    std::vector<double> norms(oc.cs.atom_count(), 0.0);
    for (int i = 0; i < dims; ++i) {
      double v = -1.0 + 0.02 * odo[i];
      x(oc.cs.var_of(oc.dims[i].first, oc.dims[i].second)) = v;
      norms[oc.dims[i].first] += v * v;
    }
    for (double nsq : norms)
      if (nsq > 1.0 + 1e-12) ball_ok = false;
    if (ball_ok) {
      bool rows_ok = true;
      for (const auto& row : oc.cs.rows()) {
        double v = row.value(x);
        if (v < row.lo - 1e-12 || v > row.hi + 1e-12) {
          rows_ok = false;
          break;
        }
      }
      if (rows_ok) return true;
    }
    int pos = dims - 1;
    while (pos >= 0) {
      if (++odo[pos] < steps) break;
      odo[pos] = 0;
      --pos;
    }
    if (pos < 0) return false;
  }
}

}  // namespace

TEST_CASE("all-zero witness for centered guesses") {
  ConstraintSet cs(2, 2);
  AffineRow row;
  row.var_index = {cs.var_of(0, 3), cs.var_of(1, 3)};
  row.weight = {1.0, 1.0};
  row.lo = -1.0;
  row.hi = 1.0;
  cs.add_row(row);
  FeasOptions opts;
  auto res = check_feasible(cs, opts);
  REQUIRE(res.status == FeasStatus::kFeasible);
  CHECK(res.witness.norm() < 1e-6);
}

TEST_CASE("single qubit pinned to the X pole") {
  ConstraintSet cs(1, 2);
  AffineRow row;
  row.var_index = {cs.var_of(0, 1)};
  row.weight = {1.0};
  row.lo = 0.5;  // guess 1 with slack gamma*n = 0.5
  row.hi = 1.5;
  cs.add_row(row);
  FeasOptions opts;
  auto res = check_feasible(cs, opts);
  REQUIRE(res.status == FeasStatus::kFeasible);
  CHECK(res.witness(0) >= 0.5 - 1e-7);
  CHECK(res.witness.norm() <= 1.0 + 1e-7);
}

TEST_CASE("plainly contradictory rows are infeasible") {
  ConstraintSet cs(1, 2);
  AffineRow a{{cs.var_of(0, 1)}, {1.0}, 0.8, 1.0};
  AffineRow b{{cs.var_of(0, 1)}, {1.0}, -1.0, -0.8};
  cs.add_row(a);
  cs.add_row(b);
  FeasOptions opts;
  auto res = check_feasible(cs, opts);
  CHECK(res.status != FeasStatus::kFeasible);
}

TEST_CASE("agreement with the 0.02-resolution grid-search oracle") {
  int feasible_count = 0;
  for (int i = 0; i < 200; ++i) {
    bool expect_feasible = false;
    OracleCase oc = make_case(52000 + i, &expect_feasible);
    bool oracle = grid_feasible(oc);
    FeasOptions opts;
    opts.inner_radius = 0.005;
    auto res = check_feasible(oc.cs, opts);
    bool solver = res.status == FeasStatus::kFeasible;
    CHECK(solver == oracle);
    if (solver) {
      ++feasible_count;
      CHECK(oc.cs.violation(res.witness) <= 1e-7);
    }
  }
  CHECK(feasible_count > 50);  // both branches exercised
  CHECK(feasible_count < 200);
}
