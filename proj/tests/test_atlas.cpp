#include <doctest.h>

#include <set>

#include "qpsa/errors.hpp"
#include "qpsa/ham_cut.hpp"
#include "qpsa/rng.hpp"
#include "test_helpers.hpp"

using namespace qpsa;

namespace {

std::vector<int> range_set(int lo, int hi) {  // [lo, hi)
  std::vector<int> out;
  for (int v = lo; v < hi; ++v) out.push_back(v);
  return out;
}

}  // namespace

TEST_CASE("single full-side atlas has one atom") {
  RefinementAtlas atlas(8, {range_set(0, 8), range_set(0, 8)});
  CHECK(atlas.atom_count() == 1);
  for (int v = 0; v < 8; ++v) CHECK(atlas.atom_of(v) == 0);
}

TEST_CASE("disjoint cover gives two atoms") {
  RefinementAtlas atlas(6, {range_set(0, 3), range_set(3, 6)});
  CHECK(atlas.atom_count() == 2);
  CHECK(atlas.atom_of(0) == atlas.atom_of(2));
  CHECK(atlas.atom_of(3) == atlas.atom_of(5));
  CHECK(atlas.atom_of(0) != atlas.atom_of(3));
}

TEST_CASE("random sides: atoms partition and sides are unions of atoms") {
  const int n = 100;
  Rng rng(404);
  std::vector<std::vector<int>> sides;
  for (int s = 0; s < 6; ++s) {
    std::vector<int> side;
    for (int v = 0; v < n; ++v)
      if (rng.next_below(2)) side.push_back(v);
    sides.push_back(std::move(side));
  }
  RefinementAtlas atlas(n, sides);

  // Partition: every vertex in exactly one atom, sizes sum to n.
  std::size_t total = 0;
  for (const auto& members : atlas.atom_members()) total += members.size();
  CHECK(total == std::size_t(n));

  // Brute-force membership signature per vertex matches the atom structure.
  auto signature = [&](int v) {
    std::uint32_t sig = 0;
    for (size_t s = 0; s < atlas.sides().size(); ++s)
      if (std::binary_search(atlas.sides()[s].begin(), atlas.sides()[s].end(),
                             v))
        sig |= (1u << s);
    return sig;
  };
  for (int u = 0; u < n; ++u)
    for (int v = 0; v < n; ++v)
      CHECK((atlas.atom_of(u) == atlas.atom_of(v)) ==
            (signature(u) == signature(v)));

  // Every side is an exact union of atoms.
  for (size_t s = 0; s < atlas.sides().size(); ++s) {
    std::set<int> rebuilt;
    for (int a : atlas.atoms_in_side(int(s)))
      rebuilt.insert(atlas.atom_members()[a].begin(),
                     atlas.atom_members()[a].end());
    std::set<int> expected(atlas.sides()[s].begin(), atlas.sides()[s].end());
    CHECK(rebuilt == expected);
  }
}

TEST_CASE("side cap enforced") {
  std::vector<std::vector<int>> sides;
  for (int s = 0; s < 25; ++s) sides.push_back({s});
  CHECK_THROWS_AS(RefinementAtlas(30, sides), SizeLimitError);
}

TEST_CASE("exact atom sizes") {
  RefinementAtlas atlas(10, {range_set(0, 4)});
  auto est = estimate_atom_sizes(atlas, 0.1, 0.01, 7);
  CHECK(est.exact);
  REQUIRE(est.sizes.size() == 2);
  CHECK(est.sizes[0] + est.sizes[1] == doctest::Approx(10.0));

  RefinementAtlas one(7, {range_set(0, 7)});
  auto est1 = estimate_atom_sizes(one, 0.1, 0.01, 7);
  CHECK(est1.sizes[0] == doctest::Approx(7.0));
}

TEST_CASE("sampled atom sizes meet the Hoeffding failure budget") {
  // Two equal atoms on n = 10000; force sampling and calibrate empirically.
  const int n = 10000;
  RefinementAtlas atlas(n, {range_set(0, n / 2)});
  const double target = 0.02, delta = 0.05;
  int failures = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    auto est = estimate_atom_sizes(atlas, target, delta, 100 + t, true);
    CHECK_FALSE(est.exact);
    for (double sz : est.sizes)
      if (std::abs(sz - n / 2.0) > target * n) {
        ++failures;
        break;
      }
  }
  CHECK(double(failures) / trials <= delta);
}
