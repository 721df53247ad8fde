#include <doctest.h>

#include "gammoid/catalog.hpp"
#include "gammoid/matroid.hpp"
#include "oracles.hpp"

using namespace gammoid;

namespace {

std::vector<Matroid> property_corpus() {
  return {
      Matroid::uniform(2, 4),  Matroid::uniform(1, 2), Matroid::uniform(1, 3),
      Matroid::uniform(0, 3),  Matroid::uniform(3, 3), mk4(),
      Matroid::direct_sum(Matroid::uniform(1, 2), Matroid::uniform(1, 2)),
      Matroid::direct_sum(Matroid::uniform(2, 3), Matroid::uniform(0, 1)),
      g841(),
  };
}

}  // namespace

TEST_CASE("rank on named matroids") {
  const Matroid u = u24();
  CHECK(u.rank_of(mask_of({0, 1, 2})) == 2);
  CHECK(u.rank_of(0) == 0);
  // The five dependent 4-sets of g841 have rank 3.
  CHECK(g841().rank_of(mask_from_1based({1, 3, 7, 8})) == 3);
  CHECK(g841().rank_of(mask_from_1based({2, 4, 7, 8})) == 3);
  CHECK(g841().rank() == 4);
}

TEST_CASE("closure on small matroids") {
  CHECK(u24().closure(mask_of({0})) == mask_of({0}));
  CHECK(u24().closure(mask_of({0, 1})) == full_mask(4));
  const Matroid u12 = Matroid::uniform(1, 2);
  CHECK(u12.closure(mask_of({0})) ==
        oracles::naive_closure(u12.bases(), 2, mask_of({0})));
  CHECK(u12.closure(mask_of({0})) == full_mask(2));
}

TEST_CASE("flats against the brute-force oracle") {
  for (const Matroid& m : {u24(), Matroid::uniform(1, 2), mk4()}) {
    const auto expect = oracles::naive_flats(m.bases(), m.size());
    auto got = m.flats();
    std::sort(got.begin(), got.end());
    CHECK(got == expect);
  }
  CHECK(u24().flats().size() == 6);
  CHECK(Matroid::uniform(1, 2).flats().size() == 2);
  // M(K4): the empty set, 6 points, 4 triangle lines, 3 two-edge lines, E.
  CHECK(mk4().flats().size() == 15);
}

TEST_CASE("dual matroids") {
  CHECK(u24().dual() == u24());
  // Non-basis 4-sets of the dual of g841 are the complements of the primal ones.
  const Matroid dual = g841().dual();
  std::vector<Mask> expect_nonbases = {
      mask_from_1based({1, 2, 3, 8}), mask_from_1based({1, 3, 5, 6}),
      mask_from_1based({1, 4, 5, 7}), mask_from_1based({2, 3, 4, 7}),
      mask_from_1based({2, 4, 5, 6})};
  std::sort(expect_nonbases.begin(), expect_nonbases.end());
  std::vector<Mask> nonbases;
  for_each_subset_of_size(full_mask(8), 4, [&](Mask x) {
    if (!dual.is_basis(x)) nonbases.push_back(x);
  });
  std::sort(nonbases.begin(), nonbases.end());
  CHECK(nonbases == expect_nonbases);
}

TEST_CASE("dual involution and rank duality") {
  for (const Matroid& m : property_corpus()) {
    CHECK(m.dual().dual().bases() == m.bases());
    CHECK(m.dual().rank() == m.size() - m.rank());
  }
}

TEST_CASE("minors of uniform matroids") {
  const Matroid del = u24().minor(MinorSpec{0, bit(3)});
  CHECK(del.bases() == Matroid::uniform(2, 3).bases());
  const Matroid con = u24().minor(MinorSpec{bit(3), 0});
  CHECK(con.bases() == Matroid::uniform(1, 3).bases());
}

TEST_CASE("contraction through dependent sets uses the rank formula") {
  // Contracting a parallel pair of U(1,2) u U(1,2) kills both classes' rank.
  const Matroid m = Matroid::direct_sum(Matroid::uniform(1, 2), Matroid::uniform(1, 2));
  const Matroid q = m.minor(MinorSpec{mask_of({0, 1}), 0});
  CHECK(q.size() == 2);
  CHECK(q.rank() == 1);
}

TEST_CASE("direct sums") {
  const Matroid two_coloops =
      Matroid::direct_sum(Matroid::uniform(1, 1), Matroid::uniform(1, 1));
  CHECK(two_coloops.bases() == Matroid::uniform(2, 2).bases());
  const Matroid with_loops = Matroid::direct_sum(g841(), Matroid::uniform(0, 2));
  CHECK(with_loops.rank() == g841().rank());
  CHECK(with_loops.size() == 10);
  CHECK(with_loops.loops() == (bit(8) | bit(9)));
  const Matroid pairs =
      Matroid::direct_sum(Matroid::uniform(1, 2), Matroid::uniform(1, 2));
  CHECK(pairs.bases().size() == 4);
  CHECK(pairs.rank() == 2);
}

TEST_CASE("rank is bounded, monotone, and submodular") {
  for (const Matroid& m : property_corpus()) {
    if (m.size() > 8) continue;
    const Mask full = m.ground_mask();
    for (Mask x = 0;; ++x) {
      CHECK(m.rank_of(x) <= popcount(x));
      for (Mask y = 0;; ++y) {
        CHECK(m.rank_of(x | y) + m.rank_of(x & y) <= m.rank_of(x) + m.rank_of(y));
        if ((x & y) == x && x != y) CHECK(m.rank_of(x) <= m.rank_of(y));
        if (y == full) break;
      }
      if (x == full) break;
    }
  }
}

TEST_CASE("closure is extensive, monotone, and idempotent") {
  for (const Matroid& m : property_corpus()) {
    if (m.size() > 8) continue;
    const Mask full = m.ground_mask();
    for (Mask x = 0;; ++x) {
      const Mask cl = m.closure(x);
      CHECK((cl & x) == x);
      CHECK(m.closure(cl) == cl);
      for (Mask y = x;; ++y) {
        if ((x & y) == x) CHECK((m.closure(y) & cl) == cl);
        if (y == full) break;
      }
      if (x == full) break;
    }
  }
}

TEST_CASE("contract and delete commute on disjoint masks") {
  for (const Matroid& m : property_corpus()) {
    if (m.size() > 7) continue;
    const Mask full = m.ground_mask();
    for_each_subset(full, [&](Mask c) {
      for_each_subset(full & ~c, [&](Mask d) {
        const Matroid ab = m.minor(MinorSpec{c, 0}).minor(
            MinorSpec{0, compress(d, full & ~c)});
        const Matroid ba = m.minor(MinorSpec{0, d}).minor(
            MinorSpec{compress(c, full & ~d), 0});
        CHECK(ab.bases() == ba.bases());
      });
    });
  }
}

TEST_CASE("axiom violations are rejected with a witness") {
  // {a,b} and {c,d} with no exchange between them.
  std::vector<Mask> bad = {mask_of({0, 1}), mask_of({2, 3})};
  CHECK_THROWS_AS(Matroid::from_bases(4, bad), InputError);
  try {
    Matroid::from_bases(4, bad);
  } catch (const InputError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("exchange") != std::string::npos);
  }
  CHECK_THROWS_AS(Matroid::from_bases(2, {mask_of({0}), mask_of({0, 1})}),
                  InputError);
  CHECK_THROWS_AS(Matroid::from_bases(3, {}), InputError);
  CHECK_THROWS_AS(Matroid::from_bases(2, {mask_of({2})}), InputError);
}

TEST_CASE("ground-set cap") {
  CHECK_THROWS_AS(Matroid::uniform(1, 21), SizeExceeded);
  CHECK_NOTHROW(Matroid::uniform(1, 20));
}
