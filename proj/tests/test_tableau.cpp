#include <doctest.h>

#include "gammoid/catalog.hpp"
#include "gammoid/digraph.hpp"
#include "gammoid/tableau.hpp"
#include "oracles.hpp"

using namespace gammoid;

namespace {

const Matroid& gd() {
  static const Matroid m = g841().dual();
  return m;
}

Matroid g7s() { return gd().restricted(mask_from_1based({1, 2, 3, 4, 5, 6, 7})); }

struct Walkthrough {
  Tableau t1;       // extended joint of the two seeds
  Tableau t2;       // with the deflate identified
  Tableau t3;       // decisive
  CanonicalKey kg, kgd, kg7s, kg7;
};

Walkthrough build_walkthrough() {
  const Tableau tg = seed_tableau(g841());
  const Tableau tgd = seed_tableau(gd());
  Tableau t1 = extended(join(tg, tgd));
  const CanonicalKey kg = canonical_key(g841());
  const CanonicalKey kgd = canonical_key(gd());
  const Tableau tg7s = seed_tableau(g7s());
  const CanonicalKey kg7s = canonical_key(g7s());
  Tableau t2 = identify(join(t1, tg7s), kg7s, kgd);
  const Tableau tg7 = seed_tableau(g7s().dual());
  const CanonicalKey kg7 = canonical_key(g7s().dual());
  Tableau t3 = expansion(extended(join(t2, tg7)));
  return {std::move(t1), std::move(t2), std::move(t3), kg, kgd, kg7s, kg7};
}

}  // namespace

TEST_CASE("seed tableaux pick the strongest rule") {
  const Tableau tg = seed_tableau(g841());
  CHECK(tg.family_keys(Family::gammoids).empty());
  CHECK(tg.family_keys(Family::excluded).empty());
  CHECK(tg.family_keys(Family::intermediates) ==
        std::vector<CanonicalKey>{tg.goal_key()});

  const Tableau t7 = seed_tableau(g7s().dual());
  CHECK(t7.in_family(t7.goal_key(), Family::gammoids));
  CHECK(t7.family_keys(Family::excluded).empty());
  CHECK(t7.family_keys(Family::intermediates).empty());

  const Tableau tk4 = seed_tableau(mk4());
  CHECK(tk4.family_keys(Family::excluded) ==
        std::vector<CanonicalKey>{tk4.goal_key()});  // self-dual: one key
  CHECK(tk4.entry(tk4.goal_key()).cert_excluded.kind ==
        Certificate::Kind::rank3_alpha);

  const Tableau tu = seed_tableau(u24());
  CHECK(tu.in_family(tu.goal_key(), Family::gammoids));
}

TEST_CASE("joint tableau unions families and merges equivalences") {
  const Tableau tg = seed_tableau(g841());
  CHECK(join(std::vector<Tableau>{tg}).same_content(tg));
  const Walkthrough w = build_walkthrough();
  CHECK(w.t1.in_family(w.kg, Family::intermediates));
  CHECK(w.t1.in_family(w.kgd, Family::intermediates));
  CHECK(w.t1.same_class(w.kg, w.kgd));  // merged by the extended derivation
  CHECK(w.t1.family_keys(Family::gammoids).empty());
}

TEST_CASE("join is idempotent, commutative, and associative by content") {
  const Tableau a = seed_tableau(g841());
  const Tableau b = seed_tableau(mk4());
  const Tableau c = seed_tableau(u24());
  CHECK(join(a, a).same_content(a));
  // Goal comes from the first operand, so compare with matching first slots.
  CHECK(join(join(a, b), c).same_content(join(a, join(b, c))));
  CHECK(join(std::vector<Tableau>{a, b, c})
            .same_content(join(join(a, b), c)));
  const Tableau ab = join(a, b);
  const Tableau ab_flip = join(std::vector<Tableau>{a, c, b});
  CHECK(join(ab, c).same_content(ab_flip));
}

TEST_CASE("identified tableau requires a real deflate") {
  const Walkthrough w = build_walkthrough();
  CHECK(w.t2.same_class(w.kgd, w.kg7s));
  CHECK(w.t2.same_class(w.kg, w.kg7s));
  // Identity identification is a no-op.
  const Tableau same = identify(w.t2, w.kg7s, w.kg7s);
  CHECK(same.same_content(w.t2));
  // U(2,4) is not a deflate of the example matroid.
  Tableau with_u24 = join(w.t2, seed_tableau(u24()));
  CHECK_THROWS_AS(identify(with_u24, canonical_key(u24()), w.kg), NotADeflate);
}

TEST_CASE("expansion pulls classes into the resolved families") {
  const Walkthrough w = build_walkthrough();
  // In t3 the goal's class contains the certified gammoid, so expansion has
  // pulled the whole class, including the goal, into the gammoids.
  CHECK(w.t3.in_family(w.kg, Family::gammoids));
  CHECK(w.t3.in_family(w.kgd, Family::gammoids));
  CHECK(expansion(w.t3).same_content(w.t3));  // idempotent
  // The symmetric rule for excluded matroids.
  Tableau x = seed_tableau(mk4());
  Tableau y = join(Tableau(mk4()), x);
  y.register_matroid(Matroid::uniform(3, 6));
  y.merge(canonical_key(mk4()), canonical_key(Matroid::uniform(3, 6)));
  const Tableau expanded = expansion(y);
  CHECK(expanded.in_family(canonical_key(Matroid::uniform(3, 6)), Family::excluded));
}

TEST_CASE("extended tableau adds duals and not-strict knowledge") {
  Tableau t = seed_tableau(u24());
  const std::size_t before = t.family_keys(Family::gammoids).size();
  const Tableau e = extended(t);
  // Self-dual up to isomorphism: no new keys.
  CHECK(e.family_keys(Family::gammoids).size() == before);
  Tableau tx = seed_tableau(mk4());
  const Tableau ex = extended(tx);
  CHECK(ex.in_family(canonical_key(mk4()), Family::intermediates));
  // Dual-merging covers plain registered matroids too.
  Tableau reg(g841());
  reg.register_matroid(gd());
  const Tableau ereg = extended(reg);
  CHECK(ereg.same_class(canonical_key(g841()), canonical_key(gd())));
}

TEST_CASE("decisiveness of the walkthrough tableaux") {
  const Walkthrough w = build_walkthrough();
  Tableau goal_t2 = join(Tableau(g841()), w.t2);
  CHECK(!is_decisive(goal_t2).has_value());
  Tableau goal_t3 = join(Tableau(g841()), w.t3);
  const auto v = is_decisive(goal_t3);
  REQUIRE(v.has_value());
  CHECK(v->decision == Verdict::Decision::gammoid);
  CHECK(v->decisive_case == 1);
  REQUIRE(v->witness_key.has_value());
  CHECK(goal_t3.same_class(*v->witness_key, w.kg));
}

TEST_CASE("decisive case ii on an excluded goal") {
  Tableau t = join(Tableau(mk4()), seed_tableau(mk4()));
  const auto v = is_decisive(t);
  REQUIRE(v.has_value());
  CHECK(v->decision == Verdict::Decision::not_gammoid);
  CHECK(v->decisive_case == 2);
  REQUIRE(v->witness_minor.has_value());
  CHECK(v->witness_minor->contract == 0);
  CHECK(v->witness_minor->remove == 0);
}

TEST_CASE("decisive case iii by artificial exhaustion") {
  const Matroid goal = Matroid::uniform(1, 1);
  Tableau t(goal);
  ExtensionStream stream(goal, size_bound(goal));
  while (auto ext = stream.next()) {
    Certificate c;
    c.kind = Certificate::Kind::imported;
    c.text = "imported";
    t = join(t, make_seed(*ext, {{*ext, Family::intermediates, c}}, "harness"));
  }
  const auto v = is_decisive(t);
  REQUIRE(v.has_value());
  CHECK(v->decisive_case == 3);
  CHECK(v->decision == Verdict::Decision::not_gammoid);
  const Tableau concluded = conclusion(t);
  CHECK(concluded.in_family(t.goal_key(), Family::excluded));
}

TEST_CASE("conclusion honors the decisive case") {
  const Walkthrough w = build_walkthrough();
  Tableau goal_t3 = join(Tableau(g841()), w.t3);
  const Tableau concluded = conclusion(goal_t3);
  CHECK(concluded.in_family(w.kg, Family::gammoids));
  CHECK(concluded.entry(w.kg).all_minors_gammoid);
  CHECK_THROWS_AS(conclusion(join(Tableau(g841()), w.t2)), NotDecisive);
  Tableau tx = join(Tableau(mk4()), seed_tableau(mk4()));
  const Tableau xconc = conclusion(tx);
  CHECK(xconc.in_family(canonical_key(mk4()), Family::excluded));
}

TEST_CASE("sub-tableau selection") {
  const Walkthrough w = build_walkthrough();
  const Tableau full = sub_tableau(w.t3, full_selection(w.t3));
  CHECK(full.same_content(w.t3));
  Selection bare;
  const Tableau empty_sel = sub_tableau(w.t3, bare);
  CHECK(empty_sel.family_keys(Family::gammoids).empty());
  CHECK(empty_sel.family_keys(Family::intermediates).empty());
  // Dropping only the excluded family keeps a valid selection.
  Selection keep = full_selection(w.t3);
  keep.excluded.clear();
  CHECK_NOTHROW(sub_tableau(w.t3, keep));
  // A pair that is not equivalent in the source is rejected.
  Selection bad;
  bad.equiv_pairs.emplace_back(w.kg, canonical_key(Matroid::uniform(1, 1)));
  CHECK_THROWS_AS(sub_tableau(w.t3, bad), InvalidSelection);
  // t2 has no gammoids yet, so selecting one there is invalid.
  Selection bad_family;
  bad_family.gammoids.insert(w.kg7s);
  CHECK_THROWS_AS(sub_tableau(w.t2, bad_family), InvalidSelection);
}

TEST_CASE("audit accepts honest tableaux") {
  for (const Matroid& m : {g841(), mk4(), u24(), Matroid::uniform(2, 5)}) {
    const Tableau t = seed_tableau(m);
    const AuditReport report = is_valid(t);
    CHECK(report.ok);
    CHECK(report.failures.empty());
    CHECK(report.unverified.empty());
  }
  const Walkthrough w = build_walkthrough();
  const AuditReport report = is_valid(w.t3);
  CHECK(report.ok);
  CHECK(report.failures.empty());
}

TEST_CASE("audit flags a gammoid planted among the excluded") {
  Tableau t(u24());
  Certificate fake;
  fake.kind = Certificate::Kind::imported;
  fake.text = "imported";
  t = join(t, make_seed(u24(), {{u24(), Family::excluded, fake}}, "sabotage"));
  const AuditReport report = is_valid(t);
  CHECK(!report.ok);
  REQUIRE(!report.failures.empty());
  CHECK(report.failures.front().find("strict gammoid") != std::string::npos);
}

TEST_CASE("audit reports open classes and is vacuous on bare tableaux") {
  const Tableau bare(u24());
  const AuditReport report = is_valid(bare);
  CHECK(report.ok);
  CHECK(report.checked == 0);
  CHECK(report.open_classes == 1);  // the goal's own unresolved class
}

TEST_CASE("log replay rebuilds the tableau") {
  const Walkthrough w = build_walkthrough();
  for (const Tableau* t : {&w.t1, &w.t2, &w.t3}) {
    const Tableau again = replay_log(t->goal(), t->log());
    CHECK(again.same_content(*t));
  }
}

TEST_CASE("randomized derivation pipelines preserve validity") {
  std::vector<Matroid> pool = {u24(), mk4(), Matroid::uniform(1, 2),
                               Matroid::uniform(2, 5), Matroid::uniform(3, 3)};
  for (std::uint64_t seed = 1; seed <= 10; ++seed)
    pool.push_back(random_gammoid(seed, 6, 5).second);
  std::uint64_t state = 12345;
  auto rng = [&]() {
    state ^= state << 13;
    state ^= state >> 7;
    state ^= state << 17;
    return state;
  };
  for (int round = 0; round < 40; ++round) {
    Tableau t = seed_tableau(pool[rng() % pool.size()]);
    for (int op = 0; op < 6; ++op) {
      switch (rng() % 4) {
        case 0: t = join(t, seed_tableau(pool[rng() % pool.size()])); break;
        case 1: t = expansion(t); break;
        case 2: t = extended(t); break;
        case 3: {
          const auto keys = t.all_keys();
          const CanonicalKey k = keys[rng() % keys.size()];
          const Matroid& m = t.entry(k).matroid;
          if (m.size() == 0) break;
          auto [deflate, cert] = minimal_deflate(m);
          if (cert.trivial()) break;
          t = join(t, seed_tableau(deflate));
          t = identify(t, canonical_key(deflate), k, cert);
          break;
        }
      }
      const AuditReport report = is_valid(t);
      CHECK(report.ok);
      CHECK(report.failures.empty());
    }
  }
}
