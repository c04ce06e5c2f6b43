#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>

#include "chasekit/analysis.h"
#include "chasekit/chase.h"
#include "chasekit/clouds.h"
#include "chasekit/parser.h"
#include "chasekit/query.h"
#include "generators.h"

using namespace chasekit;

namespace {

Term xi(std::uint64_t i) { return Term::null(kCanonicalNullBase + i); }

std::vector<Atom> atoms(std::initializer_list<const char*> xs) {
  std::vector<Atom> out;
  for (const char* x : xs) out.push_back(parse_atom(x));
  return out;
}

// Tries every bijection between the nulls of the two sides.
bool brute_isomorphic(const Atom& a1, const std::vector<Atom>& s1, const Atom& a2,
                      const std::vector<Atom>& s2) {
  std::vector<Atom> l = s1, r = s2;
  l.push_back(a1);
  r.push_back(a2);
  std::vector<Term> n1, n2;
  for (const Term& t : terms_of(l)) if (t.is_null()) n1.push_back(t);
  for (const Term& t : terms_of(r)) if (t.is_null()) n2.push_back(t);
  if (n1.size() != n2.size()) return false;
  Instance target(r);
  std::vector<std::size_t> perm(n2.size());
  std::iota(perm.begin(), perm.end(), 0);
  do {
    TermMap m;
    for (std::size_t i = 0; i < n1.size(); ++i) m[n1[i]] = n2[perm[i]];
    if (!(substitute(m, a1) == a2)) continue;
    Instance img(substitute(m, std::span<const Atom>(s1)));
    if (img.same_atoms(Instance(s2))) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

Atom random_null_atom(testgen::Rng& rng, const char* pred, std::size_t arity, int nulls) {
  std::vector<Term> args;
  for (std::size_t i = 0; i < arity; ++i) {
    if (rng() % 3 == 0) {
      args.push_back(Term::constant(rng() % 2 ? "a" : "b"));
    } else {
      args.push_back(Term::null(1 + rng() % nulls));
    }
  }
  return Atom(pred, args);
}

// Drops atoms hanging below a ground node of a's subtree. Such a branch
// depends only on the ground part of the chase; the forest files it under
// whichever anchor derived that ground atom first.
Instance anchored(const ChaseResult& r, const Atom& a, const Instance& closure, const Instance& cloud) {
  Instance out;
  for (const Atom& x : closure.atoms()) {
    if (cloud.contains(x) || x == a) {
      out.insert(x);
      continue;
    }
    auto node = std::find_if(r.forest.begin(), r.forest.end(),
                             [&](const ForestNode& n) { return n.atom == x; });
    bool keep = true;
    for (auto p = node->parent; p && r.forest[*p].atom != a; p = r.forest[*p].parent) {
      if (!r.forest[*p].atom.has_nulls()) keep = false;
    }
    if (keep) out.insert(x);
  }
  return out;
}

}  // namespace

TEST(Canonicalize, WorkedExample) {
  Atom a = parse_atom("g(d,_:n1,_:n2,_:n1)");
  auto s = atoms({"p(_:n1)", "r(_:n2,_:n2)", "s(_:n1,_:n2,b)"});
  CanonicalPair c = canonicalize(a, s);
  Term d = Term::constant("d"), b = Term::constant("b");
  EXPECT_EQ(c.anchor, Atom("g", {d, xi(1), xi(2), xi(1)}));
  std::vector<Atom> expected{Atom("p", {xi(1)}), Atom("r", {xi(2), xi(2)}),
                             Atom("s", {xi(1), xi(2), b})};
  EXPECT_EQ(c.atoms, expected);
}

TEST(Canonicalize, Idempotent) {
  Atom a = parse_atom("g(_:n7,c,_:n3)");
  auto s = atoms({"p(_:n3,_:n7)", "q(c)"});
  CanonicalPair once = canonicalize(a, s);
  EXPECT_EQ(canonicalize(once.anchor, once.atoms), once);
}

TEST(Canonicalize, ForeignNullRejected) {
  EXPECT_THROW(canonicalize(parse_atom("g(_:n1)"), atoms({"p(_:n2)"})), std::invalid_argument);
}

TEST(DIsomorphic, Examples) {
  EXPECT_TRUE(d_isomorphic(parse_atom("p(a,_:n1,_:n2)"), {}, parse_atom("p(a,_:n3,_:n4)"), {}));
  EXPECT_FALSE(d_isomorphic(parse_atom("p(a,_:n1,_:n2)"), {}, parse_atom("p(a,_:n1,_:n1)"), {}));
  EXPECT_FALSE(d_isomorphic(parse_atom("p(a,_:n1)"), {}, parse_atom("p(b,_:n1)"), {}));
  auto s = atoms({"r(_:n1,_:n5)", "r(_:n5,a)"});
  EXPECT_TRUE(d_isomorphic(parse_atom("p(_:n1)"), s, parse_atom("p(_:n1)"), s));
  // extra nulls outside the anchor
  EXPECT_TRUE(d_isomorphic(parse_atom("p(_:n1)"), atoms({"r(_:n1,_:n5)"}), parse_atom("p(_:n2)"),
                           atoms({"r(_:n2,_:n9)"})));
  EXPECT_FALSE(d_isomorphic(parse_atom("p(_:n1)"), atoms({"r(_:n1,_:n5)"}), parse_atom("p(_:n2)"),
                            atoms({"r(_:n2,_:n2)"})));
}

TEST(DIsomorphic, AgreesWithBruteForceAndCanonicalKeys) {
  testgen::Rng rng(6);
  int positives = 0;
  for (int i = 0; i < 600; ++i) {
    Atom a1 = random_null_atom(rng, "g", 3, 3);
    std::vector<Atom> s1;
    for (int k = 0; k < 3; ++k) s1.push_back(random_null_atom(rng, k % 2 ? "p" : "r", 2, 3));
    // a renamed copy half the time, otherwise an independent pair
    TermMap perm;
    std::vector<std::uint64_t> ids{1, 2, 3};
    std::shuffle(ids.begin(), ids.end(), rng);
    for (std::uint64_t k = 1; k <= 3; ++k) perm[Term::null(k)] = Term::null(10 + ids[k - 1]);
    Atom a2 = substitute(perm, a1);
    std::vector<Atom> s2 = substitute(perm, std::span<const Atom>(s1));
    if (rng() % 2) {
      a2 = random_null_atom(rng, "g", 3, 3);
      s2.clear();
      for (int k = 0; k < 3; ++k) s2.push_back(random_null_atom(rng, k % 2 ? "p" : "r", 2, 3));
    }
    bool expected = brute_isomorphic(a1, s1, a2, s2);
    positives += expected;
    ASSERT_EQ(d_isomorphic(a1, s1, a2, s2), expected) << a1.to_string() << " / " << a2.to_string();
    auto nulls_in_anchor = [](const Atom& a, const std::vector<Atom>& s) {
      auto at = terms_of(a);
      for (const Term& t : terms_of(std::span<const Atom>(s))) {
        if (t.is_null() && std::find(at.begin(), at.end(), t) == at.end()) return false;
      }
      return true;
    };
    if (nulls_in_anchor(a1, s1) && nulls_in_anchor(a2, s2)) {
      ASSERT_EQ(canonicalize(a1, s1) == canonicalize(a2, s2), expected);
    }
  }
  EXPECT_GT(positives, 100);
}

TEST(CloudOf, ChainPrefix) {
  Instance d{parse_atom("r1(a,b)")};
  Instance b{parse_atom("r1(a,b)"), parse_atom("r3(b,_:n1)"), parse_atom("r2(b)"),
             parse_atom("r1(b,_:n2)")};
  Cloud c = cloud_of(b, d, parse_atom("r3(b,_:n1)"));
  EXPECT_TRUE(c.atoms.same_atoms(Instance{parse_atom("r1(a,b)"), parse_atom("r3(b,_:n1)"),
                                          parse_atom("r2(b)")}));
  Cloud g = cloud_of(b, d, parse_atom("r2(b)"));
  EXPECT_TRUE(g.atoms.same_atoms(Instance{parse_atom("r1(a,b)"), parse_atom("r2(b)")}));
  EXPECT_THROW(cloud_of(b, d, parse_atom("r9(a)")), std::invalid_argument);
}

TEST(BlockedSaturate, NoRules) {
  Instance d{parse_atom("r(a,b)"), parse_atom("r(b,a)"), parse_atom("s(a)")};
  BlockedResult r = blocked_saturate(d, {});
  EXPECT_TRUE(r.stabilized);
  EXPECT_TRUE(r.ground_atoms.same_atoms(d));
  EXPECT_EQ(r.store.size(), 3u);
}

TEST(BlockedSaturate, ChainStoreIsFinite) {
  Program p = parse_program(
      "tgd r3(X,Y) -> r2(X).\n"
      "tgd r1(X,Y) -> exists Z: r3(Y,Z).\n"
      "tgd r1(X,Y), r2(Y) -> exists Z: r1(Y,Z).\n"
      "tgd r1(X,Y) -> r2(Y).\n"
      "fact r1(a,b).\n");
  BlockedResult r = blocked_saturate(p.facts, p.tgds);
  EXPECT_TRUE(r.stabilized);
  EXPECT_FALSE(r.bound_violated);
  EXPECT_TRUE(r.ground_atoms.contains(parse_atom("r2(b)")));
  EXPECT_LE(r.max_cloud_size, r.cloud_bound);
  std::string json = store_stats_json(r);
  EXPECT_NE(json.find("\"entries\""), std::string::npos);
}

TEST(BlockedSaturate, RejectsNonWeaklyGuarded) {
  auto tgds = parse_program("tgd r(X) -> exists Z: s(Z). tgd s(X), s(Y) -> t(X,Y).").tgds;
  Instance d{parse_atom("r(a)")};
  EXPECT_THROW(blocked_saturate(d, tgds), std::invalid_argument);
  BlockedOptions o;
  o.force = true;
  EXPECT_NO_THROW(blocked_saturate(d, tgds, o));
}

// Ground atoms agree with a long oblivious chase on terminating inputs.
TEST(BlockedSaturate, AgreesWithTerminatingChase) {
  testgen::Rng rng(23);
  testgen::Shape shape;
  int compared = 0;
  for (int i = 0; i < 150; ++i) {
    auto s = testgen::random_wg_scenario(rng, shape);
    ChaseOptions o;
    o.max_steps = 2000;
    ChaseResult r = run_chase(s.database, Dependencies{s.tgds, {}}, o);
    if (r.status != ChaseStatus::kSaturated) continue;
    BlockedResult b = blocked_saturate(s.database, s.tgds);
    ASSERT_TRUE(b.stabilized);
    ASSERT_FALSE(b.bound_violated);
    GroundSplit g = split_ground(r.instance, s.database);
    ASSERT_TRUE(b.ground_atoms.same_atoms(g.ground)) << i;
    ++compared;
  }
  EXPECT_GT(compared, 80);
}

// Anchors with isomorphic (atom, cloud) pairs have isomorphic subtree closures.
TEST(Clouds, IsomorphicCloudsGiveIsomorphicSubtrees) {
  testgen::Rng rng(91);
  testgen::Shape shape;
  int pairs = 0;
  for (int i = 0; i < 200 && pairs < 200; ++i) {
    auto s = testgen::random_wg_scenario(rng, shape);
    ChaseOptions o;
    o.mode = ChaseMode::kOblivious;
    o.max_steps = 300;
    ChaseResult r = run_chase(s.database, Dependencies{s.tgds, {}}, o);
    if (r.status != ChaseStatus::kSaturated) continue;
    std::vector<std::pair<Atom, Instance>> clouds;
    for (const Atom& a : r.instance.atoms()) {
      if (!a.has_nulls()) continue;
      clouds.emplace_back(a, cloud_of(r.instance, s.database, a).atoms);
    }
    for (std::size_t x = 0; x < clouds.size(); ++x) {
      for (std::size_t y = x + 1; y < clouds.size(); ++y) {
        const auto& [a1, c1] = clouds[x];
        const auto& [a2, c2] = clouds[y];
        if (!d_isomorphic(a1, c1.atoms(), a2, c2.atoms())) continue;
        Instance n1 = anchored(r, a1, subtree_closure(r, a1, c1), c1);
        Instance n2 = anchored(r, a2, subtree_closure(r, a2, c2), c2);
        ASSERT_TRUE(d_isomorphic(a1, n1.atoms(), a2, n2.atoms()))
            << a1.to_string() << " vs " << a2.to_string();
        ++pairs;
      }
    }
  }
  EXPECT_GT(pairs, 10);
}

TEST(Clouds, SizeBoundOnRandomRuns) {
  testgen::Rng rng(37);
  testgen::Shape shape;
  for (int i = 0; i < 100; ++i) {
    auto s = testgen::random_wg_scenario(rng, shape);
    BlockedOptions o;
    BlockedResult b = blocked_saturate(s.database, s.tgds, o);
    ASSERT_FALSE(b.bound_violated);
    ASSERT_LE(static_cast<double>(b.max_cloud_size), b.cloud_bound);
  }
}
