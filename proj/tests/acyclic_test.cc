#include <gtest/gtest.h>

#include <set>

#include "chasekit/acyclic.h"
#include "chasekit/chase.h"
#include "chasekit/parser.h"
#include "generators.h"

using namespace chasekit;

namespace {

std::vector<Atom> atoms(std::initializer_list<const char*> xs) {
  std::vector<Atom> out;
  for (const char* x : xs) out.push_back(parse_query(std::string("q() :- ") + x).body[0]);
  return out;
}

std::vector<Term> vars(std::initializer_list<const char*> xs) {
  std::vector<Term> out;
  for (const char* x : xs) out.push_back(Term::variable(x));
  return out;
}

// Does some parent array over the atoms form a forest in which every value
// outside s sits on a connected set of nodes?
bool brute_acyclic(const std::vector<Atom>& in, const std::vector<Term>& s) {
  std::vector<Atom> a;
  for (const Atom& x : in) {
    if (std::find(a.begin(), a.end(), x) == a.end()) a.push_back(x);
  }
  std::size_t n = a.size();
  std::vector<std::size_t> par(n, 0);  // value n means root
  auto hidden = [&](const Term& t) { return std::find(s.begin(), s.end(), t) != s.end(); };
  while (true) {
    bool forest = true;
    for (std::size_t i = 0; i < n && forest; ++i) {
      std::size_t cur = i;
      for (std::size_t steps = 0; par[cur] != n; ++steps) {
        if (par[cur] == i || steps > n) {
          forest = false;
          break;
        }
        cur = par[cur];
      }
      if (par[i] == i) forest = false;
    }
    if (forest) {
      bool ok = true;
      for (const Term& t : terms_of(std::span<const Atom>(a))) {
        if (hidden(t)) continue;
        std::size_t holders = 0, linked = 0;
        for (std::size_t i = 0; i < n; ++i) {
          auto ti = terms_of(a[i]);
          if (std::find(ti.begin(), ti.end(), t) == ti.end()) continue;
          ++holders;
          if (par[i] != n) {
            auto tp = terms_of(a[par[i]]);
            if (std::find(tp.begin(), tp.end(), t) != tp.end()) ++linked;
          }
        }
        // a connected subgraph of a forest has exactly one node whose parent lacks t
        if (holders != linked + 1) ok = false;
      }
      if (ok) return true;
    }
    std::size_t k = 0;
    while (k < n && ++par[k] == n + 1) par[k++] = 0;
    if (k == n) return false;
  }
}

CQ squid_query() {
  return parse_query(
      "q() :- r(X,Y), r(X,Z), r(Y,Z), r(Z,V1), r(V1,V2), r(V2,V3), r(V3,V4), r(V4,V5), "
      "r(V1,V6), r(V6,V5), r(V5,V7), r(Z,U1), s(U1,U2,U3), r(U3,U4), r(U3,U5), r(U4,U5)");
}

TermMap squid_h(const std::vector<Atom>& q_plus) {
  TermMap h;
  for (const Term& v : variables_of(q_plus)) h[v] = v;
  h[Term::variable("V6")] = Term::variable("V2");
  for (const char* v : {"V4", "V5", "V7"}) h[Term::variable(v)] = Term::variable("V3");
  return h;
}

}  // namespace

TEST(JoinForest, Chain) {
  auto a = atoms({"r(X,Y)", "r(Y,Z)"});
  auto f = s_join_forest(a, {});
  ASSERT_TRUE(f);
  EXPECT_TRUE(validate_join_forest(f->forest, a));
  EXPECT_TRUE(validate_tree_decomposition(f->decomposition, a));
}

TEST(JoinForest, TriangleNeedsHiddenValues) {
  auto a = atoms({"r(X,Y)", "r(Y,Z)", "r(Z,X)"});
  EXPECT_FALSE(is_s_acyclic(a, {}));
  // hiding one value already breaks the cycle
  EXPECT_TRUE(is_s_acyclic(a, vars({"X"})));
  auto f = s_join_forest(a, vars({"X", "Y", "Z"}));
  ASSERT_TRUE(f);
  EXPECT_TRUE(validate_join_forest(f->forest, a));
  EXPECT_EQ(f->decomposition.width(), 2);
}

TEST(JoinForest, CoveredTriangleIsAcyclic) {
  EXPECT_TRUE(is_s_acyclic(atoms({"r(X,Y)", "r(Y,Z)", "r(Z,X)", "s(X,Y,Z)"}), {}));
}

TEST(JoinForest, ValidatorCatchesBrokenForest) {
  auto a = atoms({"r(X,Y)", "r(Y,Z)", "r(Z,W)"});
  JoinForest f{a, {std::nullopt, std::nullopt, 1}, {}};
  std::string why;
  EXPECT_FALSE(validate_join_forest(f, a, &why));
  EXPECT_FALSE(why.empty());
  JoinForest cyc{a, {1, 0, 1}, {}};
  EXPECT_FALSE(validate_join_forest(cyc, a));
}

TEST(JoinForest, AgreesWithBruteForce) {
  testgen::Rng rng(71);
  std::vector<Predicate> schema{Predicate("r", 2), Predicate("s", 3), Predicate("u", 1)};
  int acyclic = 0, cyclic = 0;
  for (int i = 0; i < 300; ++i) {
    CQ q = testgen::random_query(rng, schema, 5, 0, 5);
    std::vector<Term> s;
    for (const Term& v : variables_of(q.body)) {
      if (rng() % 5 == 0) s.push_back(v);
    }
    bool expected = brute_acyclic(q.body, s);
    auto f = s_join_forest(q.body, s);
    ASSERT_EQ(f.has_value(), expected) << q.to_string();
    if (f) {
      std::string why;
      ASSERT_TRUE(validate_join_forest(f->forest, q.body, &why)) << why;
      ASSERT_TRUE(validate_tree_decomposition(f->decomposition, q.body, &why)) << why;
      ++acyclic;
    } else {
      ++cyclic;
    }
  }
  EXPECT_GT(acyclic, 20);
  EXPECT_GT(cyclic, 5);
}

TEST(JoinForest, ChaseNullPartIsAcyclicOverDatabase) {
  testgen::Rng rng(43);
  testgen::Shape shape;
  for (int i = 0; i < 150; ++i) {
    auto sc = testgen::random_wg_scenario(rng, shape);
    ChaseOptions o;
    o.max_steps = 500;
    ChaseResult r = run_chase(sc.database, Dependencies{sc.tgds, {}}, o);
    if (r.status != ChaseStatus::kSaturated) continue;
    GroundSplit g = split_ground(r.instance, sc.database);
    std::vector<Term> s = sc.database.domain();
    auto f = s_join_forest(g.nulls.atoms(), s);
    ASSERT_TRUE(f) << r.instance.to_string();
    std::string why;
    ASSERT_TRUE(validate_tree_decomposition(f->decomposition, g.nulls.atoms(), &why)) << why;
    std::size_t w = 0;
    for (const Predicate& p : sc.schema) w = std::max(w, p.arity());
    ASSERT_LE(f->decomposition.width(), static_cast<long>(s.size() + w));
  }
}

TEST(TreeDecomposition, Validator) {
  auto a = atoms({"r(X,Y)", "r(Y,Z)"});
  TreeDecomposition ok{{vars({"X", "Y"}), vars({"Y", "Z"})}, {std::nullopt, 0}};
  EXPECT_TRUE(validate_tree_decomposition(ok, a));
  TreeDecomposition missing{{vars({"X", "Y"}), vars({"Y"})}, {std::nullopt, 0}};
  EXPECT_FALSE(validate_tree_decomposition(missing, a));
  TreeDecomposition split{{vars({"X", "Y"}), vars({"Z"}), vars({"Y", "Z"})}, {std::nullopt, 0, 1}};
  EXPECT_FALSE(validate_tree_decomposition(split, a));
  EXPECT_EQ(ok.width(), 1);
  EXPECT_EQ(TreeDecomposition{}.width(), -1);
}

TEST(Squid, WorkedExample) {
  CQ q = squid_query();
  std::vector<Atom> q_plus = q.body;
  q_plus.push_back(atoms({"s(U3,U4,U5)"})[0]);
  SquidDecomposition s = make_squid(q_plus, squid_h(q_plus), vars({"X", "Y", "Z"}));
  std::string why;
  EXPECT_TRUE(validate_squid(q, s, &why)) << why;
  EXPECT_EQ(s.head, atoms({"r(X,Y)", "r(X,Z)", "r(Y,Z)"}));
  EXPECT_FALSE(squid_to_dot(s).empty());

  // without the extra atom the U3/U4/U5 triangle stays cyclic
  SquidDecomposition bare = make_squid(q.body, squid_h(q.body), vars({"X", "Y", "Z"}));
  EXPECT_FALSE(validate_squid(q, bare));
}

TEST(Squid, WorkedExampleIsEnumerated) {
  CQ q = squid_query();
  std::vector<Atom> q_plus = q.body;
  q_plus.push_back(atoms({"s(U3,U4,U5)"})[0]);
  SquidLimits lim;
  lim.fixed_cover = q_plus;
  lim.fixed_h = squid_h(q_plus);
  bool found = false;
  std::vector<Predicate> schema{Predicate("r", 2), Predicate("s", 3)};
  enumerate_squids(q, schema, lim, [&](const SquidDecomposition& s) {
    if (s.v_delta == vars({"X", "Y", "Z"})) found = true;
    return !found;
  });
  EXPECT_TRUE(found);
}

TEST(Squid, IdentityWithAllVariables) {
  CQ q = parse_query("q() :- r(X,Y), r(Y,Z), r(Z,X)");
  TermMap id;
  for (const Term& v : variables_of(q.body)) id[v] = v;
  SquidDecomposition s = make_squid(q.body, id, vars({"X", "Y", "Z"}));
  EXPECT_TRUE(validate_squid(q, s));
  EXPECT_TRUE(s.tentacles.empty());
  EXPECT_EQ(s.head.size(), 3u);
}

TEST(Squid, SingleAtomQuery) {
  CQ q = parse_query("q() :- r(X,Y)");
  std::size_t n = 0;
  auto e = enumerate_squids(q, {Predicate("r", 2)}, {}, [&](const SquidDecomposition& s) {
    EXPECT_TRUE(validate_squid(q, s));
    EXPECT_LE(s.q_plus.size(), 2u);
    ++n;
    return true;
  });
  EXPECT_GT(n, 0u);
  EXPECT_FALSE(e.truncated);
}

TEST(Squid, CandidateLimitTruncates) {
  CQ q = parse_query("q() :- r(X,Y), r(Y,Z)");
  SquidLimits lim;
  lim.max_candidates = 5;
  auto e = enumerate_squids(q, {Predicate("r", 2)}, lim, [](const SquidDecomposition&) { return true; });
  EXPECT_TRUE(e.truncated);
}

TEST(SquidLemma, SmallCases) {
  Instance d{parse_atom("r(a,b)")};
  std::vector<Tgd> tgds{parse_tgd("r(X,Y) -> exists Z: s(Y,Z)"), parse_tgd("s(X,Y) -> t(Y)")};
  SquidLemmaResult yes = verify_squid_lemma(d, tgds, parse_query("q() :- r(X,Y), s(Y,Z), t(Z)"));
  EXPECT_TRUE(yes.conclusive);
  EXPECT_TRUE(yes.chase_entails);
  EXPECT_TRUE(yes.holds);
  ASSERT_TRUE(yes.witness);
  EXPECT_TRUE(validate_squid(parse_query("q() :- r(X,Y), s(Y,Z), t(Z)"), *yes.witness));

  SquidLemmaResult no = verify_squid_lemma(d, tgds, parse_query("q() :- s(X,X)"));
  EXPECT_TRUE(no.conclusive);
  EXPECT_FALSE(no.chase_entails);
  EXPECT_FALSE(no.squid_side);
  EXPECT_TRUE(no.holds);

  SquidLemmaResult empty = verify_squid_lemma(d, tgds, parse_query("q()"));
  EXPECT_TRUE(empty.chase_entails);
  EXPECT_TRUE(empty.squid_side);
}

TEST(SquidLemma, InconclusiveOnBudget) {
  Instance d{parse_atom("r(a,b)")};
  std::vector<Tgd> tgds{parse_tgd("r(X,Y) -> exists Z: r(Y,Z)")};
  ChaseOptions o;
  o.max_steps = 20;
  SquidLemmaResult r = verify_squid_lemma(d, tgds, parse_query("q() :- r(X,X)"), o);
  EXPECT_FALSE(r.conclusive);
}

TEST(Dot, JoinForest) {
  auto a = atoms({"r(X,Y)", "r(Y,Z)"});
  auto f = s_join_forest(a, {});
  ASSERT_TRUE(f);
  EXPECT_EQ(join_forest_to_dot(f->forest).rfind("graph", 0), 0u);
}
