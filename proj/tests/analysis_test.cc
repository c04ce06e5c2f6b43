#include <gtest/gtest.h>

#include "chasekit/analysis.h"
#include "chasekit/chase.h"
#include "chasekit/homomorphism.h"
#include "chasekit/parser.h"
#include "chasekit/rulesets.h"
#include "generators.h"

using namespace chasekit;

namespace {

std::vector<Tgd> example_affected() {
  return parse_program(
             "tgd p1(X,Y), p2(X,Y) -> exists Z: p2(Y,Z).\n"
             "tgd p2(X,Y), p2(W,X) -> p1(Y,X).\n")
      .tgds;
}

Position pos(const char* name, std::size_t arity, std::size_t slot) {
  return Position{Predicate(name, arity), slot};
}

// Straightforward fixpoint straight from the definition, scanning every
// position of every head on each round.
PositionSet brute_affected(const std::vector<Tgd>& tgds) {
  PositionSet out;
  for (const Tgd& t : tgds) {
    for (const Atom& h : t.head) {
      for (std::size_t i = 0; i < h.arity(); ++i) {
        if (t.is_existential(h.arg(i))) out.insert(Position{h.predicate(), i + 1});
      }
    }
  }
  for (bool changed = true; changed;) {
    changed = false;
    for (const Tgd& t : tgds) {
      for (const Atom& h : t.head) {
        for (std::size_t i = 0; i < h.arity(); ++i) {
          const Term& v = h.arg(i);
          if (!v.is_variable() || t.is_existential(v)) continue;
          bool all = true;
          for (const Atom& b : t.body) {
            for (std::size_t j = 0; j < b.arity(); ++j) {
              if (b.arg(j) == v && !out.count(Position{b.predicate(), j + 1})) all = false;
            }
          }
          if (all && out.insert(Position{h.predicate(), i + 1}).second) changed = true;
        }
      }
    }
  }
  return out;
}

// Multi-head restricted chase written directly against the homomorphism API.
bool naive_multihead_chase(const std::vector<Tgd>& tgds, Instance& b, std::size_t max_steps) {
  NullAllocator alloc(b);
  std::size_t steps = 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (const Tgd& t : tgds) {
      std::vector<TermMap> homs;
      for_each_match(t.body, b, [&](const TermMap& h, std::span<const AtomId>) {
        homs.push_back(h);
        return true;
      });
      for (const TermMap& h : homs) {
        MatchOptions o;
        o.initial = &h;
        if (find_homomorphism(t.head, b, o)) continue;
        if (++steps > max_steps) return false;
        TermMap ext = h;
        for (const Term& z : t.existentials) ext[z] = alloc.fresh();
        for (const Atom& a : t.head) b.insert(substitute(ext, a));
        changed = true;
      }
    }
  }
  return true;
}

Instance restrict_to(const Instance& b, const std::vector<Predicate>& schema) {
  Instance out;
  for (const Atom& a : b.atoms()) {
    if (std::find(schema.begin(), schema.end(), a.predicate()) != schema.end()) out.insert(a);
  }
  return out;
}

}  // namespace

TEST(Affected, WorkedExample) {
  PositionSet expected{pos("p2", 2, 2), pos("p1", 2, 1)};
  EXPECT_EQ(affected_positions(example_affected()), expected);
}

TEST(Affected, FllWithoutEgd) {
  PositionSet expected{pos("data", 3, 3),      pos("member", 2, 1), pos("type", 3, 1),
                       pos("mandatory", 2, 2), pos("funct", 2, 2),  pos("data", 3, 1)};
  EXPECT_EQ(affected_positions(fll_rules().tgds), expected);
}

TEST(Affected, PositionRendering) { EXPECT_EQ(pos("data", 3, 3).to_string(), "data[3]"); }

TEST(Affected, MatchesBruteForce) {
  testgen::Rng rng(99);
  testgen::Shape shape;
  shape.max_rules = 6;
  shape.max_arity = 4;
  shape.predicates = 4;
  shape.max_head = 2;
  for (int i = 0; i < 400; ++i) {
    auto schema = testgen::random_schema(rng, shape);
    auto tgds = testgen::random_tgds(rng, schema, shape);
    ASSERT_EQ(affected_positions(tgds), brute_affected(tgds));
  }
}

TEST(Affected, NullsOnlyAtAffectedPositions) {
  testgen::Rng rng(5);
  testgen::Shape shape;
  for (int i = 0; i < 200; ++i) {
    auto schema = testgen::random_schema(rng, shape);
    auto tgds = testgen::random_tgds(rng, schema, shape);
    Instance d = testgen::random_database(rng, schema, shape);
    ChaseOptions o;
    o.mode = ChaseMode::kOblivious;
    o.max_steps = 300;
    o.max_depth = 6;
    ChaseResult r = run_chase(d, Dependencies{tgds, {}}, o);
    PositionSet aff = affected_positions(tgds);
    for (const Atom& a : r.instance.atoms()) {
      for (std::size_t k = 0; k < a.arity(); ++k) {
        if (a.arg(k).is_null()) {
          ASSERT_TRUE(aff.count(Position{a.predicate(), k + 1})) << a.to_string();
        }
      }
    }
  }
}

TEST(Classify, WorkedExample) {
  Classification c = classify(example_affected());
  ASSERT_EQ(c.rules.size(), 2u);
  EXPECT_EQ(c.rules[0].label, RuleClass::kGuarded);
  EXPECT_EQ(c.rules[0].guard, 0u);
  EXPECT_EQ(c.rules[1].label, RuleClass::kWeaklyGuarded);
  EXPECT_EQ(c.rules[1].weak_guard, 0u);
  EXPECT_FALSE(c.rules[1].guard.has_value());
  EXPECT_EQ(c.overall, RuleClass::kWeaklyGuarded);
  EXPECT_TRUE(c.weakly_guarded());
  EXPECT_FALSE(c.guarded());
}

TEST(Classify, Fll) {
  Classification c = classify(fll_rules().tgds);
  EXPECT_EQ(c.overall, RuleClass::kWeaklyGuarded);
  EXPECT_EQ(to_string(c.overall), "weakly-guarded");
}

TEST(Classify, Grid) {
  Classification c = classify(grid_rules().tgds);
  ASSERT_EQ(c.rules.size(), 3u);
  EXPECT_EQ(c.rules[0].label, RuleClass::kLinear);
  EXPECT_EQ(c.rules[1].label, RuleClass::kLinear);
  EXPECT_EQ(c.rules[2].label, RuleClass::kUnguarded);
  EXPECT_FALSE(c.weakly_guarded());
}

TEST(Classify, FullAndEmpty) {
  EXPECT_EQ(classify({}).overall, RuleClass::kFull);
  Classification c = classify(parse_program("tgd e(X,Y), e(Y,Z) -> e(X,Z).").tgds);
  EXPECT_EQ(c.overall, RuleClass::kFull);
  EXPECT_TRUE(c.rules[0].full);
  // full rules are trivially weakly guarded: nothing is affected
  EXPECT_TRUE(c.weakly_guarded());
}

TEST(Classify, GuardIndexCoversUniversals) {
  testgen::Rng rng(17);
  testgen::Shape shape;
  shape.max_body = 3;
  for (int i = 0; i < 300; ++i) {
    auto schema = testgen::random_schema(rng, shape);
    auto tgds = testgen::random_tgds(rng, schema, shape);
    Classification c = classify(tgds);
    for (std::size_t k = 0; k < tgds.size(); ++k) {
      const auto& rc = c.rules[k];
      if (rc.guard) {
        auto g = terms_of(tgds[k].body[*rc.guard]);
        for (const Term& v : variables_of(tgds[k].body)) {
          ASSERT_NE(std::find(g.begin(), g.end(), v), g.end());
        }
      }
      if (rc.label == RuleClass::kUnguarded) ASSERT_FALSE(c.weakly_guarded());
    }
  }
}

TEST(Normalize, SplitsHeads) {
  auto tgds = parse_program(
                  "tgd r(X) -> s(X), t(X).\n"
                  "tgd r(X) -> exists Z: s(Z), u(X,Z).\n"
                  "fact v1(a).\n")
                  .tgds;
  auto n = normalize_heads(tgds);
  ASSERT_EQ(n.size(), 5u);
  for (const Tgd& t : n) EXPECT_TRUE(t.is_single_head());
  EXPECT_EQ(render_tgd(n[0]), "tgd r(X) -> s(X).");
  EXPECT_EQ(render_tgd(n[1]), "tgd r(X) -> t(X).");
  // the fresh predicate takes the head variables in order of appearance
  EXPECT_EQ(render_tgd(n[2]), "tgd r(X) -> exists Z: v1(Z,X).");
  EXPECT_EQ(render_tgd(n[3]), "tgd v1(Z,X) -> s(Z).");
  EXPECT_EQ(render_tgd(n[4]), "tgd v1(Z,X) -> u(X,Z).");
}

TEST(Normalize, SkipsUsedNames) {
  auto n = normalize_heads(parse_program("tgd v1(X) -> exists Z: s(Z), s(X).").tgds);
  EXPECT_EQ(n[0].head[0].predicate().name(), "v2");
}

TEST(Normalize, PreservesAnswersOnOriginalSchema) {
  testgen::Rng rng(31);
  testgen::Shape shape;
  shape.max_head = 3;
  int compared = 0;
  for (int i = 0; i < 300; ++i) {
    auto schema = testgen::random_schema(rng, shape);
    auto tgds = testgen::random_tgds(rng, schema, shape);
    Instance d = testgen::random_database(rng, schema, shape);
    Instance multi = d;
    if (!naive_multihead_chase(tgds, multi, 200)) continue;
    Instance single = d;
    if (!naive_multihead_chase(normalize_heads(tgds), single, 600)) continue;
    Instance s = restrict_to(single, schema);
    ASSERT_TRUE(instance_homomorphism(multi, s).has_value());
    ASSERT_TRUE(instance_homomorphism(s, multi).has_value());
    ++compared;
  }
  EXPECT_GT(compared, 100);
}
