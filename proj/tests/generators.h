// Random programs for property tests and the acceptance suite.

#ifndef CHASEKIT_TESTS_GENERATORS_H_
#define CHASEKIT_TESTS_GENERATORS_H_

#include <random>
#include <vector>

#include "chasekit/dependencies.h"
#include "chasekit/model.h"
#include "chasekit/parser.h"

namespace chasekit::testgen {

struct Shape {
  std::size_t predicates = 3;
  std::size_t max_arity = 3;
  std::size_t min_rules = 1;
  std::size_t max_rules = 4;
  std::size_t max_body = 2;
  std::size_t max_head = 1;
  std::size_t constants = 3;
  std::size_t max_facts = 5;
  std::size_t body_vars = 4;
  double existential_rate = 0.3;
  // Chance that random_wg_scenario adds p(X1..Xk) -> exists Z: p(X2..Xk,Z),
  // which makes the chase infinite once p has a fact.
  double plant_recursion = 0.0;
};

using Rng = std::mt19937;

std::vector<Predicate> random_schema(Rng& rng, const Shape& shape);
std::vector<Tgd> random_tgds(Rng& rng, const std::vector<Predicate>& schema, const Shape& shape);
Instance random_database(Rng& rng, const std::vector<Predicate>& schema, const Shape& shape);
// Constant-free query over the schema with 1..max_atoms atoms.
CQ random_query(Rng& rng, const std::vector<Predicate>& schema, std::size_t max_atoms,
                std::size_t head_arity, std::size_t vars);

struct Scenario {
  Instance database;
  std::vector<Tgd> tgds;
  std::vector<Predicate> schema;
};

// Random rule set kept only when classify() says weakly guarded.
Scenario random_wg_scenario(Rng& rng, const Shape& shape);

// Facts over the F-Logic Lite schema: objects o*, classes k*, attributes
// at*, values v*.
Instance random_fll_database(Rng& rng, std::size_t facts);

// Facts, TGDs, EGDs and queries for parser fuzzing.
Program random_program(Rng& rng);

}  // namespace chasekit::testgen

#endif  // CHASEKIT_TESTS_GENERATORS_H_
