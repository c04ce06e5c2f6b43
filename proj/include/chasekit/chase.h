// TGD/EGD chase with a FIFO fair strategy and guarded chase forest.

#ifndef CHASEKIT_CHASE_H_
#define CHASEKIT_CHASE_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "chasekit/analysis.h"
#include "chasekit/dependencies.h"
#include "chasekit/model.h"

namespace chasekit {

enum class ChaseMode { kOblivious, kRestricted };
enum class ChaseStatus { kSaturated, kBudgetExhausted, kFailed };

std::string to_string(ChaseMode m);
std::string to_string(ChaseStatus s);

// A homomorphism of a rule body into an instance, with the ids of the atoms
// the body atoms were matched to.
struct Trigger {
  TermMap hom;
  std::vector<AtomId> matched;
};

// Triggers in deterministic order (matched atom ids, body order).
std::vector<Trigger> find_triggers(const Tgd& tgd, const Instance& b, ChaseMode mode);
// Only homomorphisms with h(lhs) != h(rhs). Restricted mode is meaningless
// for EGDs and throws std::invalid_argument.
std::vector<Trigger> find_triggers(const Egd& egd, const Instance& b,
                                   ChaseMode mode = ChaseMode::kOblivious);

// True when h restricted to the frontier extends to a map of the head into b.
bool head_satisfied(const Tgd& tgd, const TermMap& hom, const Instance& b);

struct TgdApplication {
  Atom atom;
  bool added = false;  // false when the atom was already in the instance
  TermMap extended;    // hom plus the fresh nulls
};

// Adds the head image to b in place. Single-head rules only. Throws
// std::logic_error when the trigger's body image is not in b.
TgdApplication apply_tgd(const Tgd& tgd, const Trigger& t, Instance& b, NullAllocator& alloc);

struct EgdOutcome {
  bool failure = false;
  Instance instance;  // rewritten instance (empty on failure)
  Term kept;
  Term replaced;
  bool innocuous = false;
};

EgdOutcome apply_egd(const Egd& egd, const Trigger& t, const Instance& b);

struct ForestNode {
  std::size_t id = 0;
  Atom atom;
  std::optional<std::size_t> parent;
  std::optional<std::size_t> rule;  // index into ChaseResult::tgds
  std::optional<Trigger> trigger;
  std::size_t generation = 0;  // 0 for database atoms, then application order
  std::size_t depth = 0;       // database atoms have depth 0
  bool duplicate = false;      // label already carried by an earlier node
};

struct ChaseStep {
  enum class Kind { kTgd, kEgd };
  Kind kind = Kind::kTgd;
  std::size_t rule = 0;  // 0-based index into tgds or egds
  Atom atom;             // TGD: derived atom
  std::vector<std::pair<Term, Term>> bindings;  // body variable order
  bool duplicate = false;
  Term kept;      // EGD
  Term replaced;  // EGD
  bool innocuous = false;
};

struct EgdFailure {
  std::size_t egd = 0;
  Trigger trigger;
};

struct ChaseOptions {
  ChaseMode mode = ChaseMode::kRestricted;
  std::size_t max_steps = 10000;
  std::size_t max_depth = 64;
  bool egd_interleave = true;
  // Soft cap on resident memory, 0 = none.
  std::size_t max_memory_mb = 0;
};

struct ChaseResult {
  Instance database;
  Instance instance;
  std::vector<Tgd> tgds;  // after head normalization
  std::vector<Egd> egds;
  std::vector<ForestNode> forest;
  ChaseStatus status = ChaseStatus::kSaturated;
  std::vector<ChaseStep> steps;
  std::optional<EgdFailure> failure;
  // Some rule had no guard or weak guard, so some nodes have no parent.
  bool forest_incomplete = false;
  std::size_t tgd_steps = 0;
  std::string note;  // why the budget ran out, when it did
};

// Multi-head rules are normalized first. The input may hold nulls (frozen
// queries); fresh nulls are allocated past them. Throws
// std::invalid_argument for zero budgets.
ChaseResult run_chase(const Instance& d, const Dependencies& deps, const ChaseOptions& opts = {});

// Removes every subtree rooted at a node whose label already appeared on an
// earlier node. Parentless non-root nodes are kept unless duplicated.
std::vector<ForestNode> restricted_gcf(const std::vector<ForestNode>& forest);

struct GroundSplit {
  Instance ground;  // atoms over dom(D)
  Instance nulls;   // the rest
};

GroundSplit split_ground(const Instance& b, const Instance& d);

// Closes S ∪ {a} under the forest steps of a's subtree whose body image is
// already in the closure. Throws std::invalid_argument when a labels no node.
Instance subtree_closure(const ChaseResult& result, const Atom& a, const Instance& s);

// Atoms labeling the subtree of the first node labeled a (a included).
Instance subtree_atoms(const ChaseResult& result, const Atom& a);

// One line per step:
//   + r3(b,_:n1) BY rule2 WITH {X->a,Y->b}
//   = b<-_:n1 BY egd1 [innocuous]
// Rules are numbered from 1 in the normalized rule list.
std::string format_step(const ChaseStep& step);
std::string step_log(const ChaseResult& result);

// First dependency violated by b, as text; empty when b is a model.
std::string first_violation(const Instance& b, const Dependencies& deps);
inline bool is_model(const Instance& b, const Dependencies& deps) {
  return first_violation(b, deps).empty();
}

std::string forest_to_dot(const std::vector<ForestNode>& forest);

// Resident set size in MiB from /proc/self/statm, 0 when unavailable.
std::size_t resident_memory_mb();

}  // namespace chasekit

#endif  // CHASEKIT_CHASE_H_
