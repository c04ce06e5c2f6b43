// Conjunctive query evaluation, certain answers and containment.

#ifndef CHASEKIT_QUERY_H_
#define CHASEKIT_QUERY_H_

#include <string>
#include <vector>

#include "chasekit/chase.h"
#include "chasekit/dependencies.h"
#include "chasekit/model.h"

namespace chasekit {

using Tuple = std::vector<Term>;

// Distinct answer tuples, sorted. Nulls in b are treated as values, so tuples
// may contain nulls.
std::vector<Tuple> eval_cq(const Instance& b, const CQ& q);

// Keeps tuples made of constants only.
std::vector<Tuple> constant_tuples(const std::vector<Tuple>& tuples);

enum class AnswerStatus { kExact, kSoundLowerBound, kFailed };
std::string to_string(AnswerStatus s);

struct AnswerReport {
  std::vector<Tuple> answers;
  AnswerStatus status = AnswerStatus::kExact;
  bool budget_exhausted = false;
  std::size_t steps = 0;
  std::string note;

  // Boolean queries: whether the empty tuple is an answer.
  bool holds() const { return !answers.empty(); }
};

struct Strategy {
  enum class Kind { kTerminate, kBlockedAtomic, kBounded };
  Kind kind = Kind::kBounded;
  std::size_t depth = 16;

  static Strategy terminate() { return {Kind::kTerminate, 0}; }
  static Strategy blocked_atomic() { return {Kind::kBlockedAtomic, 0}; }
  static Strategy bounded(std::size_t depth) { return {Kind::kBounded, depth}; }
};

// `base` supplies the step budget and memory cap; mode and depth come from
// the strategy. EGDs in deps are interleaved; a failing chase yields status
// kFailed (and the empty tuple for Boolean queries).
AnswerReport certain_answers(const Instance& d, const Dependencies& deps, const CQ& q,
                             const Strategy& strategy, const ChaseOptions& base = {});

struct BcqReduction {
  CQ query;   // Boolean
  Atom fact;  // q'(t)
};

// Throws std::invalid_argument on arity mismatch or non-constant tuples.
BcqReduction cq_to_bcq(const CQ& q, const Tuple& t);

enum class Containment { kYes, kNo, kUnknown };
std::string to_string(Containment c);

Containment check_containment(const CQ& q1, const CQ& q2, const Dependencies& deps,
                              const ChaseOptions& opts = {});

}  // namespace chasekit

#endif  // CHASEKIT_QUERY_H_
