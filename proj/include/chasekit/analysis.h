// Static analysis of TGD sets: affected positions, guardedness and
// multi-head normalization.

#ifndef CHASEKIT_ANALYSIS_H_
#define CHASEKIT_ANALYSIS_H_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "chasekit/dependencies.h"

namespace chasekit {

// Argument slot of a predicate, 1-based as in r[k].
struct Position {
  Predicate predicate;
  std::size_t slot = 1;

  std::string to_string() const;  // data[3]

  friend bool operator==(const Position&, const Position&) = default;
  friend bool operator<(const Position& a, const Position& b);
};

using PositionSet = std::set<Position>;

PositionSet affected_positions(const std::vector<Tgd>& tgds);

// Per-rule labels are one of Linear, Guarded, WeaklyGuarded, Unguarded (the
// strongest that applies). kFull only ever appears as an overall label, when
// no rule has existential variables.
enum class RuleClass { kFull, kLinear, kGuarded, kWeaklyGuarded, kUnguarded };

std::string to_string(RuleClass c);

struct RuleClassification {
  RuleClass label = RuleClass::kUnguarded;
  std::optional<std::size_t> guard;       // body index
  std::optional<std::size_t> weak_guard;  // body index
  bool full = false;

  // Guard used for chase-forest edges: the guard when there is one, else the
  // weak guard.
  std::optional<std::size_t> forest_guard() const { return guard ? guard : weak_guard; }
};

struct Classification {
  std::vector<RuleClassification> rules;
  RuleClass overall = RuleClass::kFull;
  PositionSet affected;

  bool weakly_guarded() const { return overall != RuleClass::kUnguarded; }
  bool guarded() const {
    return overall == RuleClass::kFull || overall == RuleClass::kLinear ||
           overall == RuleClass::kGuarded;
  }
};

Classification classify(const std::vector<Tgd>& tgds);

// Splits multi-head rules. Rules without existentials get one copy per head
// atom; rules with existentials go through a fresh predicate holding every
// head variable. Fresh predicates are named v1, v2, ... skipping names
// already used by the rules.
std::vector<Tgd> normalize_heads(const std::vector<Tgd>& tgds);

}  // namespace chasekit

#endif  // CHASEKIT_ANALYSIS_H_
