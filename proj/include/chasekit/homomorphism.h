// Backtracking homomorphism search from a pattern (atoms with variables) into
// instances.
//
// Pattern variables are mappable; constants are fixed. Nulls in the pattern
// are fixed too unless nulls_as_variables is set, in which case they behave
// like variables (used to map one chase result into another).

#ifndef CHASEKIT_HOMOMORPHISM_H_
#define CHASEKIT_HOMOMORPHISM_H_

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "chasekit/model.h"

namespace chasekit {

struct MatchOptions {
  // Bindings fixed before the search starts.
  const TermMap* initial = nullptr;
  bool nulls_as_variables = false;
  // Optional per-pattern-atom target; when non-empty it must have one entry
  // per pattern atom and overrides the default target for that atom.
  std::vector<const Instance*> targets;
  // Optional per-pattern-atom restriction on matched atom ids: the id must
  // lie in [min_id[i], max_id[i]]. Used by semi-naive trigger discovery.
  std::vector<AtomId> min_id;
  std::vector<AtomId> max_id;
};

// Called once per homomorphism with the full binding and the id of the atom
// each pattern atom was matched to (ids refer to that atom's target). Return
// false to stop the search.
using MatchCallback = std::function<bool(const TermMap& binding, std::span<const AtomId> matched)>;

void for_each_match(std::span<const Atom> pattern, const Instance& target,
                    const MatchCallback& callback, const MatchOptions& options = {});

std::optional<TermMap> find_homomorphism(std::span<const Atom> pattern, const Instance& target,
                                         const MatchOptions& options = {});

// Maps every atom of `from` into `to`, treating the nulls of `from` as
// variables and its constants as fixed.
std::optional<TermMap> instance_homomorphism(const Instance& from, const Instance& to);

}  // namespace chasekit

#endif  // CHASEKIT_HOMOMORPHISM_H_
