// EGD handling by separation: failure detection through neq queries,
// answering under the TGDs alone, and the blocking chase used to validate it.

#ifndef CHASEKIT_EGD_SEP_H_
#define CHASEKIT_EGD_SEP_H_

#include <optional>
#include <string>
#include <vector>

#include "chasekit/chase.h"
#include "chasekit/dependencies.h"
#include "chasekit/query.h"

namespace chasekit {

enum class FailureVerdict { kFailed, kNoFailure, kUnknown };
std::string to_string(FailureVerdict v);

struct FailureCheck {
  FailureVerdict verdict = FailureVerdict::kNoFailure;
  std::optional<std::size_t> egd;  // 0-based, when failed
  std::optional<TermMap> witness;
  std::string neq_predicate;  // name used for the inequality facts
  ChaseStatus chase_status = ChaseStatus::kSaturated;
};

// Chases d under the TGDs only, adds neq(c,c') for distinct c, c' in dom(d)
// and looks for a match of body(egd) ∧ neq(lhs, rhs) for each EGD.
FailureCheck egd_failure_check(const Instance& d, const std::vector<Tgd>& tgds,
                               const std::vector<Egd>& egds, const ChaseOptions& budget = {});

// Failure check first; on failure Boolean queries are entailed (status
// kFailed with the empty tuple) and other queries get status kFailed with no
// tuples. Otherwise answers come from the TGDs alone; an inconclusive check
// caps the status at kSoundLowerBound.
AnswerReport separated_answer(const Instance& d, const std::vector<Tgd>& tgds,
                              const std::vector<Egd>& egds, const CQ& q,
                              const Strategy& strategy = Strategy::terminate(),
                              const ChaseOptions& budget = {});

struct BlockingChaseResult {
  Instance a;          // every atom ever derived
  Instance c;          // atoms banned by EGD applications
  Instance survivors;  // a - c
  ChaseStatus status = ChaseStatus::kSaturated;
  bool aborted = false;
  std::string diagnostic;  // set when aborted or failed
};

// Follows the interleaved chase; each EGD application bans the atoms it
// would remove instead of deleting them. Aborts at the first application
// that is not innocuous.
BlockingChaseResult blocking_chase(const Instance& d, const Dependencies& deps,
                                   const ChaseOptions& budget = {});

struct SeparationVerdict {
  bool failed = false;
  std::optional<std::size_t> egd;
  std::optional<TermMap> witness;
  // Every EGD application seen on the interleaved run was innocuous.
  bool all_applications_innocuous = true;
  std::size_t egd_applications = 0;
  FailureVerdict check = FailureVerdict::kNoFailure;
  ChaseStatus interleaved_status = ChaseStatus::kSaturated;
};

SeparationVerdict separation_verdict(const Instance& d, const Dependencies& deps,
                                     const ChaseOptions& budget = {});

}  // namespace chasekit

#endif  // CHASEKIT_EGD_SEP_H_
