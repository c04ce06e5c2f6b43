#include "chasekit/egd_sep.h"

#include <set>

#include "chasekit/homomorphism.h"

namespace chasekit {

std::string to_string(FailureVerdict v) {
  switch (v) {
    case FailureVerdict::kFailed: return "failed";
    case FailureVerdict::kNoFailure: return "no-failure";
    case FailureVerdict::kUnknown: return "unknown";
  }
  return "?";
}

namespace {

std::string fresh_predicate_name(const Instance& d, const std::vector<Tgd>& tgds,
                                 const std::vector<Egd>& egds) {
  std::set<std::string> used;
  for (const Predicate& p : d.predicates()) used.insert(std::string(p.name()));
  for (const Predicate& p : predicates_of(Dependencies{tgds, egds})) used.insert(std::string(p.name()));
  std::string name = "neq";
  for (int k = 1; used.count(name); ++k) name = "neq" + std::to_string(k);
  return name;
}

}  // namespace

FailureCheck egd_failure_check(const Instance& d, const std::vector<Tgd>& tgds,
                               const std::vector<Egd>& egds, const ChaseOptions& budget) {
  FailureCheck out;
  if (egds.empty()) return out;
  out.neq_predicate = fresh_predicate_name(d, tgds, egds);
  ChaseOptions opts = budget;
  opts.egd_interleave = false;
  ChaseResult r = run_chase(d, Dependencies{tgds, {}}, opts);
  out.chase_status = r.status;
  Instance b = r.instance;
  std::vector<Term> dom = r.instance.constants();
  for (const Term& x : dom) {
    for (const Term& y : dom) {
      if (x != y) b.insert(Atom(out.neq_predicate, {x, y}));
    }
  }
  for (std::size_t i = 0; i < egds.size(); ++i) {
    std::vector<Atom> q = egds[i].body;
    q.push_back(Atom(out.neq_predicate, {egds[i].lhs, egds[i].rhs}));
    if (auto h = find_homomorphism(q, b)) {
      out.verdict = FailureVerdict::kFailed;
      out.egd = i;
      out.witness = std::move(h);
      return out;
    }
  }
  out.verdict = r.status == ChaseStatus::kSaturated ? FailureVerdict::kNoFailure : FailureVerdict::kUnknown;
  return out;
}

AnswerReport separated_answer(const Instance& d, const std::vector<Tgd>& tgds,
                              const std::vector<Egd>& egds, const CQ& q, const Strategy& strategy,
                              const ChaseOptions& budget) {
  FailureCheck fc = egd_failure_check(d, tgds, egds, budget);
  if (fc.verdict == FailureVerdict::kFailed) {
    AnswerReport r;
    r.status = AnswerStatus::kFailed;
    if (q.is_boolean()) {
      r.answers.push_back({});
      r.note = "chase fails on egd" + std::to_string(*fc.egd + 1) + "; every Boolean query is entailed";
    } else {
      r.note = "chase fails on egd" + std::to_string(*fc.egd + 1) +
               "; the theory is inconsistent and every tuple is trivially an answer";
    }
    return r;
  }
  AnswerReport r = certain_answers(d, Dependencies{tgds, {}}, q, strategy, budget);
  if (fc.verdict == FailureVerdict::kUnknown) {
    if (r.status == AnswerStatus::kExact) r.status = AnswerStatus::kSoundLowerBound;
    r.budget_exhausted = true;
    r.note = "failure check inconclusive within budget";
  }
  return r;
}

BlockingChaseResult blocking_chase(const Instance& d, const Dependencies& deps,
                                   const ChaseOptions& budget) {
  ChaseOptions opts = budget;
  opts.egd_interleave = true;
  ChaseResult r = run_chase(d, deps, opts);
  BlockingChaseResult out;
  out.status = r.status;
  Instance current = d;
  for (const Atom& a : d.atoms()) out.a.insert(a);
  for (std::size_t i = 0; i < r.steps.size(); ++i) {
    const ChaseStep& s = r.steps[i];
    if (s.kind == ChaseStep::Kind::kTgd) {
      out.a.insert(s.atom);
      current.insert(s.atom);
      continue;
    }
    if (!s.innocuous) {
      out.aborted = true;
      out.diagnostic = "step " + std::to_string(i + 1) + " is not innocuous: " + format_step(s);
      break;
    }
    for (AtomId id : current.atoms_with(s.replaced)) out.c.insert(current.atom(id));
    current = current.renamed(TermMap{{s.replaced, s.kept}});
  }
  if (r.status == ChaseStatus::kFailed && !out.aborted) out.diagnostic = r.note;
  for (const Atom& a : out.a.atoms()) {
    if (!out.c.contains(a)) out.survivors.insert(a);
  }
  return out;
}

SeparationVerdict separation_verdict(const Instance& d, const Dependencies& deps,
                                     const ChaseOptions& budget) {
  SeparationVerdict v;
  FailureCheck fc = egd_failure_check(d, deps.tgds, deps.egds, budget);
  v.check = fc.verdict;
  v.failed = fc.verdict == FailureVerdict::kFailed;
  v.egd = fc.egd;
  v.witness = fc.witness;
  ChaseOptions opts = budget;
  opts.egd_interleave = true;
  ChaseResult r = run_chase(d, deps, opts);
  v.interleaved_status = r.status;
  for (const ChaseStep& s : r.steps) {
    if (s.kind != ChaseStep::Kind::kEgd) continue;
    ++v.egd_applications;
    v.all_applications_innocuous = v.all_applications_innocuous && s.innocuous;
  }
  return v;
}

}  // namespace chasekit
