#include "chasekit/query.h"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "chasekit/analysis.h"
#include "chasekit/clouds.h"
#include "chasekit/homomorphism.h"

namespace chasekit {

namespace {

bool tuple_less(const Tuple& a, const Tuple& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end(), term_less);
}

void sort_unique(std::vector<Tuple>& tuples) {
  std::sort(tuples.begin(), tuples.end(), tuple_less);
  tuples.erase(std::unique(tuples.begin(), tuples.end()), tuples.end());
}

}  // namespace

std::vector<Tuple> eval_cq(const Instance& b, const CQ& q) {
  std::vector<Tuple> out;
  for_each_match(q.body, b, [&](const TermMap& m, std::span<const AtomId>) {
    Tuple t;
    t.reserve(q.head_vars.size());
    for (const Term& v : q.head_vars) t.push_back(m.at(v));
    out.push_back(std::move(t));
    // A Boolean query needs one witness only.
    return !q.head_vars.empty();
  });
  sort_unique(out);
  return out;
}

std::vector<Tuple> constant_tuples(const std::vector<Tuple>& tuples) {
  std::vector<Tuple> out;
  for (const Tuple& t : tuples) {
    if (std::all_of(t.begin(), t.end(), [](const Term& x) { return x.is_constant(); })) {
      out.push_back(t);
    }
  }
  return out;
}

std::string to_string(AnswerStatus s) {
  switch (s) {
    case AnswerStatus::kExact: return "exact";
    case AnswerStatus::kSoundLowerBound: return "sound-lower-bound";
    case AnswerStatus::kFailed: return "failed";
  }
  return "?";
}

AnswerReport certain_answers(const Instance& d, const Dependencies& deps, const CQ& q,
                             const Strategy& strategy, const ChaseOptions& base) {
  AnswerReport report;
  if (strategy.kind == Strategy::Kind::kBlockedAtomic) {
    if (q.body.size() != 1) {
      throw std::invalid_argument("blocked-atomic strategy needs a single-atom query");
    }
    if (!deps.egds.empty()) {
      throw std::invalid_argument("blocked-atomic strategy does not handle EGDs");
    }
    BlockedOptions bo;
    BlockedResult br = blocked_saturate(d, normalize_heads(deps.tgds), bo);
    report.answers = constant_tuples(eval_cq(br.ground_atoms, q));
    report.status = br.stabilized ? AnswerStatus::kExact : AnswerStatus::kSoundLowerBound;
    report.budget_exhausted = !br.stabilized;
    report.steps = br.rounds;
    report.note = br.note;
    return report;
  }

  ChaseOptions opts = base;
  if (strategy.kind == Strategy::Kind::kTerminate) {
    opts.mode = ChaseMode::kRestricted;
  } else {
    opts.mode = ChaseMode::kOblivious;
    opts.max_depth = strategy.depth;
  }
  ChaseResult r = run_chase(d, deps, opts);
  report.steps = r.tgd_steps;
  report.note = r.note;
  if (r.status == ChaseStatus::kFailed) {
    report.status = AnswerStatus::kFailed;
    if (q.is_boolean()) report.answers.push_back({});
    return report;
  }
  report.answers = constant_tuples(eval_cq(r.instance, q));
  report.budget_exhausted = r.status == ChaseStatus::kBudgetExhausted;
  report.status = report.budget_exhausted ? AnswerStatus::kSoundLowerBound : AnswerStatus::kExact;
  return report;
}

BcqReduction cq_to_bcq(const CQ& q, const Tuple& t) {
  if (t.size() != q.arity()) {
    throw std::invalid_argument("cq_to_bcq: tuple arity " + std::to_string(t.size()) +
                                " differs from query arity " + std::to_string(q.arity()));
  }
  for (const Term& x : t) {
    if (!x.is_constant()) throw std::invalid_argument("cq_to_bcq: tuple must hold constants");
  }
  std::set<std::string> used;
  for (const Atom& a : q.body) used.insert(std::string(a.predicate().name()));
  std::string name = q.name + "_ans";
  while (used.count(name)) name += "_";
  BcqReduction out;
  out.query.name = q.name + "_bool";
  out.query.body = q.body;
  out.query.body.push_back(Atom(name, q.head_vars));
  out.fact = Atom(name, t);
  return out;
}

std::string to_string(Containment c) {
  switch (c) {
    case Containment::kYes: return "yes";
    case Containment::kNo: return "no";
    case Containment::kUnknown: return "unknown";
  }
  return "?";
}

Containment check_containment(const CQ& q1, const CQ& q2, const Dependencies& deps,
                              const ChaseOptions& opts) {
  if (q1.arity() != q2.arity()) {
    throw std::invalid_argument("check_containment: queries have different arities");
  }
  NullAllocator alloc;
  TermMap freeze;
  for (const Term& v : variables_of(q1.body)) freeze.emplace(v, alloc.fresh());
  Instance frozen;
  for (const Atom& a : q1.body) frozen.insert(substitute(freeze, a));
  Tuple head;
  for (const Term& v : q1.head_vars) head.push_back(freeze.at(v));

  ChaseResult r = run_chase(frozen, deps, opts);
  if (r.status == ChaseStatus::kFailed) return Containment::kYes;
  for (const ChaseStep& s : r.steps) {
    if (s.kind != ChaseStep::Kind::kEgd) continue;
    for (Term& t : head) {
      if (t == s.replaced) t = s.kept;
    }
  }
  TermMap init;
  for (std::size_t i = 0; i < q2.head_vars.size(); ++i) {
    auto [it, inserted] = init.emplace(q2.head_vars[i], head[i]);
    if (!inserted && it->second != head[i]) {
      return r.status == ChaseStatus::kSaturated ? Containment::kNo : Containment::kUnknown;
    }
  }
  MatchOptions mo;
  mo.initial = &init;
  if (find_homomorphism(q2.body, r.instance, mo)) return Containment::kYes;
  return r.status == ChaseStatus::kSaturated ? Containment::kNo : Containment::kUnknown;
}

}  // namespace chasekit
