#include "chasekit/analysis.h"

#include <algorithm>
#include <unordered_set>

namespace chasekit {

std::string Position::to_string() const {
  return std::string(predicate.name()) + "[" + std::to_string(slot) + "]";
}

bool operator<(const Position& a, const Position& b) {
  if (!(a.predicate == b.predicate)) return predicate_less(a.predicate, b.predicate);
  return a.slot < b.slot;
}

std::string to_string(RuleClass c) {
  switch (c) {
    case RuleClass::kFull: return "full";
    case RuleClass::kLinear: return "linear";
    case RuleClass::kGuarded: return "guarded";
    case RuleClass::kWeaklyGuarded: return "weakly-guarded";
    case RuleClass::kUnguarded: return "unguarded";
  }
  return "?";
}

namespace {

// True when every body occurrence of v sits at an affected position.
bool only_affected(const Term& v, const std::vector<Atom>& body, const PositionSet& affected) {
  bool seen = false;
  for (const Atom& a : body) {
    for (std::size_t i = 0; i < a.arity(); ++i) {
      if (a.arg(i) != v) continue;
      seen = true;
      if (!affected.count(Position{a.predicate(), i + 1})) return false;
    }
  }
  return seen;
}

bool covers(const Atom& a, const std::vector<Term>& vars) {
  return std::all_of(vars.begin(), vars.end(), [&](const Term& v) {
    return std::find(a.args().begin(), a.args().end(), v) != a.args().end();
  });
}

std::optional<std::size_t> first_covering(const std::vector<Atom>& body,
                                          const std::vector<Term>& vars) {
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (covers(body[i], vars)) return i;
  }
  return std::nullopt;
}

}  // namespace

PositionSet affected_positions(const std::vector<Tgd>& tgds) {
  PositionSet affected;
  for (const Tgd& t : tgds) {
    for (const Atom& h : t.head) {
      for (std::size_t i = 0; i < h.arity(); ++i) {
        if (t.is_existential(h.arg(i))) affected.insert(Position{h.predicate(), i + 1});
      }
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Tgd& t : tgds) {
      for (const Atom& h : t.head) {
        for (std::size_t i = 0; i < h.arity(); ++i) {
          const Term& v = h.arg(i);
          if (!v.is_variable() || t.is_existential(v)) continue;
          Position p{h.predicate(), i + 1};
          if (affected.count(p)) continue;
          if (only_affected(v, t.body, affected)) {
            affected.insert(p);
            changed = true;
          }
        }
      }
    }
  }
  return affected;
}

Classification classify(const std::vector<Tgd>& tgds) {
  Classification out;
  out.affected = affected_positions(tgds);
  bool all_full = true;
  RuleClass weakest = RuleClass::kLinear;
  for (const Tgd& t : tgds) {
    RuleClassification rc;
    rc.full = t.is_full();
    all_full = all_full && rc.full;
    std::vector<Term> vars = variables_of(t.body);
    std::vector<Term> needy;
    for (const Term& v : vars) {
      if (only_affected(v, t.body, out.affected)) needy.push_back(v);
    }
    rc.guard = first_covering(t.body, vars);
    rc.weak_guard = first_covering(t.body, needy);
    if (t.body.size() == 1) {
      rc.label = RuleClass::kLinear;
    } else if (rc.guard) {
      rc.label = RuleClass::kGuarded;
    } else if (rc.weak_guard) {
      rc.label = RuleClass::kWeaklyGuarded;
    } else {
      rc.label = RuleClass::kUnguarded;
    }
    weakest = std::max(weakest, rc.label);
    out.rules.push_back(rc);
  }
  out.overall = all_full ? RuleClass::kFull : weakest;
  return out;
}

std::vector<Tgd> normalize_heads(const std::vector<Tgd>& tgds) {
  std::unordered_set<std::string> used;
  for (const Predicate& p : predicates_of(Dependencies{tgds, {}})) used.insert(std::string(p.name()));
  std::size_t counter = 0;
  auto fresh_name = [&] {
    std::string name;
    do {
      name = "v" + std::to_string(++counter);
    } while (used.count(name));
    used.insert(name);
    return name;
  };

  std::vector<Tgd> out;
  for (const Tgd& t : tgds) {
    if (t.head.size() <= 1) {
      out.push_back(t);
      continue;
    }
    if (t.is_full()) {
      for (const Atom& h : t.head) out.push_back(Tgd{t.body, {h}, {}});
      continue;
    }
    std::vector<Term> head_vars = variables_of(t.head);
    Atom v(fresh_name(), head_vars);
    out.push_back(Tgd{t.body, {v}, t.existentials});
    for (const Atom& h : t.head) out.push_back(Tgd{{v}, {h}, {}});
  }
  return out;
}

}  // namespace chasekit
