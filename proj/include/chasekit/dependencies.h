// TGDs, EGDs and conjunctive queries.

#ifndef CHASEKIT_DEPENDENCIES_H_
#define CHASEKIT_DEPENDENCIES_H_

#include <string>
#include <vector>

#include "chasekit/model.h"

namespace chasekit {

// body -> exists existentials: head. Existentials are listed in order of
// first occurrence in the head.
struct Tgd {
  std::vector<Atom> body;
  std::vector<Atom> head;
  std::vector<Term> existentials;

  bool is_single_head() const { return head.size() == 1; }
  bool is_full() const { return existentials.empty(); }
  bool is_existential(const Term& t) const;
  // Head variables that are not existential.
  std::vector<Term> frontier() const;
  std::string to_string() const;

  friend bool operator==(const Tgd&, const Tgd&) = default;
};

// body -> lhs = rhs
struct Egd {
  std::vector<Atom> body;
  Term lhs;
  Term rhs;

  std::string to_string() const;

  friend bool operator==(const Egd&, const Egd&) = default;
};

// name(head_vars) :- body. Arity 0 is a Boolean query.
struct CQ {
  std::string name;
  std::vector<Term> head_vars;
  std::vector<Atom> body;

  std::size_t arity() const { return head_vars.size(); }
  bool is_boolean() const { return head_vars.empty(); }
  std::string to_string() const;

  friend bool operator==(const CQ&, const CQ&) = default;
};

struct Dependencies {
  std::vector<Tgd> tgds;
  std::vector<Egd> egds;
};

// Distinct predicates mentioned by the rules, in order of first mention.
std::vector<Predicate> predicates_of(const Dependencies& deps);

}  // namespace chasekit

#endif  // CHASEKIT_DEPENDENCIES_H_
