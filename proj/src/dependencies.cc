#include "chasekit/dependencies.h"

#include <algorithm>

namespace chasekit {

namespace {

std::string join_atoms(const std::vector<Atom>& atoms) {
  std::string out;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (i) out += ", ";
    out += atoms[i].to_string();
  }
  return out;
}

void add_predicates(const std::vector<Atom>& atoms, std::vector<Predicate>& out) {
  for (const Atom& a : atoms) {
    if (std::find(out.begin(), out.end(), a.predicate()) == out.end()) {
      out.push_back(a.predicate());
    }
  }
}

}  // namespace

bool Tgd::is_existential(const Term& t) const {
  return std::find(existentials.begin(), existentials.end(), t) != existentials.end();
}

std::vector<Term> Tgd::frontier() const {
  std::vector<Term> out;
  for (const Term& v : variables_of(head)) {
    if (!is_existential(v)) out.push_back(v);
  }
  return out;
}

std::string Tgd::to_string() const {
  std::string out = join_atoms(body) + " -> ";
  if (!existentials.empty()) {
    out += "exists ";
    for (std::size_t i = 0; i < existentials.size(); ++i) {
      if (i) out += ", ";
      out += existentials[i].to_string();
    }
    out += ": ";
  }
  return out + join_atoms(head);
}

std::string Egd::to_string() const {
  return join_atoms(body) + " -> " + lhs.to_string() + " = " + rhs.to_string();
}

std::string CQ::to_string() const {
  std::string out = name + "(";
  for (std::size_t i = 0; i < head_vars.size(); ++i) {
    if (i) out += ",";
    out += head_vars[i].to_string();
  }
  out += ")";
  if (!body.empty()) out += " :- " + join_atoms(body);
  return out;
}

std::vector<Predicate> predicates_of(const Dependencies& deps) {
  std::vector<Predicate> out;
  for (const Tgd& t : deps.tgds) {
    add_predicates(t.body, out);
    add_predicates(t.head, out);
  }
  for (const Egd& e : deps.egds) add_predicates(e.body, out);
  return out;
}

}  // namespace chasekit
