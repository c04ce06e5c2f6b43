#include "chasekit/model.h"

#include <algorithm>
#include <deque>
#include <mutex>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace chasekit {

namespace {

class SymbolTable {
 public:
  static SymbolTable& instance() {
    static SymbolTable table;
    return table;
  }

  std::uint32_t intern(std::string_view name) {
    {
      std::shared_lock lock(mu_);
      auto it = ids_.find(name);
      if (it != ids_.end()) return it->second;
    }
    std::unique_lock lock(mu_);
    auto it = ids_.find(name);
    if (it != ids_.end()) return it->second;
    names_.emplace_back(name);
    auto id = static_cast<std::uint32_t>(names_.size() - 1);
    ids_.emplace(names_.back(), id);
    return id;
  }

  std::string_view name(std::uint32_t id) const {
    std::shared_lock lock(mu_);
    return names_[id];
  }

 private:
  SymbolTable() { names_.emplace_back(""); ids_.emplace(names_.back(), 0); }

  mutable std::shared_mutex mu_;
  std::deque<std::string> names_;  // deque keeps element addresses stable
  std::unordered_map<std::string_view, std::uint32_t> ids_;
};

}  // namespace

Term Term::constant(std::string_view name) {
  if (name.empty()) throw std::invalid_argument("constant name must be non-empty");
  return Term(TermKind::kConstant, SymbolTable::instance().intern(name));
}

Term Term::variable(std::string_view name) {
  if (name.empty()) throw std::invalid_argument("variable name must be non-empty");
  return Term(TermKind::kVariable, SymbolTable::instance().intern(name));
}

Term Term::null(std::uint64_t index) {
  if (index == 0) throw std::invalid_argument("null index must be positive");
  return Term(TermKind::kNull, index);
}

std::string_view Term::name() const {
  if (is_null()) return {};
  return SymbolTable::instance().name(static_cast<std::uint32_t>(payload_));
}

std::string Term::to_string() const {
  if (is_null()) return "_:n" + std::to_string(payload_);
  return std::string(name());
}

std::strong_ordering compare_terms(const Term& a, const Term& b) {
  if (a.is_variable() || b.is_variable()) {
    throw std::invalid_argument("compare_terms: variables are not ordered");
  }
  if (a.is_constant() && b.is_constant()) {
    int c = a.name().compare(b.name());
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }
  if (a.is_constant()) return std::strong_ordering::less;
  if (b.is_constant()) return std::strong_ordering::greater;
  return a.null_index() <=> b.null_index();
}

bool term_less(const Term& a, const Term& b) {
  if (a.is_variable() != b.is_variable()) return b.is_variable();
  if (a.is_variable()) return a.name() < b.name();
  return compare_terms(a, b) < 0;
}

Predicate::Predicate(std::string_view name, std::size_t arity)
    : name_id_(SymbolTable::instance().intern(name)),
      arity_(static_cast<std::uint32_t>(arity)) {
  if (name.empty()) throw std::invalid_argument("predicate name must be non-empty");
}

std::string_view Predicate::name() const { return SymbolTable::instance().name(name_id_); }

bool predicate_less(const Predicate& a, const Predicate& b) {
  int c = a.name().compare(b.name());
  if (c != 0) return c < 0;
  return a.arity() < b.arity();
}

Atom::Atom(Predicate predicate, std::vector<Term> args)
    : predicate_(predicate), args_(std::move(args)) {
  if (args_.size() != predicate_.arity()) {
    throw std::invalid_argument("atom " + std::string(predicate_.name()) + ": expected " +
                                std::to_string(predicate_.arity()) + " arguments, got " +
                                std::to_string(args_.size()));
  }
}

Atom::Atom(std::string_view predicate, std::vector<Term> args)
    : predicate_(predicate, args.size()), args_(std::move(args)) {}

bool Atom::is_ground() const {
  return std::all_of(args_.begin(), args_.end(), [](const Term& t) { return t.is_constant(); });
}

bool Atom::has_nulls() const {
  return std::any_of(args_.begin(), args_.end(), [](const Term& t) { return t.is_null(); });
}

bool Atom::has_variables() const {
  return std::any_of(args_.begin(), args_.end(), [](const Term& t) { return t.is_variable(); });
}

std::string Atom::to_string() const {
  std::string out(predicate_.name());
  if (args_.empty()) return out;
  out += '(';
  for (std::size_t i = 0; i < args_.size(); ++i) {
    if (i) out += ',';
    out += args_[i].to_string();
  }
  out += ')';
  return out;
}

std::size_t Atom::hash() const {
  std::size_t h = predicate_.hash();
  for (const Term& t : args_) h = h * 1000003u ^ t.hash();
  return h;
}

bool atom_less(const Atom& a, const Atom& b) {
  if (!(a.predicate() == b.predicate())) return predicate_less(a.predicate(), b.predicate());
  return std::lexicographical_compare(a.args().begin(), a.args().end(), b.args().begin(),
                                      b.args().end(), term_less);
}

std::vector<Term> terms_of(std::span<const Atom> atoms) {
  std::vector<Term> out;
  std::unordered_set<Term, TermHash> seen;
  for (const Atom& a : atoms) {
    for (const Term& t : a.args()) {
      if (seen.insert(t).second) out.push_back(t);
    }
  }
  return out;
}

std::vector<Term> terms_of(const Atom& atom) { return terms_of(std::span<const Atom>(&atom, 1)); }

std::vector<Term> variables_of(std::span<const Atom> atoms) {
  std::vector<Term> out;
  for (const Term& t : terms_of(atoms)) {
    if (t.is_variable()) out.push_back(t);
  }
  return out;
}

Atom substitute(const TermMap& map, const Atom& atom) {
  std::vector<Term> args;
  args.reserve(atom.arity());
  for (const Term& t : atom.args()) {
    auto it = map.find(t);
    args.push_back(it == map.end() ? t : it->second);
  }
  return Atom(atom.predicate(), std::move(args));
}

std::vector<Atom> substitute(const TermMap& map, std::span<const Atom> atoms) {
  std::vector<Atom> out;
  out.reserve(atoms.size());
  for (const Atom& a : atoms) out.push_back(substitute(map, a));
  return out;
}

Instance::Instance(std::span<const Atom> atoms) {
  for (const Atom& a : atoms) insert(a);
}

Instance::Instance(std::initializer_list<Atom> atoms) {
  for (const Atom& a : atoms) insert(a);
}

bool Instance::insert(const Atom& atom) {
  if (atom.has_variables()) {
    throw std::invalid_argument("instance atoms cannot contain variables: " + atom.to_string());
  }
  auto id = static_cast<AtomId>(atoms_.size());
  auto [it, inserted] = ids_.emplace(atom, id);
  if (!inserted) return false;
  atoms_.push_back(atom);
  by_predicate_[atom.predicate()].push_back(id);
  for (std::size_t i = 0; i < atom.arity(); ++i) {
    const Term& t = atom.arg(i);
    by_position_[PosKey{atom.predicate(), static_cast<std::uint32_t>(i), t}].push_back(id);
    auto& ids = domain_index_[t];
    if (ids.empty()) domain_.push_back(t);
    if (ids.empty() || ids.back() != id) ids.push_back(id);
    if (t.is_null()) max_null_ = std::max(max_null_, t.null_index());
  }
  return true;
}

std::optional<AtomId> Instance::find(const Atom& atom) const {
  auto it = ids_.find(atom);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

std::span<const AtomId> Instance::atoms_of(const Predicate& p) const {
  auto it = by_predicate_.find(p);
  if (it == by_predicate_.end()) return {};
  return it->second;
}

std::span<const AtomId> Instance::atoms_with_arg(const Predicate& p, std::size_t pos,
                                                 const Term& t) const {
  auto it = by_position_.find(PosKey{p, static_cast<std::uint32_t>(pos), t});
  if (it == by_position_.end()) return {};
  return it->second;
}

std::span<const AtomId> Instance::atoms_with(const Term& t) const {
  auto it = domain_index_.find(t);
  if (it == domain_index_.end()) return {};
  return it->second;
}

std::vector<Term> Instance::constants() const {
  std::vector<Term> out;
  for (const Term& t : domain_) {
    if (t.is_constant()) out.push_back(t);
  }
  return out;
}

std::vector<Predicate> Instance::predicates() const {
  std::vector<Predicate> out;
  for (const Atom& a : atoms_) {
    if (std::find(out.begin(), out.end(), a.predicate()) == out.end()) {
      out.push_back(a.predicate());
    }
  }
  return out;
}

bool Instance::same_atoms(const Instance& other) const {
  return size() == other.size() && subset_of(other);
}

bool Instance::subset_of(const Instance& other) const {
  return std::all_of(atoms_.begin(), atoms_.end(),
                     [&](const Atom& a) { return other.contains(a); });
}

Instance Instance::renamed(const TermMap& map) const {
  Instance out;
  for (const Atom& a : atoms_) out.insert(substitute(map, a));
  return out;
}

std::vector<Atom> Instance::sorted_atoms() const {
  std::vector<Atom> out = atoms_;
  std::sort(out.begin(), out.end(), atom_less);
  return out;
}

std::string Instance::to_string() const {
  std::ostringstream os;
  for (const Atom& a : sorted_atoms()) os << a.to_string() << '\n';
  return os.str();
}

Term NullAllocator::fresh() {
  if (next_ >= kCanonicalNullBase) {
    throw std::overflow_error("null allocator reached the reserved canonical range");
  }
  return Term::null(next_++);
}

void NullAllocator::observe(const Instance& seen) {
  if (seen.max_null_index() >= next_ && seen.max_null_index() < kCanonicalNullBase) {
    next_ = seen.max_null_index() + 1;
  }
}

void NullAllocator::observe(const Term& t) {
  if (t.is_null() && t.null_index() >= next_ && t.null_index() < kCanonicalNullBase) {
    next_ = t.null_index() + 1;
  }
}

}  // namespace chasekit
