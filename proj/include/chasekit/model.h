// Core data model: terms, predicates, atoms, instances and null allocation.
//
// Constants and variable names are interned in a process-wide symbol table,
// so Term and Predicate are small values with cheap equality and hashing.
// Equality stays structural: two terms are equal iff they have the same kind
// and the same name (or null index).

#ifndef CHASEKIT_MODEL_H_
#define CHASEKIT_MODEL_H_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace chasekit {

enum class TermKind : std::uint8_t { kConstant, kNull, kVariable };

class Term {
 public:
  Term() = default;

  static Term constant(std::string_view name);
  static Term variable(std::string_view name);
  static Term null(std::uint64_t index);

  TermKind kind() const { return kind_; }
  bool is_constant() const { return kind_ == TermKind::kConstant; }
  bool is_null() const { return kind_ == TermKind::kNull; }
  bool is_variable() const { return kind_ == TermKind::kVariable; }

  // Name of a constant or variable. Empty for nulls.
  std::string_view name() const;
  // Index of a labeled null. Zero for other kinds.
  std::uint64_t null_index() const { return is_null() ? payload_ : 0; }

  // Constants print as their name, variables as their name and nulls as
  // `_:n<index>`.
  std::string to_string() const;

  std::size_t hash() const {
    return std::hash<std::uint64_t>{}(payload_ * 4 + static_cast<std::uint64_t>(kind_));
  }

  friend bool operator==(const Term&, const Term&) = default;

 private:
  Term(TermKind kind, std::uint64_t payload) : kind_(kind), payload_(payload) {}

  TermKind kind_ = TermKind::kConstant;
  std::uint64_t payload_ = 0;  // symbol id for constants/variables
};

// Total order on constants and nulls: constants first (byte-lexicographic on
// name), then nulls by ascending index. Throws std::invalid_argument when
// either side is a variable.
std::strong_ordering compare_terms(const Term& a, const Term& b);

// Arbitrary but deterministic order on all terms (variables sort last, by
// name). Used for sorting containers, never for EGD merges.
bool term_less(const Term& a, const Term& b);

class Predicate {
 public:
  Predicate() = default;
  Predicate(std::string_view name, std::size_t arity);

  std::string_view name() const;
  std::size_t arity() const { return arity_; }

  std::size_t hash() const {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(name_id_) << 16) ^ arity_);
  }

  friend bool operator==(const Predicate&, const Predicate&) = default;

 private:
  std::uint32_t name_id_ = 0;
  std::uint32_t arity_ = 0;
};

// Orders by name, then arity.
bool predicate_less(const Predicate& a, const Predicate& b);

class Atom {
 public:
  Atom() = default;
  // Throws std::invalid_argument when args.size() != arity.
  Atom(Predicate predicate, std::vector<Term> args);
  Atom(std::string_view predicate, std::vector<Term> args);

  const Predicate& predicate() const { return predicate_; }
  const std::vector<Term>& args() const { return args_; }
  std::size_t arity() const { return args_.size(); }
  const Term& arg(std::size_t i) const { return args_[i]; }

  bool is_ground() const;    // constants only
  bool has_nulls() const;
  bool has_variables() const;

  // r(a,b); arity-0 atoms print without parentheses.
  std::string to_string() const;

  std::size_t hash() const;

  friend bool operator==(const Atom&, const Atom&) = default;

 private:
  Predicate predicate_;
  std::vector<Term> args_;
};

// Deterministic total order on atoms (predicate, then arguments by term_less).
bool atom_less(const Atom& a, const Atom& b);

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};
struct PredicateHash {
  std::size_t operator()(const Predicate& p) const { return p.hash(); }
};
struct AtomHash {
  std::size_t operator()(const Atom& a) const { return a.hash(); }
};

// Distinct terms of the atoms, in order of first occurrence.
std::vector<Term> terms_of(std::span<const Atom> atoms);
std::vector<Term> terms_of(const Atom& atom);
std::vector<Term> variables_of(std::span<const Atom> atoms);

// Partial map used to rename terms. Terms absent from the map are unchanged.
using TermMap = std::unordered_map<Term, Term, TermHash>;

Atom substitute(const TermMap& map, const Atom& atom);
std::vector<Atom> substitute(const TermMap& map, std::span<const Atom> atoms);

using AtomId = std::uint32_t;

// A finite set of atoms without variables. Atoms keep their insertion order,
// which the chase uses as generation order. Indexes by predicate, by
// (predicate, position, term) and by term (the domain index) are maintained
// on insertion.
class Instance {
 public:
  Instance() = default;
  explicit Instance(std::span<const Atom> atoms);
  Instance(std::initializer_list<Atom> atoms);

  // Returns true when the atom was not present. Throws std::invalid_argument
  // for atoms containing variables.
  bool insert(const Atom& atom);

  bool contains(const Atom& atom) const { return ids_.count(atom) != 0; }
  std::optional<AtomId> find(const Atom& atom) const;

  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  const std::vector<Atom>& atoms() const { return atoms_; }
  const Atom& atom(AtomId id) const { return atoms_[id]; }

  std::span<const AtomId> atoms_of(const Predicate& p) const;
  std::span<const AtomId> atoms_with_arg(const Predicate& p, std::size_t pos,
                                         const Term& t) const;
  // Domain index: atoms containing t anywhere.
  std::span<const AtomId> atoms_with(const Term& t) const;

  bool has_term(const Term& t) const { return domain_index_.count(t) != 0; }
  // dom(B), in order of first occurrence.
  const std::vector<Term>& domain() const { return domain_; }
  std::vector<Term> constants() const;
  std::vector<Predicate> predicates() const;

  std::uint64_t max_null_index() const { return max_null_; }

  // Same atoms as a set (insertion order ignored).
  bool same_atoms(const Instance& other) const;
  bool subset_of(const Instance& other) const;

  // Copy with every term renamed through map; duplicates collapse, first
  // occurrence order is kept.
  Instance renamed(const TermMap& map) const;

  using DomainIndex = std::unordered_map<Term, std::vector<AtomId>, TermHash>;
  const DomainIndex& domain_index() const { return domain_index_; }

  std::vector<Atom> sorted_atoms() const;
  std::string to_string() const;  // sorted, one atom per line

 private:
  struct PosKey {
    Predicate predicate;
    std::uint32_t pos;
    Term term;
    friend bool operator==(const PosKey&, const PosKey&) = default;
  };
  struct PosKeyHash {
    std::size_t operator()(const PosKey& k) const {
      return k.predicate.hash() * 31 + k.pos * 7919 + k.term.hash();
    }
  };

  std::vector<Atom> atoms_;
  std::unordered_map<Atom, AtomId, AtomHash> ids_;
  std::unordered_map<Predicate, std::vector<AtomId>, PredicateHash> by_predicate_;
  std::unordered_map<PosKey, std::vector<AtomId>, PosKeyHash> by_position_;
  DomainIndex domain_index_;
  std::vector<Term> domain_;
  std::uint64_t max_null_ = 0;
};

// Hands out labeled nulls with strictly increasing indexes. One allocator per
// chase run.
class NullAllocator {
 public:
  NullAllocator() = default;
  explicit NullAllocator(std::uint64_t next) : next_(next) {}
  // Seeds past every null already present in the instance.
  explicit NullAllocator(const Instance& seen) { observe(seen); }

  Term fresh();
  void observe(const Instance& seen);
  void observe(const Term& t);
  std::uint64_t next_index() const { return next_; }

 private:
  std::uint64_t next_ = 1;
};

// Nulls with index >= this value are reserved for canonical renamings and are
// never produced by a NullAllocator.
inline constexpr std::uint64_t kCanonicalNullBase = 1'000'000'000;

}  // namespace chasekit

template <>
struct std::hash<chasekit::Term> {
  std::size_t operator()(const chasekit::Term& t) const { return t.hash(); }
};
template <>
struct std::hash<chasekit::Atom> {
  std::size_t operator()(const chasekit::Atom& a) const { return a.hash(); }
};

#endif  // CHASEKIT_MODEL_H_
