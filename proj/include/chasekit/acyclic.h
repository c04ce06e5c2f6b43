// [S]-acyclicity, join forests, tree decompositions and squid
// decompositions of conjunctive queries.

#ifndef CHASEKIT_ACYCLIC_H_
#define CHASEKIT_ACYCLIC_H_

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "chasekit/chase.h"
#include "chasekit/dependencies.h"
#include "chasekit/model.h"

namespace chasekit {

// Node i is labeled atoms[i]; parent[i] is absent for roots.
struct JoinForest {
  std::vector<Atom> atoms;
  std::vector<std::optional<std::size_t>> parent;
  std::vector<Term> s;
};

// Bag 0 is the auxiliary root holding S; bag i + 1 belongs to forest node i.
struct TreeDecomposition {
  std::vector<std::vector<Term>> bags;
  std::vector<std::optional<std::size_t>> parent;

  // Largest bag size minus one (-1 for no bags).
  long width() const;
};

struct JoinForestResult {
  JoinForest forest;
  TreeDecomposition decomposition;
};

// GYO ear removal on the hyperedges dom(a) - S. Duplicate atoms are merged.
// Empty optional when the atoms are not [S]-acyclic.
std::optional<JoinForestResult> s_join_forest(std::span<const Atom> atoms, std::span<const Term> s);

bool is_s_acyclic(std::span<const Atom> atoms, std::span<const Term> s);

// Direct checks: every atom labels a node, parents are in range and acyclic,
// and each value outside S occurs on a connected set of nodes.
bool validate_join_forest(const JoinForest& f, std::span<const Atom> atoms, std::string* why = nullptr);

// Every atom's values are inside some bag, every value's bags are connected.
bool validate_tree_decomposition(const TreeDecomposition& td, std::span<const Atom> atoms,
                                 std::string* why = nullptr);

std::string join_forest_to_dot(const JoinForest& f);

struct SquidDecomposition {
  std::vector<Atom> q_plus;  // cover body: the query's atoms first
  TermMap h;                 // every variable of q_plus
  std::vector<Atom> image;   // h(q_plus), duplicates merged
  std::vector<Atom> head;    // H
  std::vector<Atom> tentacles;  // T
  std::vector<Term> v_delta;
};

struct SquidLimits {
  // Total cover size; 0 means twice the query size.
  std::size_t max_cover_atoms = 0;
  std::size_t max_candidates = 1'000'000;
  // Restrict the search to one cover and/or one endomap.
  std::optional<std::vector<Atom>> fixed_cover;
  std::optional<TermMap> fixed_h;
  // Called once per (cover, h); returning false skips every V_delta for that
  // image.
  std::function<bool(std::span<const Atom> image)> image_filter;
};

struct SquidEnumeration {
  std::size_t candidates = 0;
  bool truncated = false;
  bool stopped = false;  // the callback asked to stop
};

// Covers add up to (max_cover_atoms - |Q|) atoms over fresh variables using
// the schema predicates; endomaps are set partitions of the cover variables
// sending each block to its smallest variable name; V_delta ranges over all
// subsets of the image variables. Only valid decompositions reach the
// callback; it returns false to stop.
SquidEnumeration enumerate_squids(const CQ& q, const std::vector<Predicate>& schema,
                                  const SquidLimits& limits,
                                  const std::function<bool(const SquidDecomposition&)>& callback);

bool validate_squid(const CQ& q, const SquidDecomposition& s, std::string* why = nullptr);

// Builds the image/H/T parts from a cover, an endomap and V_delta.
SquidDecomposition make_squid(std::vector<Atom> q_plus, TermMap h, std::vector<Term> v_delta);

struct SquidLemmaResult {
  bool conclusive = false;
  bool chase_entails = false;
  bool squid_side = false;
  bool holds = false;
  std::optional<SquidDecomposition> witness;
  ChaseStatus chase_status = ChaseStatus::kSaturated;
  SquidEnumeration enumeration;
};

// Checks chase |= Q <=> some squid decomposition maps H into the ground part
// and T into the null part of the chase under a single homomorphism.
SquidLemmaResult verify_squid_lemma(const Instance& d, const std::vector<Tgd>& tgds, const CQ& q,
                                    const ChaseOptions& budget = {}, const SquidLimits& limits = {});

std::string squid_to_dot(const SquidDecomposition& s);

}  // namespace chasekit

#endif  // CHASEKIT_ACYCLIC_H_
