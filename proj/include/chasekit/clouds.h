// Clouds, canonical renaming, D-isomorphism and blocked saturation.

#ifndef CHASEKIT_CLOUDS_H_
#define CHASEKIT_CLOUDS_H_

#include <span>
#include <string>
#include <vector>

#include "chasekit/dependencies.h"
#include "chasekit/model.h"

namespace chasekit {

struct Cloud {
  Atom anchor;
  Instance atoms;
};

// Atoms of b whose terms lie in dom(a) ∪ dom(d). Throws std::invalid_argument
// when a is not in b.
Cloud cloud_of(const Instance& b, const Instance& d, const Atom& a);

// Nulls of the anchor, in first-occurrence order, become reserved canonical
// nulls (index kCanonicalNullBase + 1, + 2, ...); atoms come back sorted.
struct CanonicalPair {
  Atom anchor;
  std::vector<Atom> atoms;

  std::string key() const;
  friend bool operator==(const CanonicalPair&, const CanonicalPair&) = default;
};

// Throws std::invalid_argument when s holds a null that is not in a.
CanonicalPair canonicalize(const Atom& a, std::span<const Atom> s);
// The renaming canonicalize applies to a's nulls.
TermMap canonical_renaming(const Atom& a);

// True iff a bijection on nulls (constants fixed) maps a1 onto a2 and s1
// onto s2. The database only matters through its constants, which are never
// renamed.
bool d_isomorphic(const Atom& a1, std::span<const Atom> s1, const Atom& a2,
                  std::span<const Atom> s2);

struct BlockedOptions {
  std::size_t max_rounds = 16;
  std::size_t max_store_size = 200000;
  // Accept rule sets that are not weakly guarded.
  bool force = false;
};

struct StoreEntry {
  std::size_t id = 0;
  Atom anchor;             // canonical
  std::vector<Atom> cloud;  // canonical, sorted
};

struct BlockedResult {
  std::vector<StoreEntry> store;
  Instance ground_atoms;
  bool stabilized = false;
  std::size_t rounds = 0;
  std::size_t contexts = 0;
  std::size_t max_cloud_size = 0;
  // |R| * (|dom(D)| + w)^w; every computed cloud is checked against it.
  double cloud_bound = 0;
  bool bound_violated = false;
  std::string note;
};

// Saturation over canonical (anchor, cloud) contexts: each context is closed
// under the rules, existential heads open child contexts keyed by their
// canonical form, and a context already on the store is not expanded again.
// Outputs are merged until nothing changes; the ground atoms are what the
// chase derives over dom(D). Throws std::invalid_argument for rule sets that
// are not weakly guarded unless options.force is set.
BlockedResult blocked_saturate(const Instance& d, const std::vector<Tgd>& tgds,
                               const BlockedOptions& options = {});

std::string store_stats_json(const BlockedResult& r);

}  // namespace chasekit

#endif  // CHASEKIT_CLOUDS_H_
