#include "chasekit/acyclic.h"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include "chasekit/homomorphism.h"
#include "chasekit/query.h"

namespace chasekit {

long TreeDecomposition::width() const {
  long w = -1;
  for (const auto& b : bags) w = std::max(w, static_cast<long>(b.size()) - 1);
  return w;
}

namespace {

using TermSet = std::unordered_set<Term, TermHash>;

std::vector<Atom> dedup(std::span<const Atom> atoms) {
  std::vector<Atom> out;
  std::unordered_set<Atom, AtomHash> seen;
  for (const Atom& a : atoms) {
    if (seen.insert(a).second) out.push_back(a);
  }
  return out;
}

bool contains(const std::vector<Term>& v, const Term& t) {
  return std::find(v.begin(), v.end(), t) != v.end();
}

// Number of nodes and of parent edges among the nodes flagged in `in`; the
// flagged nodes are connected iff edges == nodes - 1.
bool connected(const std::vector<std::optional<std::size_t>>& parent, const std::vector<bool>& in) {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    if (!in[i]) continue;
    ++nodes;
    if (parent[i] && in[*parent[i]]) ++edges;
  }
  return nodes == 0 || edges + 1 == nodes;
}

bool parents_form_forest(const std::vector<std::optional<std::size_t>>& parent) {
  for (std::size_t i = 0; i < parent.size(); ++i) {
    std::size_t steps = 0;
    std::optional<std::size_t> p = parent[i];
    while (p) {
      if (*p >= parent.size() || ++steps > parent.size()) return false;
      p = parent[*p];
    }
  }
  return true;
}

}  // namespace

std::optional<JoinForestResult> s_join_forest(std::span<const Atom> input, std::span<const Term> s) {
  std::vector<Atom> atoms = dedup(input);
  TermSet hidden(s.begin(), s.end());
  std::vector<std::vector<Term>> edges;
  for (const Atom& a : atoms) {
    std::vector<Term> e;
    for (const Term& t : terms_of(a)) {
      if (!hidden.count(t)) e.push_back(t);
    }
    edges.push_back(std::move(e));
  }
  std::size_t n = atoms.size();
  std::vector<bool> active(n, true);
  std::vector<std::optional<std::size_t>> parent(n);
  std::size_t remaining = n;
  while (remaining > 0) {
    bool removed = false;
    for (std::size_t i = 0; i < n && !removed; ++i) {
      if (!active[i]) continue;
      std::vector<Term> shared;
      for (const Term& v : edges[i]) {
        for (std::size_t j = 0; j < n; ++j) {
          if (j != i && active[j] && contains(edges[j], v)) {
            shared.push_back(v);
            break;
          }
        }
      }
      if (shared.empty()) {
        active[i] = false;
        removed = true;
        break;
      }
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || !active[j]) continue;
        if (std::all_of(shared.begin(), shared.end(), [&](const Term& v) { return contains(edges[j], v); })) {
          parent[i] = j;
          active[i] = false;
          removed = true;
          break;
        }
      }
    }
    if (!removed) return std::nullopt;
    --remaining;
  }

  JoinForestResult out;
  out.forest.atoms = atoms;
  out.forest.parent = parent;
  out.forest.s.assign(s.begin(), s.end());
  std::vector<Term> root_bag;
  for (const Term& t : s) {
    if (!contains(root_bag, t)) root_bag.push_back(t);
  }
  out.decomposition.bags.push_back(root_bag);
  out.decomposition.parent.push_back(std::nullopt);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Term> bag = terms_of(atoms[i]);
    for (const Term& t : root_bag) {
      if (!contains(bag, t)) bag.push_back(t);
    }
    out.decomposition.bags.push_back(std::move(bag));
    out.decomposition.parent.push_back(parent[i] ? *parent[i] + 1 : 0);
  }
  return out;
}

bool is_s_acyclic(std::span<const Atom> atoms, std::span<const Term> s) {
  return s_join_forest(atoms, s).has_value();
}

bool validate_join_forest(const JoinForest& f, std::span<const Atom> atoms, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (f.parent.size() != f.atoms.size()) return fail("parent/label size mismatch");
  if (!parents_form_forest(f.parent)) return fail("parent links do not form a forest");
  std::unordered_set<Atom, AtomHash> labels(f.atoms.begin(), f.atoms.end());
  for (const Atom& a : atoms) {
    if (!labels.count(a)) return fail("atom without node: " + a.to_string());
  }
  TermSet hidden(f.s.begin(), f.s.end());
  TermSet values;
  for (const Atom& a : f.atoms) {
    for (const Term& t : a.args()) {
      if (!hidden.count(t)) values.insert(t);
    }
  }
  for (const Term& v : values) {
    std::vector<bool> in(f.atoms.size());
    for (std::size_t i = 0; i < f.atoms.size(); ++i) in[i] = contains(f.atoms[i].args(), v);
    if (!connected(f.parent, in)) return fail("nodes holding " + v.to_string() + " are not connected");
  }
  return true;
}

bool validate_tree_decomposition(const TreeDecomposition& td, std::span<const Atom> atoms,
                                 std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (td.parent.size() != td.bags.size()) return fail("parent/bag size mismatch");
  if (!parents_form_forest(td.parent)) return fail("parent links do not form a forest");
  std::size_t roots = std::count(td.parent.begin(), td.parent.end(), std::nullopt);
  if (td.bags.size() > 0 && roots != 1) return fail("decomposition is not a single tree");
  for (const Atom& a : atoms) {
    std::vector<Term> dom = terms_of(a);
    bool covered = std::any_of(td.bags.begin(), td.bags.end(), [&](const std::vector<Term>& bag) {
      return std::all_of(dom.begin(), dom.end(), [&](const Term& t) { return contains(bag, t); });
    });
    if (!covered) return fail("no bag covers " + a.to_string());
  }
  TermSet values;
  for (const auto& bag : td.bags) values.insert(bag.begin(), bag.end());
  for (const Term& v : values) {
    std::vector<bool> in(td.bags.size());
    for (std::size_t i = 0; i < td.bags.size(); ++i) in[i] = contains(td.bags[i], v);
    if (!connected(td.parent, in)) return fail("bags holding " + v.to_string() + " are not connected");
  }
  return true;
}

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string join_forest_to_dot(const JoinForest& f) {
  std::ostringstream os;
  os << "graph join_forest {\n  node [shape=box];\n";
  for (std::size_t i = 0; i < f.atoms.size(); ++i) {
    os << "  a" << i << " [label=" << quote(f.atoms[i].to_string()) << "];\n";
  }
  for (std::size_t i = 0; i < f.atoms.size(); ++i) {
    if (f.parent[i]) os << "  a" << *f.parent[i] << " -- a" << i << ";\n";
  }
  os << "}\n";
  return os.str();
}

SquidDecomposition make_squid(std::vector<Atom> q_plus, TermMap h, std::vector<Term> v_delta) {
  SquidDecomposition s;
  s.q_plus = std::move(q_plus);
  s.h = std::move(h);
  s.v_delta = std::move(v_delta);
  for (const Term& v : variables_of(s.q_plus)) s.h.emplace(v, v);
  s.image = dedup(substitute(s.h, s.q_plus));
  TermSet vd(s.v_delta.begin(), s.v_delta.end());
  for (const Atom& a : s.image) {
    bool inside = std::all_of(a.args().begin(), a.args().end(),
                              [&](const Term& t) { return !t.is_variable() || vd.count(t); });
    (inside ? s.head : s.tentacles).push_back(a);
  }
  return s;
}

bool validate_squid(const CQ& q, const SquidDecomposition& s, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  for (const Atom& a : q.body) {
    if (std::find(s.q_plus.begin(), s.q_plus.end(), a) == s.q_plus.end()) {
      return fail("cover misses query atom " + a.to_string());
    }
  }
  if (dedup(s.q_plus).size() > 2 * dedup(q.body).size()) return fail("cover has more than 2|Q| atoms");
  std::vector<Term> vars = variables_of(s.q_plus);
  for (const auto& [from, to] : s.h) {
    if (!from.is_variable()) return fail("endomap moves a non-variable");
    if (!contains(vars, to)) return fail("endomap leaves the cover variables");
  }
  SquidDecomposition expect = make_squid(s.q_plus, s.h, s.v_delta);
  auto same = [](std::vector<Atom> a, std::vector<Atom> b) {
    std::sort(a.begin(), a.end(), atom_less);
    std::sort(b.begin(), b.end(), atom_less);
    return a == b;
  };
  if (!same(expect.image, s.image)) return fail("image differs from h(Q+)");
  if (!same(expect.head, s.head) || !same(expect.tentacles, s.tentacles)) {
    return fail("H/T split does not follow V_delta");
  }
  if (!is_s_acyclic(s.tentacles, s.v_delta)) return fail("T is not [V_delta]-acyclic");
  return true;
}

namespace {

class SquidEnumerator {
 public:
  SquidEnumerator(const CQ& q, const std::vector<Predicate>& schema, const SquidLimits& limits,
                  const std::function<bool(const SquidDecomposition&)>& callback)
      : q_(q), schema_(schema), limits_(limits), callback_(callback) {}

  SquidEnumeration run() {
    std::size_t qsize = dedup(q_.body).size();
    std::size_t max_total = limits_.max_cover_atoms == 0 ? 2 * qsize : limits_.max_cover_atoms;
    max_total = std::min(max_total, 2 * qsize);
    if (limits_.fixed_cover) {
      cover(*limits_.fixed_cover);
      return stats_;
    }
    std::size_t max_extra = max_total > qsize ? max_total - qsize : 0;
    std::vector<std::size_t> picks;
    extras(picks, 0, max_extra);
    return stats_;
  }

 private:
  bool halted() const { return stats_.stopped || stats_.truncated; }

  bool tick() {
    if (++stats_.candidates > limits_.max_candidates) stats_.truncated = true;
    return !stats_.truncated;
  }

  // Non-decreasing schema indices, so each multiset of extra predicates is
  // tried once.
  void extras(std::vector<std::size_t>& picks, std::size_t from, std::size_t max_extra) {
    if (halted()) return;
    std::vector<Atom> body = q_.body;
    std::size_t fresh = 0;
    for (std::size_t p : picks) {
      std::vector<Term> args;
      for (std::size_t k = 0; k < schema_[p].arity(); ++k) {
        args.push_back(Term::variable("_c" + std::to_string(++fresh)));
      }
      body.emplace_back(schema_[p], std::move(args));
    }
    cover(body);
    if (picks.size() == max_extra) return;
    for (std::size_t p = from; p < schema_.size() && !halted(); ++p) {
      picks.push_back(p);
      extras(picks, p, max_extra);
      picks.pop_back();
    }
  }

  void cover(const std::vector<Atom>& q_plus) {
    if (halted()) return;
    if (limits_.fixed_h) {
      endomap(q_plus, *limits_.fixed_h);
      return;
    }
    std::vector<Term> vars = variables_of(q_plus);
    std::vector<std::size_t> block(vars.size(), 0);
    partitions(q_plus, vars, block, 0, 0);
  }

  // Restricted growth strings enumerate set partitions.
  void partitions(const std::vector<Atom>& q_plus, const std::vector<Term>& vars,
                  std::vector<std::size_t>& block, std::size_t i, std::size_t used) {
    if (halted()) return;
    if (i == vars.size()) {
      std::vector<std::optional<Term>> rep(used);
      for (std::size_t k = 0; k < vars.size(); ++k) {
        auto& r = rep[block[k]];
        if (!r || vars[k].name() < r->name()) r = vars[k];
      }
      TermMap h;
      for (std::size_t k = 0; k < vars.size(); ++k) h.emplace(vars[k], *rep[block[k]]);
      endomap(q_plus, h);
      return;
    }
    for (std::size_t b = 0; b <= used && !halted(); ++b) {
      block[i] = b;
      partitions(q_plus, vars, block, i + 1, b == used ? used + 1 : used);
    }
  }

  void endomap(const std::vector<Atom>& q_plus, const TermMap& h) {
    if (!tick()) return;
    SquidDecomposition base = make_squid(q_plus, h, {});
    if (limits_.image_filter && !limits_.image_filter(base.image)) return;
    std::vector<Term> vars = variables_of(base.image);
    if (vars.size() >= 63) return;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << vars.size()); ++mask) {
      if (!tick()) return;
      std::vector<Term> vd;
      for (std::size_t k = 0; k < vars.size(); ++k) {
        if (mask >> k & 1) vd.push_back(vars[k]);
      }
      SquidDecomposition s = make_squid(q_plus, h, vd);
      if (!is_s_acyclic(s.tentacles, s.v_delta)) continue;
      if (!callback_(s)) {
        stats_.stopped = true;
        return;
      }
    }
  }

  const CQ& q_;
  const std::vector<Predicate>& schema_;
  const SquidLimits& limits_;
  const std::function<bool(const SquidDecomposition&)>& callback_;
  SquidEnumeration stats_;
};

std::string atoms_key(std::span<const Atom> atoms) {
  std::vector<Atom> sorted(atoms.begin(), atoms.end());
  std::sort(sorted.begin(), sorted.end(), atom_less);
  std::string k;
  for (const Atom& a : sorted) k += a.to_string() + ";";
  return k;
}

}  // namespace

SquidEnumeration enumerate_squids(const CQ& q, const std::vector<Predicate>& schema,
                                  const SquidLimits& limits,
                                  const std::function<bool(const SquidDecomposition&)>& callback) {
  return SquidEnumerator(q, schema, limits, callback).run();
}

SquidLemmaResult verify_squid_lemma(const Instance& d, const std::vector<Tgd>& tgds, const CQ& q,
                                    const ChaseOptions& budget, const SquidLimits& limits) {
  SquidLemmaResult out;
  ChaseResult r = run_chase(d, Dependencies{tgds, {}}, budget);
  out.chase_status = r.status;
  if (r.status != ChaseStatus::kSaturated) return out;
  out.conclusive = true;
  out.chase_entails = find_homomorphism(q.body, r.instance).has_value();

  GroundSplit split = split_ground(r.instance, d);
  std::vector<Predicate> schema = r.instance.predicates();
  for (const Predicate& p : predicates_of(Dependencies{r.tgds, {}})) {
    if (std::find(schema.begin(), schema.end(), p) == schema.end()) schema.push_back(p);
  }
  for (const Atom& a : q.body) {
    if (std::find(schema.begin(), schema.end(), a.predicate()) == schema.end()) {
      schema.push_back(a.predicate());
    }
  }
  std::sort(schema.begin(), schema.end(), predicate_less);

  std::set<std::string> seen_images;
  std::map<std::string, bool> theta_cache;
  SquidLimits lim = limits;
  auto user_filter = limits.image_filter;
  lim.image_filter = [&](std::span<const Atom> image) {
    if (user_filter && !user_filter(image)) return false;
    if (!seen_images.insert(atoms_key(image)).second) return false;
    // A split homomorphism is in particular a homomorphism into the chase.
    return find_homomorphism(image, r.instance).has_value();
  };
  out.enumeration = enumerate_squids(q, schema, lim, [&](const SquidDecomposition& s) {
    std::vector<Atom> pattern = s.head;
    pattern.insert(pattern.end(), s.tentacles.begin(), s.tentacles.end());
    std::string key = atoms_key(s.head) + "|" + atoms_key(s.tentacles);
    auto it = theta_cache.find(key);
    if (it == theta_cache.end()) {
      MatchOptions mo;
      for (std::size_t i = 0; i < s.head.size(); ++i) mo.targets.push_back(&split.ground);
      for (std::size_t i = 0; i < s.tentacles.size(); ++i) mo.targets.push_back(&split.nulls);
      it = theta_cache.emplace(key, find_homomorphism(pattern, r.instance, mo).has_value()).first;
    }
    if (it->second) {
      out.squid_side = true;
      out.witness = s;
      return false;
    }
    return true;
  });
  if (out.enumeration.truncated && !out.squid_side) out.conclusive = false;
  out.holds = out.chase_entails == out.squid_side;
  return out;
}

std::string squid_to_dot(const SquidDecomposition& s) {
  std::ostringstream os;
  os << "graph squid {\n  node [shape=box];\n  subgraph cluster_head {\n    label=\"H\";\n";
  for (std::size_t i = 0; i < s.head.size(); ++i) {
    os << "    h" << i << " [label=" << quote(s.head[i].to_string()) << "];\n";
  }
  os << "  }\n";
  std::optional<JoinForestResult> jf = s_join_forest(s.tentacles, s.v_delta);
  if (jf) {
    const JoinForest& f = jf->forest;
    for (std::size_t i = 0; i < f.atoms.size(); ++i) {
      os << "  t" << i << " [label=" << quote(f.atoms[i].to_string()) << "];\n";
    }
    for (std::size_t i = 0; i < f.atoms.size(); ++i) {
      if (f.parent[i]) {
        os << "  t" << *f.parent[i] << " -- t" << i << ";\n";
      } else if (!s.head.empty()) {
        os << "  h0 -- t" << i << " [style=dashed];\n";
      }
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace chasekit
