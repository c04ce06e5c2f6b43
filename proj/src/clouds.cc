#include "chasekit/clouds.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "chasekit/analysis.h"
#include "chasekit/chase.h"
#include "chasekit/homomorphism.h"

namespace chasekit {

Cloud cloud_of(const Instance& b, const Instance& d, const Atom& a) {
  if (!b.contains(a)) throw std::invalid_argument("cloud_of: anchor not in instance: " + a.to_string());
  std::unordered_set<Term, TermHash> allowed(a.args().begin(), a.args().end());
  for (const Term& t : d.domain()) allowed.insert(t);
  Cloud out{a, {}};
  for (const Atom& x : b.atoms()) {
    if (std::all_of(x.args().begin(), x.args().end(), [&](const Term& t) { return allowed.count(t); })) {
      out.atoms.insert(x);
    }
  }
  return out;
}

TermMap canonical_renaming(const Atom& a) {
  TermMap m;
  std::uint64_t next = 1;
  for (const Term& t : a.args()) {
    if (t.is_null() && !m.count(t)) m.emplace(t, Term::null(kCanonicalNullBase + next++));
  }
  return m;
}

CanonicalPair canonicalize(const Atom& a, std::span<const Atom> s) {
  TermMap m = canonical_renaming(a);
  CanonicalPair out;
  out.anchor = substitute(m, a);
  for (const Atom& x : s) {
    for (const Term& t : x.args()) {
      if (t.is_null() && !m.count(t)) {
        throw std::invalid_argument("canonicalize: null " + t.to_string() + " of " + x.to_string() +
                                    " does not occur in the anchor");
      }
      if (t.is_variable()) throw std::invalid_argument("canonicalize: atoms must not hold variables");
    }
    out.atoms.push_back(substitute(m, x));
  }
  std::sort(out.atoms.begin(), out.atoms.end(), atom_less);
  out.atoms.erase(std::unique(out.atoms.begin(), out.atoms.end()), out.atoms.end());
  return out;
}

std::string CanonicalPair::key() const {
  std::string k = anchor.to_string();
  k += '|';
  for (const Atom& x : atoms) {
    k += x.to_string();
    k += ';';
  }
  return k;
}

namespace {

bool nulls_within(const Atom& a, std::span<const Atom> s) {
  for (const Atom& x : s) {
    for (const Term& t : x.args()) {
      if (t.is_null() && std::find(a.args().begin(), a.args().end(), t) == a.args().end()) return false;
    }
  }
  return true;
}

std::vector<Atom> distinct(std::span<const Atom> s) {
  Instance tmp;
  for (const Atom& x : s) tmp.insert(x);
  return tmp.atoms();
}

}  // namespace

bool d_isomorphic(const Atom& a1, std::span<const Atom> s1, const Atom& a2,
                  std::span<const Atom> s2) {
  if (nulls_within(a1, s1) && nulls_within(a2, s2)) {
    return canonicalize(a1, s1) == canonicalize(a2, s2);
  }
  // Nulls outside the anchor: search for a bijection directly.
  if (!(a1.predicate() == a2.predicate())) return false;
  std::vector<Atom> x1 = distinct(s1);
  std::vector<Atom> x2 = distinct(s2);
  if (x1.size() != x2.size()) return false;
  TermMap pin;
  for (std::size_t i = 0; i < a1.arity(); ++i) {
    const Term& u = a1.arg(i);
    const Term& v = a2.arg(i);
    if (u.is_null() != v.is_null()) return false;
    if (!u.is_null()) {
      if (u != v) return false;
      continue;
    }
    auto [it, inserted] = pin.emplace(u, v);
    if (!inserted && it->second != v) return false;
  }
  Instance target(x2);
  MatchOptions opts;
  opts.nulls_as_variables = true;
  opts.initial = &pin;
  bool found = false;
  for_each_match(
      x1, target,
      [&](const TermMap& m, std::span<const AtomId>) {
        std::unordered_set<Term, TermHash> images;
        for (const auto& [from, to] : m) {
          if (!to.is_null() || !images.insert(to).second) return true;
        }
        found = true;
        return false;
      },
      opts);
  return found;
}

namespace {

struct Context {
  Atom anchor;  // canonical; unused for the top context
  Instance output;
  bool in_progress = false;
  std::size_t visited_pass = 0;
};

class BlockedSaturation {
 public:
  BlockedSaturation(const Instance& d, std::vector<Tgd> tgds, const BlockedOptions& options)
      : d_(d), tgds_(std::move(tgds)), options_(options) {
    for (const Term& t : d.domain()) consts_.insert(t);
    std::vector<Predicate> preds = predicates_of(Dependencies{tgds_, {}});
    for (const Predicate& p : d.predicates()) {
      if (std::find(preds.begin(), preds.end(), p) == preds.end()) preds.push_back(p);
    }
    std::size_t w = 0;
    for (const Predicate& p : preds) w = std::max(w, p.arity());
    result_.cloud_bound = static_cast<double>(preds.size()) *
                          std::pow(static_cast<double>(consts_.size() + w), static_cast<double>(w));
  }

  BlockedResult run() {
    ground_ = d_;
    std::vector<std::string> previous_keys;
    bool have_previous = false;
    for (std::size_t round = 1; round <= options_.max_rounds; ++round) {
      result_.rounds = round;
      memo_.clear();
      std::size_t ground_before = ground_.size();
      if (!run_round()) {
        result_.note = "store budget of " + std::to_string(options_.max_store_size) + " contexts reached";
        return finish(false);
      }
      std::vector<std::string> keys;
      for (const auto& [k, ctx] : memo_) keys.push_back(k);
      if (have_previous && ground_.size() == ground_before && keys == previous_keys) {
        return finish(true);
      }
      previous_keys = std::move(keys);
      have_previous = true;
    }
    result_.note = "round budget of " + std::to_string(options_.max_rounds) + " reached";
    return finish(false);
  }

 private:
  bool in_scope(const Atom& a, const std::unordered_set<Term, TermHash>& fresh) const {
    return std::none_of(a.args().begin(), a.args().end(),
                        [&](const Term& t) { return fresh.count(t) != 0; });
  }

  bool run_round() {
    for (;;) {
      ++pass_;
      changed_ = false;
      std::size_t before = ground_.size();
      if (!close(ground_)) return false;
      if (!changed_ && ground_.size() == before) return true;
    }
  }

  // Closes s under the rules. Returns false when the store budget is hit.
  bool close(Instance& s) {
    bool grew = true;
    while (grew) {
      grew = false;
      for (const Tgd& tgd : tgds_) {
        std::vector<TermMap> homs;
        for_each_match(tgd.body, s, [&](const TermMap& m, std::span<const AtomId>) {
          homs.push_back(m);
          return true;
        });
        for (const TermMap& h : homs) {
          if (tgd.is_full()) {
            if (s.insert(substitute(h, tgd.head[0]))) grew = true;
            continue;
          }
          if (head_satisfied(tgd, h, s)) continue;
          TermMap ext = h;
          std::unordered_set<Term, TermHash> fresh;
          std::uint64_t local = 1;
          for (const Term& z : tgd.existentials) {
            Term n = Term::null(local++);
            ext[z] = n;
            fresh.insert(n);
          }
          Atom b = substitute(ext, tgd.head[0]);
          std::vector<Atom> input;
          std::unordered_set<Term, TermHash> scope(b.args().begin(), b.args().end());
          for (const Atom& x : s.atoms()) {
            if (std::all_of(x.args().begin(), x.args().end(),
                            [&](const Term& t) { return t.is_constant() || scope.count(t); })) {
              input.push_back(x);
            }
          }
          TermMap rho = canonical_renaming(b);
          TermMap back;
          for (const auto& [from, to] : rho) back.emplace(to, from);
          CanonicalPair key = canonicalize(b, input);
          std::optional<Instance> out = evaluate(key);
          if (!out) return false;
          for (const Atom& x : out->atoms()) {
            Atom y = substitute(back, x);
            if (in_scope(y, fresh) && s.insert(y)) grew = true;
          }
        }
      }
    }
    return true;
  }

  std::optional<Instance> evaluate(const CanonicalPair& key) {
    std::string k = key.key();
    auto it = memo_.find(k);
    if (it == memo_.end()) {
      if (memo_.size() >= options_.max_store_size) return std::nullopt;
      auto ctx = std::make_unique<Context>();
      ctx->anchor = key.anchor;
      for (const Atom& x : key.atoms) ctx->output.insert(x);
      ctx->output.insert(key.anchor);
      it = memo_.emplace(k, std::move(ctx)).first;
      changed_ = true;
    }
    Context& ctx = *it->second;
    if (ctx.in_progress || ctx.visited_pass == pass_) return ctx.output;
    ctx.in_progress = true;
    ctx.visited_pass = pass_;
    Instance s = ctx.output;
    std::size_t before = s.size();
    bool ok = close(s);
    ctx.in_progress = false;
    if (!ok) return std::nullopt;
    check_bound(s.size());
    if (s.size() != before) {
      changed_ = true;
      ctx.output = std::move(s);
    }
    return ctx.output;
  }

  void check_bound(std::size_t size) {
    result_.max_cloud_size = std::max(result_.max_cloud_size, size);
    if (static_cast<double>(size) > result_.cloud_bound) result_.bound_violated = true;
  }

  BlockedResult finish(bool stabilized) {
    result_.stabilized = stabilized;
    result_.ground_atoms = ground_;
    result_.contexts = memo_.size();
    check_bound(ground_.size());
    std::map<std::string, StoreEntry> entries;
    for (const auto& [k, ctx] : memo_) {
      CanonicalPair p = canonicalize(ctx->anchor, ctx->output.atoms());
      entries.emplace(p.key(), StoreEntry{0, p.anchor, p.atoms});
    }
    for (const Atom& g : ground_.atoms()) {
      CanonicalPair p = canonicalize(g, ground_.atoms());
      entries.emplace(p.key(), StoreEntry{0, p.anchor, p.atoms});
    }
    for (auto& [k, e] : entries) {
      e.id = result_.store.size();
      result_.store.push_back(std::move(e));
    }
    return std::move(result_);
  }

  const Instance& d_;
  std::vector<Tgd> tgds_;
  BlockedOptions options_;
  std::unordered_set<Term, TermHash> consts_;
  Instance ground_;
  std::map<std::string, std::unique_ptr<Context>> memo_;
  std::size_t pass_ = 0;
  bool changed_ = false;
  BlockedResult result_;
};

}  // namespace

BlockedResult blocked_saturate(const Instance& d, const std::vector<Tgd>& tgds,
                               const BlockedOptions& options) {
  std::vector<Tgd> rules = normalize_heads(tgds);
  if (!options.force && !classify(rules).weakly_guarded()) {
    throw std::invalid_argument("blocked_saturate: rule set is not weakly guarded");
  }
  for (const Atom& a : d.atoms()) {
    if (!a.is_ground()) throw std::invalid_argument("blocked_saturate: database must be ground");
  }
  return BlockedSaturation(d, std::move(rules), options).run();
}

std::string store_stats_json(const BlockedResult& r) {
  nlohmann::ordered_json j;
  j["entries"] = r.store.size();
  j["contexts"] = r.contexts;
  j["ground_atoms"] = r.ground_atoms.size();
  j["max_cloud_size"] = r.max_cloud_size;
  j["cloud_bound"] = r.cloud_bound;
  j["bound_violated"] = r.bound_violated;
  j["rounds"] = r.rounds;
  j["stabilized"] = r.stabilized;
  if (!r.note.empty()) j["note"] = r.note;
  return j.dump(2);
}

}  // namespace chasekit
