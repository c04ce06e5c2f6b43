#include "chasekit/chase.h"

#include <unistd.h>

#include <algorithm>
#include <deque>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "chasekit/homomorphism.h"

namespace chasekit {

std::string to_string(ChaseMode m) {
  return m == ChaseMode::kOblivious ? "oblivious" : "restricted";
}

std::string to_string(ChaseStatus s) {
  switch (s) {
    case ChaseStatus::kSaturated: return "saturated";
    case ChaseStatus::kBudgetExhausted: return "budget-exhausted";
    case ChaseStatus::kFailed: return "failed";
  }
  return "?";
}

namespace {

bool trigger_less(const Trigger& a, const Trigger& b) { return a.matched < b.matched; }

std::vector<Trigger> all_matches(std::span<const Atom> body, const Instance& b) {
  std::vector<Trigger> out;
  for_each_match(body, b, [&](const TermMap& m, std::span<const AtomId> ids) {
    out.push_back(Trigger{m, std::vector<AtomId>(ids.begin(), ids.end())});
    return true;
  });
  std::sort(out.begin(), out.end(), trigger_less);
  return out;
}

// Matches of body that use atom k and otherwise only atoms with id <= k.
// Each such match is produced once: the first body atom mapped to k is the
// one pinned to k, earlier ones are restricted to ids < k.
std::vector<Trigger> matches_with(std::span<const Atom> body, const Instance& b, AtomId k) {
  std::vector<Trigger> out;
  const Atom& fact = b.atom(k);
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (!(body[i].predicate() == fact.predicate())) continue;
    if (i > 0 && k == 0) continue;  // earlier atoms would need ids < 0
    MatchOptions opts;
    opts.min_id.assign(body.size(), 0);
    opts.max_id.assign(body.size(), k);
    for (std::size_t j = 0; j < i; ++j) opts.max_id[j] = k - 1;
    opts.min_id[i] = k;
    for_each_match(
        body, b,
        [&](const TermMap& m, std::span<const AtomId> ids) {
          out.push_back(Trigger{m, std::vector<AtomId>(ids.begin(), ids.end())});
          return true;
        },
        opts);
  }
  std::sort(out.begin(), out.end(), trigger_less);
  return out;
}

bool egd_active(const Egd& egd, const TermMap& hom) {
  return hom.at(egd.lhs) != hom.at(egd.rhs);
}

}  // namespace

bool head_satisfied(const Tgd& tgd, const TermMap& hom, const Instance& b) {
  TermMap frontier;
  for (const Term& v : tgd.frontier()) {
    auto it = hom.find(v);
    if (it != hom.end()) frontier.emplace(v, it->second);
  }
  MatchOptions opts;
  opts.initial = &frontier;
  return find_homomorphism(tgd.head, b, opts).has_value();
}

std::vector<Trigger> find_triggers(const Tgd& tgd, const Instance& b, ChaseMode mode) {
  std::vector<Trigger> out = all_matches(tgd.body, b);
  if (mode == ChaseMode::kRestricted) {
    std::erase_if(out, [&](const Trigger& t) { return head_satisfied(tgd, t.hom, b); });
  }
  return out;
}

std::vector<Trigger> find_triggers(const Egd& egd, const Instance& b, ChaseMode mode) {
  if (mode == ChaseMode::kRestricted) {
    throw std::invalid_argument("restricted applicability is not defined for EGDs");
  }
  std::vector<Trigger> out = all_matches(egd.body, b);
  std::erase_if(out, [&](const Trigger& t) { return !egd_active(egd, t.hom); });
  return out;
}

TgdApplication apply_tgd(const Tgd& tgd, const Trigger& t, Instance& b, NullAllocator& alloc) {
  if (tgd.head.size() != 1) {
    throw std::invalid_argument("apply_tgd: rule must have a single head atom");
  }
  for (const Atom& a : tgd.body) {
    if (!b.contains(substitute(t.hom, a))) {
      throw std::logic_error("apply_tgd: stale trigger, body image missing: " +
                             substitute(t.hom, a).to_string());
    }
  }
  alloc.observe(b);
  TgdApplication out;
  out.extended = t.hom;
  for (const Term& z : tgd.existentials) out.extended[z] = alloc.fresh();
  out.atom = substitute(out.extended, tgd.head[0]);
  out.added = b.insert(out.atom);
  return out;
}

EgdOutcome apply_egd(const Egd& egd, const Trigger& t, const Instance& b) {
  const Term& x = t.hom.at(egd.lhs);
  const Term& y = t.hom.at(egd.rhs);
  if (x == y) throw std::invalid_argument("apply_egd: trigger does not equate distinct values");
  EgdOutcome out;
  if (x.is_constant() && y.is_constant()) {
    out.failure = true;
    out.kept = x;
    out.replaced = y;
    return out;
  }
  bool x_first = compare_terms(x, y) < 0;
  out.kept = x_first ? x : y;
  out.replaced = x_first ? y : x;
  out.instance = b.renamed(TermMap{{out.replaced, out.kept}});
  out.innocuous = out.instance.size() < b.size() && out.instance.subset_of(b);
  return out;
}

std::size_t resident_memory_mb() {
  std::ifstream in("/proc/self/statm");
  std::size_t total = 0;
  std::size_t resident = 0;
  if (!(in >> total >> resident)) return 0;
  long page = sysconf(_SC_PAGESIZE);
  return resident * static_cast<std::size_t>(page > 0 ? page : 4096) / (1024 * 1024);
}

namespace {

struct AppliedKey {
  std::size_t rule;
  std::vector<Term> image;
  friend bool operator==(const AppliedKey&, const AppliedKey&) = default;
};

struct AppliedKeyHash {
  std::size_t operator()(const AppliedKey& k) const {
    std::size_t h = k.rule;
    for (const Term& t : k.image) h = h * 1000003u ^ t.hash();
    return h;
  }
};

struct Pending {
  std::size_t rule;
  Trigger trigger;
  std::size_t depth;
};

class Engine {
 public:
  Engine(const Instance& d, const Dependencies& deps, const ChaseOptions& opts) : opts_(opts) {
    if (opts.max_steps == 0 || opts.max_depth == 0) {
      throw std::invalid_argument("chase budgets must be positive");
    }
    r_.database = d;
    r_.tgds = normalize_heads(deps.tgds);
    if (opts.egd_interleave) r_.egds = deps.egds;
    Classification cls = classify(r_.tgds);
    for (const RuleClassification& rc : cls.rules) guards_.push_back(rc.forest_guard());
    for (const Tgd& t : r_.tgds) body_vars_.push_back(variables_of(t.body));
    for (const Egd& e : r_.egds) egd_vars_.push_back(variables_of(e.body));
    alloc_.observe(d);
    for (const Atom& a : d.atoms()) {
      r_.instance.insert(a);
      add_node(a, std::nullopt, std::nullopt, std::nullopt, 0);
    }
  }

  ChaseResult run() {
    if (!drain_egds(std::nullopt)) return finish();
    for (AtomId k = 0; k < r_.instance.size(); ++k) discover(k);
    bool depth_limited = false;
    while (!queue_.empty()) {
      Pending p = std::move(queue_.front());
      queue_.pop_front();
      const Tgd& tgd = r_.tgds[p.rule];
      AppliedKey key{p.rule, image_of(p.rule, p.trigger.hom)};
      if (applied_.count(key)) continue;
      if (opts_.mode == ChaseMode::kRestricted && head_satisfied(tgd, p.trigger.hom, r_.instance)) {
        continue;
      }
      if (p.depth > opts_.max_depth) {
        depth_limited = true;
        continue;
      }
      if (r_.tgd_steps >= opts_.max_steps) {
        r_.status = ChaseStatus::kBudgetExhausted;
        r_.note = "step budget of " + std::to_string(opts_.max_steps) + " reached";
        return finish();
      }
      if (opts_.max_memory_mb != 0 && r_.tgd_steps % 64 == 0 &&
          resident_memory_mb() > opts_.max_memory_mb) {
        r_.status = ChaseStatus::kBudgetExhausted;
        r_.note = "memory cap of " + std::to_string(opts_.max_memory_mb) + " MiB reached";
        return finish();
      }
      applied_.insert(key);
      TgdApplication app = apply_tgd(tgd, p.trigger, r_.instance, alloc_);
      ++r_.tgd_steps;
      std::optional<std::size_t> parent;
      if (guards_[p.rule]) {
        parent = first_node_.at(r_.instance.atom(p.trigger.matched[*guards_[p.rule]]));
      } else {
        r_.forest_incomplete = true;
      }
      add_node(app.atom, parent, p.rule, p.trigger, p.depth);
      ChaseStep step;
      step.kind = ChaseStep::Kind::kTgd;
      step.rule = p.rule;
      step.atom = app.atom;
      step.duplicate = !app.added;
      for (const Term& v : body_vars_[p.rule]) step.bindings.emplace_back(v, p.trigger.hom.at(v));
      r_.steps.push_back(std::move(step));
      if (app.added) {
        auto id = static_cast<AtomId>(r_.instance.size() - 1);
        std::size_t merges = r_.steps.size();
        if (!drain_egds(id)) return finish();
        if (r_.steps.size() != merges) {
          rebuild_queue();
        } else {
          discover(id);
        }
      }
    }
    if (depth_limited) {
      r_.status = ChaseStatus::kBudgetExhausted;
      r_.note = "depth budget of " + std::to_string(opts_.max_depth) + " reached";
    }
    return finish();
  }

 private:
  ChaseResult finish() { return std::move(r_); }

  std::vector<Term> image_of(std::size_t rule, const TermMap& hom) const {
    std::vector<Term> out;
    out.reserve(body_vars_[rule].size());
    for (const Term& v : body_vars_[rule]) out.push_back(hom.at(v));
    return out;
  }

  std::size_t depth_of(const Atom& a) const { return r_.forest[first_node_.at(a)].depth; }

  std::size_t trigger_depth(std::size_t rule, const Trigger& t) const {
    if (guards_[rule]) return depth_of(r_.instance.atom(t.matched[*guards_[rule]])) + 1;
    std::size_t d = 0;
    for (AtomId id : t.matched) d = std::max(d, depth_of(r_.instance.atom(id)));
    return d + 1;
  }

  void add_node(const Atom& a, std::optional<std::size_t> parent, std::optional<std::size_t> rule,
                std::optional<Trigger> trigger, std::size_t depth) {
    ForestNode n;
    n.id = r_.forest.size();
    n.atom = a;
    n.parent = parent;
    n.rule = rule;
    n.trigger = std::move(trigger);
    n.generation = rule ? r_.tgd_steps : 0;
    n.depth = depth;
    auto [it, inserted] = first_node_.emplace(a, n.id);
    n.duplicate = !inserted;
    r_.forest.push_back(std::move(n));
  }

  void discover(AtomId k) {
    for (std::size_t r = 0; r < r_.tgds.size(); ++r) {
      for (Trigger& t : matches_with(r_.tgds[r].body, r_.instance, k)) {
        if (applied_.count(AppliedKey{r, image_of(r, t.hom)})) continue;
        std::size_t depth = trigger_depth(r, t);
        queue_.push_back(Pending{r, std::move(t), depth});
      }
    }
  }

  void rebuild_queue() {
    queue_.clear();
    for (AtomId k = 0; k < r_.instance.size(); ++k) discover(k);
  }

  // Applies EGDs until none is active. With `fresh` set, only triggers using
  // that atom are looked at until the first merge. Returns false on failure.
  bool drain_egds(std::optional<AtomId> fresh) {
    if (r_.egds.empty()) return true;
    for (;;) {
      bool merged = false;
      for (std::size_t e = 0; e < r_.egds.size() && !merged; ++e) {
        const Egd& egd = r_.egds[e];
        std::vector<Trigger> ts = fresh ? matches_with(egd.body, r_.instance, *fresh)
                                        : all_matches(egd.body, r_.instance);
        for (const Trigger& t : ts) {
          if (!egd_active(egd, t.hom)) continue;
          EgdOutcome out = apply_egd(egd, t, r_.instance);
          if (out.failure) {
            r_.status = ChaseStatus::kFailed;
            r_.failure = EgdFailure{e, t};
            r_.note = "egd" + std::to_string(e + 1) + " equates constants " +
                      out.kept.to_string() + " and " + out.replaced.to_string();
            return false;
          }
          ChaseStep step;
          step.kind = ChaseStep::Kind::kEgd;
          step.rule = e;
          step.kept = out.kept;
          step.replaced = out.replaced;
          step.innocuous = out.innocuous;
          for (const Term& v : egd_vars_[e]) step.bindings.emplace_back(v, t.hom.at(v));
          r_.steps.push_back(std::move(step));
          rewrite(out.kept, out.replaced, std::move(out.instance));
          merged = true;
          break;
        }
      }
      if (!merged) return true;
      fresh.reset();
    }
  }

  void rewrite(const Term& kept, const Term& replaced, Instance next) {
    TermMap m{{replaced, kept}};
    r_.instance = std::move(next);
    first_node_.clear();
    for (ForestNode& n : r_.forest) {
      n.atom = substitute(m, n.atom);
      if (n.trigger) {
        for (auto& [v, t] : n.trigger->hom) {
          if (t == replaced) t = kept;
        }
        // Ids are no longer meaningful after the instance is rebuilt.
        for (std::size_t i = 0; i < n.trigger->matched.size(); ++i) {
          auto id = r_.instance.find(substitute(n.trigger->hom, r_.tgds[*n.rule].body[i]));
          n.trigger->matched[i] = id.value_or(0);
        }
      }
      auto [it, inserted] = first_node_.emplace(n.atom, n.id);
      n.duplicate = !inserted;
    }
    std::unordered_set<AppliedKey, AppliedKeyHash> applied;
    for (AppliedKey k : applied_) {
      for (Term& t : k.image) {
        if (t == replaced) t = kept;
      }
      applied.insert(std::move(k));
    }
    applied_ = std::move(applied);
  }

  ChaseOptions opts_;
  ChaseResult r_;
  NullAllocator alloc_;
  std::vector<std::optional<std::size_t>> guards_;
  std::vector<std::vector<Term>> body_vars_;
  std::vector<std::vector<Term>> egd_vars_;
  std::unordered_map<Atom, std::size_t, AtomHash> first_node_;
  std::unordered_set<AppliedKey, AppliedKeyHash> applied_;
  std::deque<Pending> queue_;
};

}  // namespace

ChaseResult run_chase(const Instance& d, const Dependencies& deps, const ChaseOptions& opts) {
  return Engine(d, deps, opts).run();
}

std::vector<ForestNode> restricted_gcf(const std::vector<ForestNode>& forest) {
  std::unordered_set<Atom, AtomHash> seen;
  std::vector<bool> removed(forest.size(), false);
  std::vector<ForestNode> out;
  for (const ForestNode& n : forest) {
    bool dead = n.parent && removed[*n.parent];
    if (!dead && !seen.insert(n.atom).second) dead = true;
    removed[n.id] = dead;
    if (!dead) out.push_back(n);
  }
  return out;
}

GroundSplit split_ground(const Instance& b, const Instance& d) {
  GroundSplit out;
  for (const Atom& a : b.atoms()) {
    bool over_d = std::all_of(a.args().begin(), a.args().end(),
                              [&](const Term& t) { return d.has_term(t); });
    (over_d ? out.ground : out.nulls).insert(a);
  }
  return out;
}

namespace {

std::vector<std::size_t> subtree_nodes(const ChaseResult& result, const Atom& a) {
  std::optional<std::size_t> root;
  for (const ForestNode& n : result.forest) {
    if (n.atom == a) {
      root = n.id;
      break;
    }
  }
  if (!root) throw std::invalid_argument("atom labels no forest node: " + a.to_string());
  std::vector<bool> inside(result.forest.size(), false);
  std::vector<std::size_t> out;
  inside[*root] = true;
  out.push_back(*root);
  // Children always come after their parent.
  for (const ForestNode& n : result.forest) {
    if (n.parent && inside[*n.parent] && !inside[n.id]) {
      inside[n.id] = true;
      out.push_back(n.id);
    }
  }
  return out;
}

}  // namespace

Instance subtree_atoms(const ChaseResult& result, const Atom& a) {
  Instance out;
  for (std::size_t id : subtree_nodes(result, a)) out.insert(result.forest[id].atom);
  return out;
}

Instance subtree_closure(const ChaseResult& result, const Atom& a, const Instance& s) {
  std::vector<std::size_t> nodes = subtree_nodes(result, a);
  Instance closure = s;
  closure.insert(a);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t id : nodes) {
      const ForestNode& n = result.forest[id];
      if (!n.rule || !n.trigger || closure.contains(n.atom)) continue;
      const Tgd& tgd = result.tgds[*n.rule];
      bool body_in = std::all_of(tgd.body.begin(), tgd.body.end(), [&](const Atom& b) {
        return closure.contains(substitute(n.trigger->hom, b));
      });
      if (body_in) {
        closure.insert(n.atom);
        changed = true;
      }
    }
  }
  return closure;
}

std::string first_violation(const Instance& b, const Dependencies& deps) {
  for (std::size_t i = 0; i < deps.tgds.size(); ++i) {
    for (const Trigger& t : find_triggers(deps.tgds[i], b, ChaseMode::kRestricted)) {
      return "rule" + std::to_string(i + 1) + " unsatisfied at " +
             substitute(t.hom, deps.tgds[i].body[0]).to_string();
    }
  }
  for (std::size_t i = 0; i < deps.egds.size(); ++i) {
    for (const Trigger& t : find_triggers(deps.egds[i], b)) {
      return "egd" + std::to_string(i + 1) + " violated: " + t.hom.at(deps.egds[i].lhs).to_string() +
             " != " + t.hom.at(deps.egds[i].rhs).to_string();
    }
  }
  return {};
}

std::string format_step(const ChaseStep& step) {
  if (step.kind == ChaseStep::Kind::kEgd) {
    std::string out = "= " + step.kept.to_string() + "<-" + step.replaced.to_string() + " BY egd" +
                      std::to_string(step.rule + 1);
    if (step.innocuous) out += " [innocuous]";
    return out;
  }
  std::string out = "+ " + step.atom.to_string() + " BY rule" + std::to_string(step.rule + 1) + " WITH {";
  for (std::size_t i = 0; i < step.bindings.size(); ++i) {
    if (i) out += ",";
    out += step.bindings[i].first.to_string() + "->" + step.bindings[i].second.to_string();
  }
  out += "}";
  if (step.duplicate) out += " [duplicate]";
  return out;
}

std::string step_log(const ChaseResult& result) {
  std::string out;
  for (const ChaseStep& s : result.steps) out += format_step(s) + "\n";
  return out;
}

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string forest_to_dot(const std::vector<ForestNode>& forest) {
  std::ostringstream os;
  os << "digraph gcf {\n  node [shape=box];\n";
  std::unordered_set<std::size_t> present;
  for (const ForestNode& n : forest) present.insert(n.id);
  for (const ForestNode& n : forest) {
    os << "  n" << n.id << " [label=\"" << dot_escape(n.atom.to_string()) << "\"";
    if (n.duplicate) os << ", style=dashed";
    os << "];\n";
  }
  for (const ForestNode& n : forest) {
    if (n.parent && present.count(*n.parent)) {
      os << "  n" << *n.parent << " -> n" << n.id;
      if (n.rule) os << " [label=\"rule" << *n.rule + 1 << "\"]";
      os << ";\n";
    }
  }
  os << "}\n";
  return os.str();
}

}  // namespace chasekit
