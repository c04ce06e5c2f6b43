#include "chasekit/homomorphism.h"

#include <limits>
#include <stdexcept>

namespace chasekit {

namespace {

// Pattern compiled to slot numbers so bindings live in a flat vector.
struct CompiledArg {
  bool is_slot;
  std::uint32_t slot;
  Term fixed;
};

class Matcher {
 public:
  Matcher(std::span<const Atom> pattern, const Instance& target, const MatchCallback& callback,
          const MatchOptions& options)
      : pattern_(pattern), target_(target), callback_(callback), options_(options) {
    if (!options.targets.empty() && options.targets.size() != pattern.size()) {
      throw std::invalid_argument("for_each_match: targets size differs from pattern size");
    }
    if ((!options.min_id.empty() && options.min_id.size() != pattern.size()) ||
        (!options.max_id.empty() && options.max_id.size() != pattern.size())) {
      throw std::invalid_argument("for_each_match: id bounds size differs from pattern size");
    }
    std::unordered_map<Term, std::uint32_t, TermHash> slot_of;
    args_.resize(pattern.size());
    for (std::size_t i = 0; i < pattern.size(); ++i) {
      for (const Term& t : pattern[i].args()) {
        bool mappable = t.is_variable() || (t.is_null() && options.nulls_as_variables);
        if (!mappable) {
          args_[i].push_back(CompiledArg{false, 0, t});
          continue;
        }
        auto [it, inserted] = slot_of.emplace(t, static_cast<std::uint32_t>(slot_terms_.size()));
        if (inserted) slot_terms_.push_back(t);
        args_[i].push_back(CompiledArg{true, it->second, Term()});
      }
    }
    binding_.assign(slot_terms_.size(), std::nullopt);
    if (options.initial != nullptr) {
      for (std::size_t s = 0; s < slot_terms_.size(); ++s) {
        auto it = options.initial->find(slot_terms_[s]);
        if (it != options.initial->end()) binding_[s] = it->second;
      }
    }
    matched_.assign(pattern.size(), 0);
    done_.assign(pattern.size(), false);
  }

  void run() { search(0); }

 private:
  const Instance& target_of(std::size_t i) const {
    return options_.targets.empty() ? target_ : *options_.targets[i];
  }

  // Smallest candidate list for pattern atom i under the current binding.
  std::span<const AtomId> candidates(std::size_t i) const {
    const Instance& tgt = target_of(i);
    const Atom& a = pattern_[i];
    std::span<const AtomId> best = tgt.atoms_of(a.predicate());
    for (std::size_t k = 0; k < args_[i].size() && !best.empty(); ++k) {
      const CompiledArg& arg = args_[i][k];
      const Term* value = nullptr;
      if (!arg.is_slot) {
        value = &arg.fixed;
      } else if (binding_[arg.slot]) {
        value = &*binding_[arg.slot];
      }
      if (value == nullptr) continue;
      std::span<const AtomId> c = tgt.atoms_with_arg(a.predicate(), k, *value);
      if (c.size() < best.size()) best = c;
    }
    return best;
  }

  bool search(std::size_t depth) {
    if (depth == pattern_.size()) return emit();
    std::size_t pick = pattern_.size();
    std::span<const AtomId> pick_cands;
    for (std::size_t i = 0; i < pattern_.size(); ++i) {
      if (done_[i]) continue;
      std::span<const AtomId> c = candidates(i);
      if (pick == pattern_.size() || c.size() < pick_cands.size()) {
        pick = i;
        pick_cands = c;
        if (c.empty()) return true;
      }
    }
    done_[pick] = true;
    const Instance& tgt = target_of(pick);
    AtomId lo = options_.min_id.empty() ? 0 : options_.min_id[pick];
    AtomId hi = options_.max_id.empty() ? std::numeric_limits<AtomId>::max() : options_.max_id[pick];
    std::vector<std::uint32_t> bound_here;
    for (AtomId id : pick_cands) {
      if (id < lo || id > hi) continue;
      const Atom& fact = tgt.atom(id);
      bool ok = true;
      for (std::size_t k = 0; k < args_[pick].size() && ok; ++k) {
        const CompiledArg& arg = args_[pick][k];
        const Term& v = fact.arg(k);
        if (!arg.is_slot) {
          ok = arg.fixed == v;
        } else if (binding_[arg.slot]) {
          ok = *binding_[arg.slot] == v;
        } else {
          binding_[arg.slot] = v;
          bound_here.push_back(arg.slot);
        }
      }
      if (ok) {
        matched_[pick] = id;
        if (!search(depth + 1)) {
          done_[pick] = false;
          return false;
        }
      }
      for (std::uint32_t s : bound_here) binding_[s].reset();
      bound_here.clear();
    }
    done_[pick] = false;
    return true;
  }

  bool emit() {
    TermMap map;
    if (options_.initial != nullptr) map = *options_.initial;
    for (std::size_t s = 0; s < slot_terms_.size(); ++s) map[slot_terms_[s]] = *binding_[s];
    return callback_(map, matched_);
  }

  std::span<const Atom> pattern_;
  const Instance& target_;
  const MatchCallback& callback_;
  const MatchOptions& options_;
  std::vector<std::vector<CompiledArg>> args_;
  std::vector<Term> slot_terms_;
  std::vector<std::optional<Term>> binding_;
  std::vector<AtomId> matched_;
  std::vector<bool> done_;
};

}  // namespace

void for_each_match(std::span<const Atom> pattern, const Instance& target,
                    const MatchCallback& callback, const MatchOptions& options) {
  Matcher(pattern, target, callback, options).run();
}

std::optional<TermMap> find_homomorphism(std::span<const Atom> pattern, const Instance& target,
                                         const MatchOptions& options) {
  std::optional<TermMap> out;
  for_each_match(
      pattern, target,
      [&](const TermMap& m, std::span<const AtomId>) {
        out = m;
        return false;
      },
      options);
  return out;
}

std::optional<TermMap> instance_homomorphism(const Instance& from, const Instance& to) {
  MatchOptions opts;
  opts.nulls_as_variables = true;
  return find_homomorphism(from.atoms(), to, opts);
}

}  // namespace chasekit
