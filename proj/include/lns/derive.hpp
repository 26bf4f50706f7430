#pragma once

#include <cstddef>
#include <functional>
#include <set>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "lns/tss.hpp"

namespace lns {

struct Transition {
  Label label;
  Term target;

  friend bool operator==(const Transition&, const Transition&) = default;
  friend auto operator<=>(const Transition& a, const Transition& b) {
    if (auto c = a.label <=> b.label; c != 0) return c;
    return a.target <=> b.target;
  }
};

struct DeriveOptions {
  /// Bound on nested premise solving and on fixed-point passes per goal.
  std::size_t max_depth = 512;
};

/// Goal-directed evaluation of the transition relation of a stratifiable TSS.
///
/// Every goal (term, label) is solved as a least fixed point over rule
/// instances. A negative premise `u -l-/>` is decided only after the goal
/// (u, l) has been completed; stratification guarantees that goal lives in a
/// strictly lower stratum, so it never depends on the goal being solved.
/// The memo table lives as long as the Deriver.
class Deriver {
public:
  explicit Deriver(const Tss& tss, DeriveOptions options = {})
      : tss_(tss), options_(options), strata_(stratify(tss)) {
    for (const auto& r : tss_.rules()) by_label_[r.conclusion.label].push_back(&r);
  }

  const Stratification& strata() const noexcept { return strata_; }

  /// All (label, target) pairs derivable from a ground source term.
  std::set<Transition> derive_all(const Term& source) {
    if (!source.is_ground()) {
      throw Error("derive_all: source term " + source.str() + " is not ground");
    }
    std::set<Transition> out;
    for (const auto& label : tss_.labels()) {
      for (const auto& t : complete({source, label})) out.insert({label, t});
    }
    return out;
  }

  /// Targets of `source -label->`.
  std::set<Term> targets(const Term& source, Label label) { return complete({source, label}); }

private:
  struct Goal {
    Term term;
    Label label;
    friend bool operator==(const Goal&, const Goal&) = default;
  };
  struct GoalHash {
    std::size_t operator()(const Goal& g) const noexcept {
      return hash_combine(g.term.hash(), g.label.atom().hash());
    }
  };
  struct Entry {
    std::set<Term> targets;
    bool complete = false;
  };
  struct Frame {
    std::unordered_set<Goal, GoalHash> visited;
    bool changed = false;
  };

  std::set<Term> complete(const Goal& goal) {
    Entry& entry = memo_[goal];
    if (entry.complete) return entry.targets;
    Frame frame;
    for (std::size_t pass = 0;; ++pass) {
      if (pass > options_.max_depth) depth_exceeded(goal);
      frames_.push_back(Frame{});
      eval(goal, 0);
      frame = std::move(frames_.back());
      frames_.pop_back();
      if (!frame.changed) break;
    }
    for (const auto& g : frame.visited) memo_[g].complete = true;
    return memo_[goal].targets;
  }

  std::set<Term> eval(const Goal& goal, std::size_t depth) {
    if (depth > options_.max_depth) depth_exceeded(goal);
    Entry& entry = memo_[goal];
    if (entry.complete) return entry.targets;
    Frame& frame = frames_.back();
    if (!frame.visited.insert(goal).second) return entry.targets;

    auto it = by_label_.find(goal.label);
    if (it == by_label_.end()) return entry.targets;
    for (const DeductionRule* rule : it->second) {
      Binding binding;
      if (!match_term(rule->conclusion.source, goal.term, binding)) continue;
      std::vector<const Formula*> order;
      for (const auto& p : rule->premises) {
        if (!p.is_negative()) order.push_back(&p);
      }
      for (const auto& p : rule->premises) {
        if (p.is_negative()) order.push_back(&p);
      }
      solve_premises(*rule, order, 0, binding, depth, [&](const Binding& full) {
        Term target = substitute_term(*rule->conclusion.target, full);
        if (!target.is_ground()) {
          throw DerivationError(DerivationError::Kind::NonGroundConclusion,
                                "rule " + rule->name + ": conclusion target " + target.str() +
                                    " has unbound variables");
        }
        if (memo_[goal].targets.insert(target).second) frames_.back().changed = true;
      });
    }
    return memo_[goal].targets;
  }

  void solve_premises(const DeductionRule& rule, const std::vector<const Formula*>& order,
                      std::size_t i, const Binding& binding, std::size_t depth,
                      const std::function<void(const Binding&)>& emit) {
    if (i == order.size()) {
      emit(binding);
      return;
    }
    const Formula& premise = *order[i];
    Term source = substitute_term(premise.source, binding);
    if (!source.is_ground()) {
      throw DerivationError(DerivationError::Kind::NonGroundPremise,
                            "rule " + rule.name + ": premise source " + source.str() +
                                " has unbound variables");
    }
    if (premise.is_negative()) {
      if (complete({source, premise.label}).empty()) {
        solve_premises(rule, order, i + 1, binding, depth, emit);
      }
      return;
    }
    for (const auto& t : eval({source, premise.label}, depth + 1)) {
      Binding extended = binding;
      if (match_term(*premise.target, t, extended)) {
        solve_premises(rule, order, i + 1, extended, depth, emit);
      }
    }
  }

  [[noreturn]] void depth_exceeded(const Goal& goal) const {
    throw DerivationError(DerivationError::Kind::DepthExceeded,
                          "derivation of " + goal.term.str() + " -" + goal.label.str() +
                              "-> exceeds depth " + std::to_string(options_.max_depth));
  }

  const Tss& tss_;
  DeriveOptions options_;
  Stratification strata_;
  std::unordered_map<Label, std::vector<const DeductionRule*>> by_label_;
  std::unordered_map<Goal, Entry, GoalHash> memo_;
  std::vector<Frame> frames_;
};

/// Throws NotStratifiable or DerivationError.
inline std::set<Transition> derive_all(const Tss& tss, const Term& source,
                                       DeriveOptions options = {}) {
  return Deriver(tss, options).derive_all(source);
}

inline bool has_any_transition(const Tss& tss, const Term& source, DeriveOptions options = {}) {
  return !derive_all(tss, source, options).empty();
}

} // namespace lns
