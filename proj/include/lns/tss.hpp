#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lns/term.hpp"

namespace lns {

/// `source -label-> target` when target is present, `source -label-/>` otherwise.
struct Formula {
  Term source;
  Label label;
  std::optional<Term> target;

  static Formula positive(Term source, Label label, Term target) {
    return Formula{std::move(source), label, std::move(target)};
  }
  static Formula negative(Term source, Label label) {
    return Formula{std::move(source), label, std::nullopt};
  }

  bool is_negative() const noexcept { return !target.has_value(); }

  friend bool operator==(const Formula&, const Formula&) = default;
  friend auto operator<=>(const Formula& a, const Formula& b) {
    if (auto c = a.source <=> b.source; c != 0) return c;
    if (auto c = a.label <=> b.label; c != 0) return c;
    if (a.target.has_value() != b.target.has_value()) {
      return a.target.has_value() ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    if (a.target) return *a.target <=> *b.target;
    return std::strong_ordering::equal;
  }
};

inline std::ostream& operator<<(std::ostream& os, const Formula& f) {
  os << f.source << " -" << f.label;
  if (f.target) return os << "-> " << *f.target;
  return os << "-/>";
}

/// A deduction rule (H, f). The name is a display tag only; two rules with
/// the same premises and conclusion are the same rule.
struct DeductionRule {
  std::vector<Formula> premises;
  Formula conclusion;
  std::string name;

  friend bool operator==(const DeductionRule& a, const DeductionRule& b) {
    return a.premises == b.premises && a.conclusion == b.conclusion;
  }
  friend auto operator<=>(const DeductionRule& a, const DeductionRule& b) {
    if (auto c = a.conclusion <=> b.conclusion; c != 0) return c;
    return a.premises <=> b.premises;
  }

  std::set<Variable> variables() const {
    std::set<Variable> vars;
    for (const auto& p : premises) {
      p.source.collect_variables(vars);
      if (p.target) p.target->collect_variables(vars);
    }
    conclusion.source.collect_variables(vars);
    conclusion.target->collect_variables(vars);
    return vars;
  }
};

inline std::ostream& operator<<(std::ostream& os, const DeductionRule& r) {
  if (!r.name.empty()) os << '[' << r.name << "] ";
  for (std::size_t i = 0; i < r.premises.size(); ++i) {
    if (i != 0) os << ", ";
    os << r.premises[i];
  }
  if (!r.premises.empty()) os << " ==> ";
  return os << r.conclusion;
}

/// Raised when a rule violates a structural requirement of a TSS.
class InvalidRule : public Error {
public:
  using Error::Error;
};

/// Transition system specification (signature, labels, rules). Rules are kept
/// sorted and deduplicated so structurally equal TSSs compare equal.
class Tss {
public:
  Tss() = default;

  /// Validates that every rule uses declared labels, that terms are well formed,
  /// that conclusions are positive and that conclusion sources are linear.
  Tss(Signature signature, std::set<Label> labels, std::vector<DeductionRule> rules,
      std::string name = {})
      : signature_(std::move(signature)), labels_(std::move(labels)), name_(std::move(name)) {
    for (auto& r : rules) check_rule(r);
    std::sort(rules.begin(), rules.end());
    rules.erase(std::unique(rules.begin(), rules.end()), rules.end());
    rules_ = std::move(rules);
    hash_ = compute_hash();
  }

  const Signature& signature() const noexcept { return signature_; }
  const std::set<Label>& labels() const noexcept { return labels_; }
  const std::vector<DeductionRule>& rules() const noexcept { return rules_; }
  const std::string& name() const noexcept { return name_; }
  std::size_t hash() const noexcept { return hash_; }

  Tss renamed(std::string name) const {
    Tss copy = *this;
    copy.name_ = std::move(name);
    return copy;
  }

  friend bool operator==(const Tss& a, const Tss& b) {
    return a.hash_ == b.hash_ && a.signature_ == b.signature_ && a.labels_ == b.labels_ &&
           a.rules_ == b.rules_;
  }
  friend std::strong_ordering operator<=>(const Tss& a, const Tss& b) {
    if (auto c = a.signature_ <=> b.signature_; c != 0) return c;
    if (auto c = a.labels_ <=> b.labels_; c != 0) return c;
    return a.rules_ <=> b.rules_;
  }

private:
  void check_rule(const DeductionRule& r) const {
    auto fail = [&](const std::string& why) {
      std::ostringstream os;
      os << "rule " << (r.name.empty() ? std::string("<anonymous>") : r.name) << ": " << why;
      throw InvalidRule(os.str());
    };
    if (r.conclusion.is_negative()) fail("conclusion must be a positive formula");
    auto check_formula = [&](const Formula& f) {
      if (!labels_.count(f.label)) fail("label '" + f.label.str() + "' is not declared");
      if (!well_formed(f.source, signature_)) fail("ill-formed term " + f.source.str());
      if (f.target && !well_formed(*f.target, signature_)) {
        fail("ill-formed term " + f.target->str());
      }
    };
    for (const auto& p : r.premises) check_formula(p);
    check_formula(r.conclusion);
    std::set<Variable> seen;
    if (!linear(r.conclusion.source, seen)) {
      fail("conclusion source " + r.conclusion.source.str() + " is not linear");
    }
  }

  static bool linear(const Term& t, std::set<Variable>& seen) {
    if (t.is_variable()) return seen.insert(t.var()).second;
    for (const auto& a : t.args()) {
      if (!linear(a, seen)) return false;
    }
    return true;
  }

  std::size_t compute_hash() const {
    std::size_t h = 0x7355;
    for (const auto& [f, n] : signature_.symbols()) h = hash_combine(h, hash_combine(f.atom().hash(), n));
    for (const auto& l : labels_) h = hash_combine(h, l.atom().hash());
    for (const auto& r : rules_) {
      h = hash_combine(h, r.conclusion.source.hash());
      h = hash_combine(h, r.conclusion.target->hash());
      h = hash_combine(h, r.conclusion.label.atom().hash());
      h = hash_combine(h, r.premises.size());
    }
    return h;
  }

  Signature signature_;
  std::set<Label> labels_;
  std::vector<DeductionRule> rules_;
  std::string name_;
  std::size_t hash_ = 0;
};

/// (sig1 (+) sig2, L1 u L2, D1 u D2). Throws ArityClash when the signatures clash.
inline Tss union_tss(const Tss& left, const Tss& right) {
  Signature sig = union_signatures(left.signature(), right.signature());
  std::set<Label> labels = left.labels();
  labels.insert(right.labels().begin(), right.labels().end());
  std::vector<DeductionRule> rules = left.rules();
  rules.insert(rules.end(), right.rules().begin(), right.rules().end());
  std::string name;
  if (!left.name().empty() && !right.name().empty()) {
    name = left.name() + "+" + right.name();
  }
  return Tss(std::move(sig), std::move(labels), std::move(rules), std::move(name));
}

/// Label-level stratification: positive premise labels sit at or below the
/// conclusion label, negative premise labels strictly below.
struct Stratification {
  std::map<Label, std::size_t> stratum;

  std::size_t of(Label l) const {
    auto it = stratum.find(l);
    return it == stratum.end() ? 0 : it->second;
  }
  std::size_t height() const {
    std::size_t h = 0;
    for (const auto& [l, s] : stratum) h = std::max(h, s);
    return h;
  }
};

/// Least stratification of the rule labels, or NotStratifiable with a witness
/// cycle through a negative dependency.
inline Stratification stratify(const Tss& tss) {
  // Edge conclusion -> premise label; weight 1 for negative premises.
  std::map<Label, std::map<Label, int>> edges;
  for (const auto& l : tss.labels()) edges[l];
  for (const auto& r : tss.rules()) {
    for (const auto& p : r.premises) {
      int w = p.is_negative() ? 1 : 0;
      int& slot = edges[r.conclusion.label].try_emplace(p.label, w).first->second;
      slot = std::max(slot, w);
      edges[p.label];
    }
  }

  // Tarjan SCC over the label graph.
  std::vector<Label> nodes;
  std::map<Label, std::size_t> id;
  for (const auto& [l, _] : edges) {
    id[l] = nodes.size();
    nodes.push_back(l);
  }
  const std::size_t n = nodes.size();
  std::vector<std::size_t> index(n, SIZE_MAX), low(n, 0), comp(n, SIZE_MAX);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::size_t counter = 0, components = 0;
  std::function<void(std::size_t)> connect = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = true;
    for (const auto& [m, w] : edges[nodes[v]]) {
      std::size_t u = id[m];
      if (index[u] == SIZE_MAX) {
        connect(u);
        low[v] = std::min(low[v], low[u]);
      } else if (on_stack[u]) {
        low[v] = std::min(low[v], index[u]);
      }
    }
    if (low[v] == index[v]) {
      std::size_t u;
      do {
        u = stack.back();
        stack.pop_back();
        on_stack[u] = false;
        comp[u] = components;
      } while (u != v);
      ++components;
    }
  };
  for (std::size_t v = 0; v < n; ++v) {
    if (index[v] == SIZE_MAX) connect(v);
  }

  for (std::size_t v = 0; v < n; ++v) {
    for (const auto& [m, w] : edges[nodes[v]]) {
      std::size_t u = id[m];
      if (w == 1 && comp[u] == comp[v]) {
        // Witness: v -neg-> u, then a path u ~> v inside the component.
        std::map<std::size_t, std::size_t> parent;
        std::vector<std::size_t> queue{u};
        parent[u] = u;
        for (std::size_t qi = 0; qi < queue.size() && !parent.count(v); ++qi) {
          std::size_t x = queue[qi];
          for (const auto& [m2, w2] : edges[nodes[x]]) {
            std::size_t y = id[m2];
            if (comp[y] == comp[v] && !parent.count(y)) {
              parent[y] = x;
              queue.push_back(y);
            }
          }
        }
        std::vector<std::string> path;
        for (std::size_t x = v;; x = parent[x]) {
          path.push_back(nodes[x].str());
          if (x == u) break;
        }
        std::reverse(path.begin(), path.end());
        std::vector<std::string> cycle{nodes[v].str()};
        cycle.insert(cycle.end(), path.begin(), path.end());
        if (u == v) cycle.resize(2);
        throw NotStratifiable(std::move(cycle));
      }
    }
  }

  // Tarjan emits components in reverse topological order (dependencies first),
  // so one pass in emission order computes longest paths.
  std::vector<std::vector<std::size_t>> members(components);
  for (std::size_t v = 0; v < n; ++v) members[comp[v]].push_back(v);
  std::vector<std::size_t> level(components, 0);
  for (std::size_t c = 0; c < components; ++c) {
    for (std::size_t v : members[c]) {
      for (const auto& [m, w] : edges[nodes[v]]) {
        std::size_t d = comp[id[m]];
        if (d != c) level[c] = std::max(level[c], level[d] + static_cast<std::size_t>(w));
      }
    }
  }
  Stratification result;
  for (std::size_t v = 0; v < n; ++v) result.stratum[nodes[v]] = level[comp[v]];
  return result;
}

} // namespace lns
