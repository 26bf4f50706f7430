#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "lns/atom.hpp"
#include "lns/error.hpp"

namespace lns {

/// Function symbols with their arities. The empty map is the empty signature.
class Signature {
public:
  Signature() = default;
  Signature(std::initializer_list<std::pair<const Symbol, std::size_t>> init)
      : arity_(init) {}

  /// Adds a symbol; throws ArityClash when it is already present with another arity.
  void declare(Symbol symbol, std::size_t arity) {
    auto [it, inserted] = arity_.emplace(symbol, arity);
    if (!inserted && it->second != arity) {
      throw ArityClash(symbol.str(), it->second, arity);
    }
  }

  std::optional<std::size_t> arity(Symbol symbol) const {
    auto it = arity_.find(symbol);
    if (it == arity_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(Symbol symbol) const { return arity_.count(symbol) != 0; }
  bool empty() const noexcept { return arity_.empty(); }
  std::size_t size() const noexcept { return arity_.size(); }
  const std::map<Symbol, std::size_t>& symbols() const noexcept { return arity_; }

  friend bool operator==(const Signature&, const Signature&) = default;
  friend auto operator<=>(const Signature& a, const Signature& b) {
    return a.arity_ <=> b.arity_;
  }

private:
  std::map<Symbol, std::size_t> arity_;
};

/// Componentwise union; undefined (ArityClash) when a shared symbol's arities differ.
inline Signature union_signatures(const Signature& left, const Signature& right) {
  Signature result = left;
  for (const auto& [symbol, arity] : right.symbols()) {
    auto existing = left.arity(symbol);
    if (existing && *existing != arity) {
      throw ArityClash(symbol.str(), *existing, arity);
    }
    result.declare(symbol, arity);
  }
  return result;
}

/// Immutable first-order term: a variable or an application f(t1, ..., tn).
/// Copies share structure; equality and ordering are structural.
class Term {
public:
  static Term variable(Variable v) {
    return Term(std::make_shared<const Node>(Node{v, {}, true, v.atom().hash()}));
  }
  static Term variable(std::string_view name) { return variable(Variable(name)); }

  static Term apply(Symbol f, std::vector<Term> args = {}) {
    std::size_t h = hash_combine(f.atom().hash(), 0x51);
    for (const auto& a : args) h = hash_combine(h, a.hash());
    return Term(std::make_shared<const Node>(Node{f, std::move(args), false, h}));
  }
  static Term apply(std::string_view f, std::vector<Term> args = {}) {
    return apply(Symbol(f), std::move(args));
  }

  bool is_variable() const noexcept { return node_->is_var; }
  Variable var() const { return std::get<Variable>(node_->head); }
  Symbol symbol() const { return std::get<Symbol>(node_->head); }
  const std::vector<Term>& args() const noexcept { return node_->args; }
  std::size_t hash() const noexcept { return node_->hash; }

  bool is_ground() const {
    if (is_variable()) return false;
    for (const auto& a : args()) {
      if (!a.is_ground()) return false;
    }
    return true;
  }

  std::size_t depth() const {
    std::size_t d = 0;
    for (const auto& a : args()) d = std::max(d, a.depth());
    return d + 1;
  }

  void collect_variables(std::set<Variable>& out) const {
    if (is_variable()) {
      out.insert(var());
      return;
    }
    for (const auto& a : args()) a.collect_variables(out);
  }

  friend bool operator==(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return true;
    if (a.hash() != b.hash()) return false;
    return (a <=> b) == std::strong_ordering::equal;
  }

  friend std::strong_ordering operator<=>(const Term& a, const Term& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (a.is_variable() != b.is_variable()) {
      return a.is_variable() ? std::strong_ordering::less : std::strong_ordering::greater;
    }
    if (a.is_variable()) return a.var() <=> b.var();
    if (auto c = a.symbol() <=> b.symbol(); c != 0) return c;
    if (auto c = a.args().size() <=> b.args().size(); c != 0) return c;
    for (std::size_t i = 0; i < a.args().size(); ++i) {
      if (auto c = a.args()[i] <=> b.args()[i]; c != 0) return c;
    }
    return std::strong_ordering::equal;
  }

  std::string str() const {
    std::ostringstream os;
    print(os);
    return os.str();
  }

  void print(std::ostream& os) const {
    if (is_variable()) {
      os << var();
      return;
    }
    os << symbol();
    if (args().empty()) return;
    os << '(';
    for (std::size_t i = 0; i < args().size(); ++i) {
      if (i != 0) os << ',';
      args()[i].print(os);
    }
    os << ')';
  }

private:
  struct Node {
    std::variant<Variable, Symbol> head;
    std::vector<Term> args;
    bool is_var;
    std::size_t hash;
  };

  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

inline std::ostream& operator<<(std::ostream& os, const Term& t) {
  t.print(os);
  return os;
}

/// True iff every application node has exactly the arity `sig` assigns to it.
inline bool well_formed(const Term& term, const Signature& sig) {
  if (term.is_variable()) return true;
  auto arity = sig.arity(term.symbol());
  if (!arity || *arity != term.args().size()) return false;
  for (const auto& a : term.args()) {
    if (!well_formed(a, sig)) return false;
  }
  return true;
}

using Binding = std::map<Variable, Term>;

/// Simultaneous replacement of variables. Unbound variables are left in place.
inline Term substitute_term(const Term& term, const Binding& binding) {
  if (binding.empty()) return term;
  if (term.is_variable()) {
    auto it = binding.find(term.var());
    return it == binding.end() ? term : it->second;
  }
  std::vector<Term> args;
  args.reserve(term.args().size());
  bool changed = false;
  for (const auto& a : term.args()) {
    args.push_back(substitute_term(a, binding));
    changed = changed || !(args.back() == a);
  }
  return changed ? Term::apply(term.symbol(), std::move(args)) : term;
}

/// One-way matching of `pattern` against a ground `subject`, extending
/// `binding`. Repeated variables must bind equal subterms.
inline bool match_term(const Term& pattern, const Term& subject, Binding& binding) {
  if (pattern.is_variable()) {
    auto [it, inserted] = binding.emplace(pattern.var(), subject);
    return inserted || it->second == subject;
  }
  if (subject.is_variable() || pattern.symbol() != subject.symbol() ||
      pattern.args().size() != subject.args().size()) {
    return false;
  }
  for (std::size_t i = 0; i < pattern.args().size(); ++i) {
    if (!match_term(pattern.args()[i], subject.args()[i], binding)) return false;
  }
  return true;
}

} // namespace lns

template <>
struct std::hash<lns::Term> {
  std::size_t operator()(const lns::Term& t) const noexcept { return t.hash(); }
};
