#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lns/atom.hpp"
#include "lns/error.hpp"

namespace lns {

/// Regular expression over labels: atom | %e | e.e | e|e | e*.
class Regex {
public:
  enum class Kind { Atom, Epsilon, Concat, Alt, Star };

  static Regex atom(Label l) { return Regex(make(Kind::Atom, l, {})); }
  static Regex atom(std::string_view l) { return atom(Label(l)); }
  static Regex epsilon() { return Regex(make(Kind::Epsilon, Label(), {})); }
  static Regex concat(Regex a, Regex b) {
    return Regex(make(Kind::Concat, Label(), {std::move(a), std::move(b)}));
  }
  static Regex alt(Regex a, Regex b) {
    return Regex(make(Kind::Alt, Label(), {std::move(a), std::move(b)}));
  }
  static Regex star(Regex a) { return Regex(make(Kind::Star, Label(), {std::move(a)})); }

  Kind kind() const noexcept { return node_->kind; }
  Label label() const noexcept { return node_->label; }
  const Regex& left() const { return node_->children.at(0); }
  const Regex& right() const { return node_->children.at(1); }
  const Regex& body() const { return node_->children.at(0); }
  std::size_t hash() const noexcept { return node_->hash; }

  std::size_t size() const {
    std::size_t n = 1;
    for (const auto& c : node_->children) n += c.size();
    return n;
  }

  void collect_labels(std::set<Label>& out) const {
    if (kind() == Kind::Atom) out.insert(label());
    for (const auto& c : node_->children) c.collect_labels(out);
  }
  std::set<Label> labels() const {
    std::set<Label> out;
    collect_labels(out);
    return out;
  }

  friend bool operator==(const Regex& a, const Regex& b) {
    if (a.node_ == b.node_) return true;
    return a.hash() == b.hash() && (a <=> b) == 0;
  }
  friend std::strong_ordering operator<=>(const Regex& a, const Regex& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = static_cast<int>(a.kind()) <=> static_cast<int>(b.kind()); c != 0) return c;
    if (a.kind() == Kind::Atom) return a.label() <=> b.label();
    const auto& ca = a.node_->children;
    const auto& cb = b.node_->children;
    for (std::size_t i = 0; i < ca.size(); ++i) {
      if (auto c = ca[i] <=> cb[i]; c != 0) return c;
    }
    return std::strong_ordering::equal;
  }

  /// Text form: star binds tighter than `.`, which binds tighter than `|`.
  void print(std::ostream& os, int context = 0) const {
    switch (kind()) {
    case Kind::Atom: os << label(); break;
    case Kind::Epsilon: os << "%e"; break;
    case Kind::Alt:
      if (context > 0) os << '(';
      left().print(os, 0);
      os << '|';
      right().print(os, 0);
      if (context > 0) os << ')';
      break;
    case Kind::Concat:
      if (context > 1) os << '(';
      left().print(os, 1);
      os << '.';
      right().print(os, 1);
      if (context > 1) os << ')';
      break;
    case Kind::Star:
      body().print(os, 2);
      os << '*';
      break;
    }
  }
  std::string str() const {
    std::ostringstream os;
    print(os);
    return os.str();
  }

private:
  struct Node {
    Kind kind;
    Label label;
    std::vector<Regex> children;
    std::size_t hash;
  };
  static std::shared_ptr<const Node> make(Kind k, Label l, std::vector<Regex> children) {
    std::size_t h = hash_combine(static_cast<std::size_t>(k) + 0x3e, k == Kind::Atom ? l.atom().hash() : 0);
    for (const auto& c : children) h = hash_combine(h, c.hash());
    return std::make_shared<const Node>(Node{k, l, std::move(children), h});
  }
  explicit Regex(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

inline std::ostream& operator<<(std::ostream& os, const Regex& r) {
  r.print(os);
  return os;
}

/// Finite label sequence; as a regex it is the concatenation of its labels.
class Trace {
public:
  Trace() = default;
  explicit Trace(std::vector<Label> labels) : labels_(std::move(labels)) {}
  Trace(std::initializer_list<std::string_view> labels) {
    for (auto l : labels) labels_.emplace_back(l);
  }

  const std::vector<Label>& labels() const noexcept { return labels_; }
  std::size_t length() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }

  /// Left-nested concatenation, %e for the empty trace.
  Regex to_regex() const {
    if (labels_.empty()) return Regex::epsilon();
    Regex r = Regex::atom(labels_.front());
    for (std::size_t i = 1; i < labels_.size(); ++i) r = Regex::concat(r, Regex::atom(labels_[i]));
    return r;
  }

  /// Inverse of to_regex on the concatenation-only fragment; epsilons are units.
  static std::optional<Trace> from_regex(const Regex& r) {
    Trace out;
    if (!flatten(r, out.labels_)) return std::nullopt;
    return out;
  }

  std::string str() const {
    if (labels_.empty()) return "%e";
    std::string s;
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      if (i != 0) s += '.';
      s += labels_[i].str();
    }
    return s;
  }

  friend bool operator==(const Trace&, const Trace&) = default;
  friend auto operator<=>(const Trace& a, const Trace& b) { return a.labels_ <=> b.labels_; }

private:
  static bool flatten(const Regex& r, std::vector<Label>& out) {
    switch (r.kind()) {
    case Regex::Kind::Atom: out.push_back(r.label()); return true;
    case Regex::Kind::Epsilon: return true;
    case Regex::Kind::Concat: return flatten(r.left(), out) && flatten(r.right(), out);
    default: return false;
    }
  }
  std::vector<Label> labels_;
};

inline Trace append(const Trace& trace, Label label) {
  std::vector<Label> labels = trace.labels();
  labels.push_back(label);
  return Trace(std::move(labels));
}

/// Finite automaton over labels. Edges without a label are epsilon moves.
/// A deterministic automaton has no epsilon moves and exactly one edge per
/// alphabet letter from every state.
struct Automaton {
  struct Edge {
    std::optional<Label> label;
    std::size_t to;
  };

  std::vector<std::vector<Edge>> edges;
  std::set<Label> alphabet;
  std::size_t start = 0;
  std::set<std::size_t> accepting;
  bool deterministic = false;

  std::size_t state_count() const noexcept { return edges.size(); }

  std::size_t add_state() {
    edges.emplace_back();
    return edges.size() - 1;
  }

  std::set<std::size_t> closure(std::set<std::size_t> states) const {
    std::vector<std::size_t> work(states.begin(), states.end());
    while (!work.empty()) {
      std::size_t s = work.back();
      work.pop_back();
      for (const auto& e : edges[s]) {
        if (!e.label && states.insert(e.to).second) work.push_back(e.to);
      }
    }
    return states;
  }

  std::set<std::size_t> step(const std::set<std::size_t>& states, Label l) const {
    std::set<std::size_t> next;
    for (std::size_t s : states) {
      for (const auto& e : edges[s]) {
        if (e.label && *e.label == l) next.insert(e.to);
      }
    }
    return closure(std::move(next));
  }

  /// States reached after reading the trace from the start state.
  std::set<std::size_t> run(const Trace& trace) const {
    std::set<std::size_t> current = closure({start});
    for (Label l : trace.labels()) {
      current = step(current, l);
      if (current.empty()) break;
    }
    return current;
  }

  bool accepts(const Trace& trace) const {
    for (std::size_t s : run(trace)) {
      if (accepting.count(s)) return true;
    }
    return false;
  }

  /// States from which some accepting state is reachable.
  std::vector<bool> live_states() const {
    std::vector<std::vector<std::size_t>> reverse(state_count());
    for (std::size_t s = 0; s < state_count(); ++s) {
      for (const auto& e : edges[s]) reverse[e.to].push_back(s);
    }
    std::vector<bool> live(state_count(), false);
    std::vector<std::size_t> work(accepting.begin(), accepting.end());
    for (std::size_t s : work) live[s] = true;
    while (!work.empty()) {
      std::size_t s = work.back();
      work.pop_back();
      for (std::size_t p : reverse[s]) {
        if (!live[p]) {
          live[p] = true;
          work.push_back(p);
        }
      }
    }
    return live;
  }
};

namespace detail {

inline std::pair<std::size_t, std::size_t> thompson(const Regex& e, Automaton& a) {
  std::size_t s = a.add_state();
  std::size_t f = a.add_state();
  switch (e.kind()) {
  case Regex::Kind::Atom: a.edges[s].push_back({e.label(), f}); break;
  case Regex::Kind::Epsilon: a.edges[s].push_back({std::nullopt, f}); break;
  case Regex::Kind::Concat: {
    auto [ls, lf] = thompson(e.left(), a);
    auto [rs, rf] = thompson(e.right(), a);
    a.edges[s].push_back({std::nullopt, ls});
    a.edges[lf].push_back({std::nullopt, rs});
    a.edges[rf].push_back({std::nullopt, f});
    break;
  }
  case Regex::Kind::Alt: {
    auto [ls, lf] = thompson(e.left(), a);
    auto [rs, rf] = thompson(e.right(), a);
    a.edges[s].push_back({std::nullopt, ls});
    a.edges[s].push_back({std::nullopt, rs});
    a.edges[lf].push_back({std::nullopt, f});
    a.edges[rf].push_back({std::nullopt, f});
    break;
  }
  case Regex::Kind::Star: {
    auto [bs, bf] = thompson(e.body(), a);
    a.edges[s].push_back({std::nullopt, bs});
    a.edges[s].push_back({std::nullopt, f});
    a.edges[bf].push_back({std::nullopt, bs});
    a.edges[bf].push_back({std::nullopt, f});
    break;
  }
  }
  return {s, f};
}

} // namespace detail

/// Thompson construction; the result accepts exactly the language of `e`.
inline Automaton compile(const Regex& e) {
  Automaton a;
  a.alphabet = e.labels();
  auto [s, f] = detail::thompson(e, a);
  a.start = s;
  a.accepting = {f};
  return a;
}

inline constexpr std::size_t default_state_cap = 100000;

/// Subset construction, total over `alphabet` (which must contain the
/// automaton's own letters for the result to be faithful).
inline Automaton determinize(const Automaton& nfa, const std::set<Label>& alphabet,
                             std::size_t cap = default_state_cap) {
  Automaton dfa;
  dfa.alphabet = alphabet;
  dfa.deterministic = true;
  std::map<std::set<std::size_t>, std::size_t> ids;
  std::vector<std::set<std::size_t>> subsets;
  auto intern = [&](std::set<std::size_t> subset) {
    auto it = ids.find(subset);
    if (it != ids.end()) return it->second;
    if (subsets.size() >= cap) throw AutomatonTooLarge(cap);
    std::size_t id = dfa.add_state();
    for (std::size_t s : subset) {
      if (nfa.accepting.count(s)) {
        dfa.accepting.insert(id);
        break;
      }
    }
    ids.emplace(subset, id);
    subsets.push_back(std::move(subset));
    return id;
  };
  dfa.start = intern(nfa.closure({nfa.start}));
  for (std::size_t i = 0; i < subsets.size(); ++i) {
    for (Label l : alphabet) {
      std::size_t to = intern(nfa.step(subsets[i], l));
      dfa.edges[i].push_back({l, to});
    }
  }
  return dfa;
}

inline bool member(const Trace& trace, const Regex& e) { return compile(e).accepts(trace); }

/// True iff some continuation of the trace is in the language of `e`.
inline bool prefix_feasible(const Trace& trace, const Regex& e) {
  Automaton a = compile(e);
  auto live = a.live_states();
  for (std::size_t s : a.run(trace)) {
    if (live[s]) return true;
  }
  return false;
}

struct InclusionResult {
  bool included = true;
  /// Shortest string in the left language outside the right one.
  std::optional<Trace> witness;
};

/// Decides [[left]] <= [[right]] by exploring the product of the left NFA with
/// the complemented DFA of `right`. The alphabet is both expressions' labels
/// plus `extra`, so letters the right side never mentions still count.
inline InclusionResult include(const Regex& left, const Regex& right,
                               const std::set<Label>& extra = {},
                               std::size_t cap = default_state_cap) {
  std::set<Label> sigma = extra;
  left.collect_labels(sigma);
  right.collect_labels(sigma);
  Automaton n1 = compile(left);
  Automaton d2 = determinize(compile(right), sigma, cap);

  using Pair = std::pair<std::size_t, std::size_t>;
  struct Parent {
    Pair from;
    std::optional<Label> via;
  };
  std::map<Pair, Parent> parent;
  std::vector<Pair> queue;
  for (std::size_t q : n1.closure({n1.start})) {
    Pair p{q, d2.start};
    if (parent.emplace(p, Parent{p, std::nullopt}).second) queue.push_back(p);
  }
  auto dfa_next = [&](std::size_t d, Label l) {
    for (const auto& e : d2.edges[d]) {
      if (*e.label == l) return e.to;
    }
    return d; // unreachable: d2 is total over sigma
  };
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    Pair cur = queue[qi];
    if (n1.accepting.count(cur.first) && !d2.accepting.count(cur.second)) {
      std::vector<Label> word;
      for (Pair p = cur; parent.at(p).via; p = parent.at(p).from) word.push_back(*parent.at(p).via);
      std::reverse(word.begin(), word.end());
      return {false, Trace(std::move(word))};
    }
    for (const auto& e : n1.edges[cur.first]) {
      if (!e.label) continue;
      std::size_t d = dfa_next(cur.second, *e.label);
      for (std::size_t q : n1.closure({e.to})) {
        Pair next{q, d};
        if (parent.emplace(next, Parent{cur, e.label}).second) queue.push_back(next);
      }
    }
  }
  return {true, std::nullopt};
}

namespace detail {

class RegexReader {
public:
  explicit RegexReader(std::string_view text) : text_(text) {}

  Regex read() {
    Regex r = alternation();
    skip();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return r;
  }

private:
  Regex alternation() {
    Regex r = concatenation();
    while (peek('|')) {
      ++pos_;
      r = Regex::alt(r, concatenation());
    }
    return r;
  }
  Regex concatenation() {
    Regex r = starred();
    while (peek('.')) {
      ++pos_;
      r = Regex::concat(r, starred());
    }
    return r;
  }
  Regex starred() {
    Regex r = primary();
    while (peek('*')) {
      ++pos_;
      r = Regex::star(r);
    }
    return r;
  }
  Regex primary() {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of expression");
    char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Regex r = alternation();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return r;
    }
    if (c == '%') {
      if (text_.substr(pos_, 2) != "%e") fail("expected %e");
      pos_ += 2;
      return Regex::epsilon();
    }
    std::size_t begin = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) ++pos_;
    if (begin == pos_) fail("expected a label");
    return Regex::atom(text_.substr(begin, pos_ - begin));
  }
  bool peek(char c) {
    skip();
    return pos_ < text_.size() && text_[pos_] == c;
  }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, 1, pos_ + 1); }

  std::string_view text_;
  std::size_t pos_ = 0;
};

} // namespace detail

/// Parses the label-only regex syntax (`%e`, `.`, `|`, postfix `*`, parentheses).
inline Regex parse_regex(std::string_view text) { return detail::RegexReader(text).read(); }

} // namespace lns
