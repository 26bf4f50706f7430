#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lns/regex.hpp"
#include "lns/term.hpp"
#include "lns/tss.hpp"

namespace lns {

/// Channel name. Free names come from source text; fresh names are minted by
/// capture-avoiding substitution; level names are the alpha-canonical names
/// given to binders by canonicalize. Only the stem of fresh and level names
/// is cosmetic: their identity is (kind, index).
class Name {
public:
  enum class Kind : std::uint8_t { Free, Fresh, Level, Temp };

  Name() = default;
  static Name free(std::string_view text) { return Name(Kind::Free, Atom(text), 0); }
  static Name fresh(Atom stem, std::uint64_t n) { return Name(Kind::Fresh, stem, n); }
  static Name level(Atom stem, std::uint64_t n) { return Name(Kind::Level, stem, n); }
  static Name temp(Atom stem, std::uint64_t n) { return Name(Kind::Temp, stem, n); }

  Kind kind() const noexcept { return kind_; }
  Atom stem() const noexcept { return stem_; }
  std::uint64_t index() const noexcept { return index_; }
  bool is_free() const noexcept { return kind_ == Kind::Free; }

  std::string str() const {
    if (kind_ == Kind::Free) return stem_.str();
    return stem_.str() + "#" + std::to_string(index_);
  }

  std::size_t hash() const noexcept {
    return kind_ == Kind::Free ? stem_.hash()
                               : hash_combine(static_cast<std::size_t>(kind_), index_);
  }

  friend bool operator==(const Name& a, const Name& b) noexcept {
    if (a.kind_ != b.kind_) return false;
    return a.kind_ == Kind::Free ? a.stem_ == b.stem_ : a.index_ == b.index_;
  }
  friend std::strong_ordering operator<=>(const Name& a, const Name& b) noexcept {
    if (auto c = static_cast<int>(a.kind_) <=> static_cast<int>(b.kind_); c != 0) return c;
    if (a.kind_ == Kind::Free) return a.stem_ <=> b.stem_;
    return a.index_ <=> b.index_;
  }

private:
  Name(Kind k, Atom stem, std::uint64_t index) : kind_(k), stem_(stem), index_(index) {}
  Kind kind_ = Kind::Free;
  Atom stem_;
  std::uint64_t index_ = 0;
};

inline std::ostream& operator<<(std::ostream& os, const Name& n) { return os << n.str(); }

/// Sorts a transmittable can evaluate to.
enum class Sort { Channel, Language, Regex, Term, Mixed };

inline const char* sort_name(Sort s) {
  switch (s) {
  case Sort::Channel: return "channel";
  case Sort::Language: return "language";
  case Sort::Regex: return "regex";
  case Sort::Term: return "term";
  case Sort::Mixed: return "ill-sorted expression";
  }
  return "?";
}

/// Transmittable expression: a name, a language builder (tss | e union e), a
/// regular expression whose atoms may be names awaiting substitution, or a
/// ground term. Immutable, structurally compared.
class Expr {
public:
  enum class Kind { Name, Tss, Union, Label, Epsilon, Concat, Alt, Star, Term };

  static Expr name(Name n) { return Expr(make(Kind::Name, Payload{n}, {})); }
  static Expr name(std::string_view n) { return name(Name::free(n)); }
  static Expr tss(Tss t) {
    return Expr(make(Kind::Tss, Payload{std::make_shared<const Tss>(std::move(t))}, {}));
  }
  static Expr tss(std::shared_ptr<const Tss> t) { return Expr(make(Kind::Tss, Payload{std::move(t)}, {})); }
  static Expr lang_union(Expr a, Expr b) { return Expr(make(Kind::Union, {}, {std::move(a), std::move(b)})); }
  static Expr label(Label l) { return Expr(make(Kind::Label, Payload{l}, {})); }
  static Expr label(std::string_view l) { return label(Label(l)); }
  static Expr epsilon() { return Expr(make(Kind::Epsilon, {}, {})); }
  static Expr concat(Expr a, Expr b) { return assoc(Kind::Concat, std::move(a), std::move(b)); }
  static Expr alt(Expr a, Expr b) { return assoc(Kind::Alt, std::move(a), std::move(b)); }
  static Expr star(Expr a) { return Expr(make(Kind::Star, {}, {std::move(a)})); }
  static Expr term(Term t) { return Expr(make(Kind::Term, Payload{std::move(t)}, {})); }

  // Concatenation and alternation are kept right-nested so that printing and
  // re-reading yields the same tree.
  static Expr assoc(Kind k, Expr a, Expr b) {
    if (a.kind() == k) return assoc(k, a.children()[0], assoc(k, a.children()[1], std::move(b)));
    return Expr(make(k, {}, {std::move(a), std::move(b)}));
  }

  Expr rebuild(std::vector<Expr> cs) const {
    if (kind() == Kind::Concat || kind() == Kind::Alt) return assoc(kind(), std::move(cs[0]), std::move(cs[1]));
    return Expr(make(kind(), node_->payload, std::move(cs)));
  }

  static Expr from_regex(const Regex& r) {
    switch (r.kind()) {
    case Regex::Kind::Atom: return label(r.label());
    case Regex::Kind::Epsilon: return epsilon();
    case Regex::Kind::Concat: return concat(from_regex(r.left()), from_regex(r.right()));
    case Regex::Kind::Alt: return alt(from_regex(r.left()), from_regex(r.right()));
    case Regex::Kind::Star: return star(from_regex(r.body()));
    }
    return epsilon();
  }
  static Expr from_trace(const Trace& t) { return from_regex(t.to_regex()); }

  Kind kind() const noexcept { return node_->kind; }
  const Name& as_name() const { return std::get<Name>(node_->payload); }
  const Tss& as_tss() const { return *std::get<std::shared_ptr<const Tss>>(node_->payload); }
  const std::shared_ptr<const Tss>& tss_ptr() const {
    return std::get<std::shared_ptr<const Tss>>(node_->payload);
  }
  Label as_label() const { return std::get<Label>(node_->payload); }
  const Term& as_term() const { return std::get<Term>(node_->payload); }
  const std::vector<Expr>& children() const noexcept { return node_->children; }
  std::size_t hash() const noexcept { return node_->hash; }

  /// The sort this expression evaluates to, assuming names are channels.
  Sort sort() const {
    switch (kind()) {
    case Kind::Name: return Sort::Channel;
    case Kind::Term: return Sort::Term;
    case Kind::Tss: return Sort::Language;
    case Kind::Union:
      return children()[0].sort() == Sort::Language && children()[1].sort() == Sort::Language
                 ? Sort::Language
                 : Sort::Mixed;
    case Kind::Label:
    case Kind::Epsilon: return Sort::Regex;
    default:
      for (const auto& c : children()) {
        if (c.sort() != Sort::Regex) return Sort::Mixed;
      }
      return Sort::Regex;
    }
  }

  /// The ground regular expression denoted, if this is one.
  std::optional<Regex> to_regex() const {
    switch (kind()) {
    case Kind::Label: return Regex::atom(as_label());
    case Kind::Epsilon: return Regex::epsilon();
    case Kind::Concat:
    case Kind::Alt: {
      auto l = children()[0].to_regex();
      auto r = children()[1].to_regex();
      if (!l || !r) return std::nullopt;
      return kind() == Kind::Concat ? Regex::concat(*l, *r) : Regex::alt(*l, *r);
    }
    case Kind::Star: {
      auto b = children()[0].to_regex();
      if (!b) return std::nullopt;
      return Regex::star(*b);
    }
    default: return std::nullopt;
    }
  }

  void collect_names(std::set<Name>& out) const {
    if (kind() == Kind::Name) out.insert(as_name());
    for (const auto& c : children()) c.collect_names(out);
  }

  bool mentions(const Name& n) const {
    if (kind() == Kind::Name) return as_name() == n;
    for (const auto& c : children()) {
      if (c.mentions(n)) return true;
    }
    return false;
  }

  /// Replaces every occurrence of name `x` by `e`.
  Expr substitute(const Expr& e, const Name& x) const {
    if (kind() == Kind::Name) return as_name() == x ? e : *this;
    if (children().empty() || !mentions(x)) return *this;
    std::vector<Expr> cs;
    for (const auto& c : children()) cs.push_back(c.substitute(e, x));
    return rebuild(std::move(cs));
  }

  /// Renames names according to `map` (names absent from the map are kept).
  Expr rename(const std::map<Name, Name>& map) const {
    if (kind() == Kind::Name) {
      auto it = map.find(as_name());
      return it == map.end() ? *this : name(it->second);
    }
    if (children().empty()) return *this;
    std::vector<Expr> cs;
    bool changed = false;
    for (const auto& c : children()) {
      cs.push_back(c.rename(map));
      changed = changed || !(cs.back() == c);
    }
    return changed ? rebuild(std::move(cs)) : *this;
  }

  friend bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    return a.hash() == b.hash() && (a <=> b) == 0;
  }
  friend std::strong_ordering operator<=>(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = static_cast<int>(a.kind()) <=> static_cast<int>(b.kind()); c != 0) return c;
    switch (a.kind()) {
    case Kind::Name:
      if (auto c = a.as_name() <=> b.as_name(); c != 0) return c;
      break;
    case Kind::Tss:
      if (a.tss_ptr() != b.tss_ptr()) {
        if (auto c = a.as_tss() <=> b.as_tss(); c != 0) return c;
      }
      break;
    case Kind::Label:
      if (auto c = a.as_label() <=> b.as_label(); c != 0) return c;
      break;
    case Kind::Term:
      if (auto c = a.as_term() <=> b.as_term(); c != 0) return c;
      break;
    default: break;
    }
    const auto& ca = a.children();
    const auto& cb = b.children();
    if (auto c = ca.size() <=> cb.size(); c != 0) return c;
    for (std::size_t i = 0; i < ca.size(); ++i) {
      if (auto c = ca[i] <=> cb[i]; c != 0) return c;
    }
    return std::strong_ordering::equal;
  }

  /// Surface syntax. `expected` is the sort the surrounding position parses by
  /// default; other sorts get an explicit `re:` / `term:` marker.
  void print(std::ostream& os, std::optional<Sort> expected = std::nullopt) const {
    Sort s = sort();
    if (kind() != Kind::Name && expected != s) {
      if (s == Sort::Regex) os << "re: ";
      else if (s == Sort::Term) os << "term: ";
    }
    print_bare(os, 0);
  }

  std::string str() const {
    std::ostringstream os;
    print_bare(os, 0);
    return os.str();
  }

private:
  using Payload = std::variant<std::monostate, Name, std::shared_ptr<const Tss>, Label, Term>;

  void print_bare(std::ostream& os, int context) const {
    switch (kind()) {
    case Kind::Name: os << as_name(); break;
    case Kind::Tss: os << (as_tss().name().empty() ? std::string("<tss>") : as_tss().name()); break;
    case Kind::Term: os << as_term(); break;
    case Kind::Label: os << as_label(); break;
    case Kind::Epsilon: os << "%e"; break;
    case Kind::Union:
      if (context > 0) os << '(';
      children()[0].print_bare(os, 0);
      os << " union ";
      children()[1].print_bare(os, 1);
      if (context > 0) os << ')';
      break;
    case Kind::Alt:
      if (context > 0) os << '(';
      children()[0].print_bare(os, 0);
      os << '|';
      children()[1].print_bare(os, 0);
      if (context > 0) os << ')';
      break;
    case Kind::Concat:
      if (context > 1) os << '(';
      children()[0].print_bare(os, 1);
      os << '.';
      children()[1].print_bare(os, 1);
      if (context > 1) os << ')';
      break;
    case Kind::Star:
      children()[0].print_bare(os, 2);
      os << '*';
      break;
    }
  }

  struct Node {
    Kind kind;
    Payload payload;
    std::vector<Expr> children;
    std::size_t hash;
  };
  static std::shared_ptr<const Node> make(Kind k, Payload p, std::vector<Expr> children) {
    std::size_t h = static_cast<std::size_t>(k) * 0x9e37 + 17;
    switch (k) {
    case Kind::Name: h = hash_combine(h, std::get<Name>(p).hash()); break;
    case Kind::Tss: h = hash_combine(h, std::get<std::shared_ptr<const Tss>>(p)->hash()); break;
    case Kind::Label: h = hash_combine(h, std::get<Label>(p).atom().hash()); break;
    case Kind::Term: h = hash_combine(h, std::get<Term>(p).hash()); break;
    default: break;
    }
    for (const auto& c : children) h = hash_combine(h, c.hash());
    return std::make_shared<const Node>(Node{k, std::move(p), std::move(children), h});
  }
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

inline std::ostream& operator<<(std::ostream& os, const Expr& e) {
  os << e.str();
  return os;
}

class Process;

struct Monitor;

/// Process tree. Par and Sum are n-ary; binary constructors flatten.
class Process {
public:
  enum class Kind { Nil, Input, Output, Par, Sum, Restrict, Bang, Exec, Verify, Labels };

  static Process nil() {
    static const Process instance(make(Kind::Nil, {}, {}, {}, {}, {}));
    return instance;
  }
  /// channel(bound).body
  static Process input(Expr channel, Name bound, Process body) {
    return Process(make(Kind::Input, bound, {std::move(channel)}, {std::move(body)}, {}, {}));
  }
  static Process input(std::string_view channel, std::string_view bound, Process body) {
    return input(Expr::name(channel), Name::free(bound), std::move(body));
  }
  /// channel<payload>.cont
  static Process output(Expr channel, Expr payload, Process cont = nil()) {
    return Process(make(Kind::Output, {}, {std::move(channel), std::move(payload)}, {std::move(cont)}, {}, {}));
  }
  static Process par(std::vector<Process> ps) {
    return Process(make(Kind::Par, {}, {}, std::move(ps), {}, {}));
  }
  static Process par(Process a, Process b) { return par(std::vector<Process>{std::move(a), std::move(b)}); }
  static Process sum(std::vector<Process> ps) {
    return Process(make(Kind::Sum, {}, {}, std::move(ps), {}, {}));
  }
  static Process sum(Process a, Process b) { return sum(std::vector<Process>{std::move(a), std::move(b)}); }
  static Process restrict(Name bound, Process body) {
    return Process(make(Kind::Restrict, bound, {}, {std::move(body)}, {}, {}));
  }
  static Process restrict(std::string_view bound, Process body) {
    return restrict(Name::free(bound), std::move(body));
  }
  static Process bang(Process body) { return Process(make(Kind::Bang, {}, {}, {std::move(body)}, {}, {})); }
  static Process exec(Expr lang, Expr channel, Expr program, Trace trace = {},
                      std::vector<Monitor> monitors = {});
  static Process verify(Expr e1, Expr e2, Process then, Process otherwise) {
    return Process(make(Kind::Verify, {}, {std::move(e1), std::move(e2)},
                        {std::move(then), std::move(otherwise)}, {}, {}));
  }
  static Process labels(std::vector<Label> allowed, Expr lang, Process then, Process otherwise) {
    return Process(make(Kind::Labels, {}, {std::move(lang)}, {std::move(then), std::move(otherwise)}, {},
                        std::move(allowed)));
  }

  Kind kind() const noexcept { return node_->kind; }
  bool is_nil() const noexcept { return kind() == Kind::Nil; }
  /// Bound name of Input / Restrict.
  const Name& bound() const noexcept { return node_->name; }
  const std::vector<Expr>& exprs() const noexcept { return node_->exprs; }
  const std::vector<Process>& children() const noexcept { return node_->children; }
  const Trace& trace() const noexcept { return node_->trace; }
  const std::vector<Label>& allowed_labels() const noexcept { return node_->labels; }
  std::size_t hash() const noexcept { return node_->hash; }

  // Field views by kind.
  const Expr& channel() const { return node_->exprs.at(kind() == Kind::Exec ? 1 : 0); }
  const Expr& payload() const { return node_->exprs.at(1); }
  const Process& continuation() const { return node_->children.at(0); }
  const Expr& lang() const { return node_->exprs.at(0); }
  const Expr& program() const { return node_->exprs.at(2); }
  std::size_t monitor_count() const { return node_->children.size(); }
  const Expr& monitor_expr(std::size_t i) const { return node_->exprs.at(3 + i); }
  const Process& monitor_handler(std::size_t i) const { return node_->children.at(i); }
  std::vector<Monitor> monitors() const;
  const Expr& verify_left() const { return node_->exprs.at(0); }
  const Expr& verify_right() const { return node_->exprs.at(1); }
  const Process& then_branch() const { return node_->children.at(0); }
  const Process& else_branch() const { return node_->children.at(1); }

  /// Same node kind and payload with new expressions / children / bound name.
  Process with(std::vector<Expr> exprs, std::vector<Process> children) const {
    return Process(make(kind(), node_->name, std::move(exprs), std::move(children), node_->trace, node_->labels));
  }
  Process with(Name bound, std::vector<Expr> exprs, std::vector<Process> children) const {
    return Process(make(kind(), bound, std::move(exprs), std::move(children), node_->trace, node_->labels));
  }

  friend bool operator==(const Process& a, const Process& b) {
    if (a.node_ == b.node_) return true;
    return a.hash() == b.hash() && (a <=> b) == 0;
  }
  friend std::strong_ordering operator<=>(const Process& a, const Process& b) {
    if (a.node_ == b.node_) return std::strong_ordering::equal;
    if (auto c = static_cast<int>(a.kind()) <=> static_cast<int>(b.kind()); c != 0) return c;
    if (auto c = a.node_->name <=> b.node_->name; c != 0) return c;
    if (auto c = a.node_->exprs.size() <=> b.node_->exprs.size(); c != 0) return c;
    for (std::size_t i = 0; i < a.node_->exprs.size(); ++i) {
      if (auto c = a.node_->exprs[i] <=> b.node_->exprs[i]; c != 0) return c;
    }
    if (auto c = a.node_->children.size() <=> b.node_->children.size(); c != 0) return c;
    for (std::size_t i = 0; i < a.node_->children.size(); ++i) {
      if (auto c = a.node_->children[i] <=> b.node_->children[i]; c != 0) return c;
    }
    if (auto c = a.node_->trace <=> b.node_->trace; c != 0) return c;
    return a.node_->labels <=> b.node_->labels;
  }

  void print(std::ostream& os) const { print(os, 0); }
  std::string str() const {
    std::ostringstream os;
    print(os, 0);
    return os.str();
  }

private:
  // Print contexts: 0 top / parallel operand, 1 sum operand, 2 prefix body.
  void print(std::ostream& os, int context) const {
    switch (kind()) {
    case Kind::Nil: os << '0'; break;
    case Kind::Input:
      os << channel() << '(' << bound() << ")." ;
      continuation().print(os, 2);
      break;
    case Kind::Output:
      os << channel() << '<';
      payload().print(os);
      os << '>';
      if (!continuation().is_nil()) {
        os << '.';
        continuation().print(os, 2);
      }
      break;
    case Kind::Par:
    case Kind::Sum: {
      bool parens = kind() == Kind::Par ? context > 0 : context > 1;
      if (parens) os << '(';
      for (std::size_t i = 0; i < children().size(); ++i) {
        if (i != 0) os << (kind() == Kind::Par ? " | " : " + ");
        children()[i].print(os, kind() == Kind::Par ? 1 : 2);
      }
      if (parens) os << ')';
      break;
    }
    case Kind::Restrict:
      os << "new " << bound() << '.';
      continuation().print(os, 2);
      break;
    case Kind::Bang:
      os << '!';
      continuation().print(os, 2);
      break;
    case Kind::Exec:
      os << "exec(";
      lang().print(os, Sort::Language);
      os << ", " << channel() << ", ";
      program().print(os, Sort::Term);
      if (!trace().empty()) os << ", " << trace().str();
      os << ')';
      if (monitor_count() != 0) {
        os << " { ";
        for (std::size_t i = 0; i < monitor_count(); ++i) {
          monitor_expr(i).print(os, Sort::Regex);
          os << " => ";
          monitor_handler(i).print(os, 0);
          os << "; ";
        }
        os << '}';
      }
      break;
    case Kind::Verify:
      os << "verify(";
      verify_left().print(os, Sort::Regex);
      os << ", ";
      verify_right().print(os, Sort::Regex);
      os << ") ? ";
      then_branch().print(os, 2);
      os << " : ";
      else_branch().print(os, 2);
      break;
    case Kind::Labels:
      os << "labels(";
      for (std::size_t i = 0; i < allowed_labels().size(); ++i) {
        if (i != 0) os << ", ";
        os << allowed_labels()[i];
      }
      os << "; ";
      lang().print(os, Sort::Language);
      os << ") ? ";
      then_branch().print(os, 2);
      os << " : ";
      else_branch().print(os, 2);
      break;
    }
  }

  struct Node {
    Kind kind;
    Name name;
    std::vector<Expr> exprs;
    std::vector<Process> children;
    Trace trace;
    std::vector<Label> labels;
    std::size_t hash;
  };

  static std::shared_ptr<const Node> make(Kind k, Name name, std::vector<Expr> exprs,
                                          std::vector<Process> children, Trace trace,
                                          std::vector<Label> labels) {
    if (k == Kind::Par || k == Kind::Sum) {
      std::vector<Process> flat;
      for (auto& c : children) {
        if (c.kind() == k) {
          flat.insert(flat.end(), c.children().begin(), c.children().end());
        } else {
          flat.push_back(std::move(c));
        }
      }
      children = std::move(flat);
    }
    std::size_t h = hash_combine(static_cast<std::size_t>(k) + 101, name.hash());
    for (const auto& e : exprs) h = hash_combine(h, e.hash());
    for (const auto& c : children) h = hash_combine(h, c.hash());
    for (const auto& l : trace.labels()) h = hash_combine(h, l.atom().hash());
    for (const auto& l : labels) h = hash_combine(h, l.atom().hash());
    return std::make_shared<const Node>(
        Node{k, name, std::move(exprs), std::move(children), std::move(trace), std::move(labels), h});
  }

  explicit Process(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

inline std::ostream& operator<<(std::ostream& os, const Process& p) {
  p.print(os);
  return os;
}

/// Online monitor `expr => handler`.
struct Monitor {
  Expr expr;
  Process handler;
};

inline Process Process::exec(Expr lang, Expr channel, Expr program, Trace trace,
                             std::vector<Monitor> monitors) {
  std::vector<Expr> exprs{std::move(lang), std::move(channel), std::move(program)};
  std::vector<Process> handlers;
  for (auto& m : monitors) {
    exprs.push_back(std::move(m.expr));
    handlers.push_back(std::move(m.handler));
  }
  return Process(make(Kind::Exec, {}, std::move(exprs), std::move(handlers), std::move(trace), {}));
}

inline std::vector<Monitor> Process::monitors() const {
  std::vector<Monitor> out;
  for (std::size_t i = 0; i < monitor_count(); ++i) out.push_back({monitor_expr(i), monitor_handler(i)});
  return out;
}

/// How online monitors judge the trace after each program step.
enum class MonitorMode {
  Exact,        ///< the trace must be a member of every monitor language
  PrefixClosed  ///< the trace must extend to a member of every monitor language
};

inline const char* mode_name(MonitorMode m) { return m == MonitorMode::Exact ? "exact" : "prefix"; }

/// Unit of reduction. Equality ignores the fresh-name counter.
struct Configuration {
  Process root = Process::nil();
  std::uint64_t fresh = 0;
  MonitorMode mode = MonitorMode::Exact;

  friend bool operator==(const Configuration& a, const Configuration& b) {
    return a.mode == b.mode && a.root == b.root;
  }
  std::size_t hash() const noexcept { return hash_combine(root.hash(), static_cast<std::size_t>(mode)); }
};

// ---------------------------------------------------------------------------
// Names and substitution

inline void collect_free_names(const Process& p, std::set<Name>& out) {
  switch (p.kind()) {
  case Process::Kind::Input:
  case Process::Kind::Restrict: {
    std::set<Name> inner;
    collect_free_names(p.continuation(), inner);
    inner.erase(p.bound());
    out.insert(inner.begin(), inner.end());
    for (const auto& e : p.exprs()) e.collect_names(out);
    return;
  }
  default:
    for (const auto& e : p.exprs()) e.collect_names(out);
    for (const auto& c : p.children()) collect_free_names(c, out);
  }
}

inline std::set<Name> free_names(const Process& p) {
  std::set<Name> out;
  collect_free_names(p, out);
  return out;
}

inline bool occurs_free(const Name& n, const Process& p) {
  switch (p.kind()) {
  case Process::Kind::Input:
  case Process::Kind::Restrict:
    for (const auto& e : p.exprs()) {
      if (e.mentions(n)) return true;
    }
    return !(p.bound() == n) && occurs_free(n, p.continuation());
  default:
    for (const auto& e : p.exprs()) {
      if (e.mentions(n)) return true;
    }
    for (const auto& c : p.children()) {
      if (occurs_free(n, c)) return true;
    }
    return false;
  }
}

/// P{e/x}: replaces free occurrences of `x` by `e` in every position. Binders
/// that would capture a free name of `e` are renamed to fresh names drawn from
/// `fresh`.
inline Process substitute(const Process& p, const Expr& e, const Name& x, std::uint64_t& fresh) {
  if (!occurs_free(x, p)) return p;
  std::vector<Expr> exprs;
  exprs.reserve(p.exprs().size());
  for (const auto& ex : p.exprs()) exprs.push_back(ex.substitute(e, x));
  switch (p.kind()) {
  case Process::Kind::Input:
  case Process::Kind::Restrict: {
    if (p.bound() == x) return p.with(std::move(exprs), p.children());
    Name bound = p.bound();
    Process body = p.continuation();
    if (e.mentions(bound)) {
      Name renamed = Name::fresh(bound.stem(), fresh++);
      body = substitute(body, Expr::name(renamed), bound, fresh);
      bound = renamed;
    }
    return p.with(bound, std::move(exprs), {substitute(body, e, x, fresh)});
  }
  default: {
    std::vector<Process> children;
    children.reserve(p.children().size());
    for (const auto& c : p.children()) children.push_back(substitute(c, e, x, fresh));
    return p.with(std::move(exprs), std::move(children));
  }
  }
}

/// Process-level convenience over a configuration's fresh counter.
inline Process substitute(const Process& p, const Expr& e, const Name& x) {
  std::uint64_t fresh = 1u << 30;
  std::set<Name> names = free_names(p);
  for (const auto& n : names) {
    if (n.kind() == Name::Kind::Fresh) fresh = std::max<std::uint64_t>(fresh, n.index() + 1);
  }
  return substitute(p, e, x, fresh);
}

/// Renames free names by `map`. Callers guarantee the targets cannot be
/// captured (they are globally unique or outside every binder's range).
inline Process rename_free(const Process& p, const std::map<Name, Name>& map) {
  if (map.empty()) return p;
  std::vector<Expr> exprs;
  exprs.reserve(p.exprs().size());
  for (const auto& ex : p.exprs()) exprs.push_back(ex.rename(map));
  switch (p.kind()) {
  case Process::Kind::Input:
  case Process::Kind::Restrict: {
    auto it = map.find(p.bound());
    if (it == map.end()) return p.with(std::move(exprs), {rename_free(p.continuation(), map)});
    std::map<Name, Name> inner = map;
    inner.erase(p.bound());
    return p.with(std::move(exprs), {rename_free(p.continuation(), inner)});
  }
  default: {
    std::vector<Process> children;
    children.reserve(p.children().size());
    for (const auto& c : p.children()) children.push_back(rename_free(c, map));
    return p.with(std::move(exprs), std::move(children));
  }
  }
}

} // namespace lns

template <>
struct std::hash<lns::Process> {
  std::size_t operator()(const lns::Process& p) const noexcept { return p.hash(); }
};
template <>
struct std::hash<lns::Configuration> {
  std::size_t operator()(const lns::Configuration& c) const noexcept { return c.hash(); }
};
