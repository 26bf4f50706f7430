#pragma once

#include <cctype>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lns/process.hpp"
#include "lns/reducer.hpp"
#include "lns/regex.hpp"
#include "lns/tss.hpp"

namespace lns {

/// A named TSS definition: either a block or a union of earlier definitions.
struct TssDef {
  std::string name;
  std::shared_ptr<const Tss> value;
  /// Rule declarations written in the block (a schema counts once).
  std::size_t declared_rules = 0;
  /// Operand names when defined as `A union B ...`.
  std::vector<std::string> union_of;
};

/// A parsed and validated system file.
struct SystemFile {
  std::vector<TssDef> tss;
  std::vector<std::pair<std::string, Regex>> regexes;
  std::vector<std::pair<std::string, std::vector<Label>>> labelsets;
  std::vector<std::pair<std::string, Process>> procs;
  std::string entry;
  MonitorMode mode = MonitorMode::Exact;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_steps;

  const TssDef* find_tss(std::string_view name) const {
    for (const auto& t : tss) {
      if (t.name == name) return &t;
    }
    return nullptr;
  }
  const Regex* find_regex(std::string_view name) const {
    for (const auto& [n, r] : regexes) {
      if (n == name) return &r;
    }
    return nullptr;
  }
  const Process* find_proc(std::string_view name) const {
    for (const auto& [n, p] : procs) {
      if (n == name) return &p;
    }
    return nullptr;
  }

  Process entry_process() const {
    const Process* p = find_proc(entry);
    if (p == nullptr) throw Error("entry '" + entry + "' is not a defined process");
    return *p;
  }

  Configuration configuration() const { return Configuration{entry_process(), 0, mode}; }

  /// Structural equality of all definitions and options.
  friend bool operator==(const SystemFile& a, const SystemFile& b) {
    if (a.tss.size() != b.tss.size()) return false;
    for (std::size_t i = 0; i < a.tss.size(); ++i) {
      if (a.tss[i].name != b.tss[i].name || !(*a.tss[i].value == *b.tss[i].value)) return false;
    }
    return a.regexes == b.regexes && a.labelsets == b.labelsets && a.procs == b.procs && a.entry == b.entry &&
           a.mode == b.mode && a.seed == b.seed && a.max_steps == b.max_steps;
  }
};

namespace detail {

struct Token {
  enum class Kind { Ident, Punct, String, End };
  Kind kind;
  std::string text;
  std::size_t line;
  std::size_t column;

  bool is(std::string_view p) const { return kind != Kind::End && kind != Kind::String && text == p; }
};

inline std::vector<Token> tokenize(std::string_view src) {
  static const char* const puncts[] = {"==>", "---", "-/>", "->", "=>", "%e", "-", "(", ")", "<", ">", "{", "}", ",",
                                       ";",   ":",   ".",   "|",  "+",  "*",  "!", "?", "=", "/", "[", "]"};
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.substr(i, 2) == "//") {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (src.substr(i, 2) == "/*") {
      std::size_t l = line, cl = col;
      advance(2);
      while (i < src.size() && src.substr(i, 2) != "*/") advance(1);
      if (i >= src.size()) throw ParseError("unterminated comment", l, cl);
      advance(2);
      continue;
    }
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = i, l = line, cl = col;
      while (i < src.size() && (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) advance(1);
      out.push_back({Token::Kind::Ident, std::string(src.substr(start, i - start)), l, cl});
      continue;
    }
    if (c == '"') {
      std::size_t l = line, cl = col;
      advance(1);
      std::string text;
      while (i < src.size() && src[i] != '"') {
        text += src[i];
        advance(1);
      }
      if (i >= src.size()) throw ParseError("unterminated string", l, cl);
      advance(1);
      out.push_back({Token::Kind::String, text, l, cl});
      continue;
    }
    bool matched = false;
    for (const char* p : puncts) {
      std::string_view pv(p);
      if (src.substr(i, pv.size()) == pv) {
        out.push_back({Token::Kind::Punct, std::string(pv), line, col});
        advance(pv.size());
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", line, col);
  }
  out.push_back({Token::Kind::End, "<end of input>", line, col});
  return out;
}

class SystemReader {
public:
  explicit SystemReader(std::string_view text) : tokens_(tokenize(text)) {}

  SystemFile read() {
    while (!at_end()) {
      const Token& t = peek();
      if (t.is("tss")) tss_definition();
      else if (t.is("regex")) regex_definition();
      else if (t.is("labelset")) labelset_definition();
      else if (t.is("proc")) proc_definition();
      else if (t.is("entry")) entry_declaration();
      else if (t.is("option")) option();
      else throw ParseError("expected a definition, found '" + t.text + "'", t.line, t.column);
    }
    if (file_.entry.empty()) {
      throw ValidationError("no entry: declare the root process with 'entry Name;'", peek().line, peek().column);
    }
    return std::move(file_);
  }

private:
  // -- token helpers -------------------------------------------------------
  const Token& peek(std::size_t k = 0) const { return tokens_[std::min(pos_ + k, tokens_.size() - 1)]; }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  const Token& next() {
    const Token& t = tokens_[pos_];
    if (t.kind != Token::Kind::End) ++pos_;
    return t;
  }
  bool accept(std::string_view p) {
    if (peek().is(p)) {
      ++pos_;
      return true;
    }
    return false;
  }
  const Token& expect(std::string_view p) {
    if (!peek().is(p)) fail_parse("expected '" + std::string(p) + "', found '" + peek().text + "'");
    return next();
  }
  const Token& ident(const char* what) {
    if (peek().kind != Token::Kind::Ident) fail_parse(std::string("expected ") + what + ", found '" + peek().text + "'");
    return next();
  }
  [[noreturn]] void fail_parse(const std::string& what) const { throw ParseError(what, peek().line, peek().column); }
  [[noreturn]] static void fail_valid(const std::string& what, const Token& at) {
    throw ValidationError(what, at.line, at.column);
  }

  void define(const Token& name) {
    static const std::set<std::string> keywords = {"tss",   "regex", "labelset", "proc",   "entry", "option",
                                                   "union", "new",   "exec",     "verify", "labels", "0"};
    if (keywords.count(name.text)) fail_valid("'" + name.text + "' is reserved", name);
    if (!defined_.insert(name.text).second) fail_valid("duplicate definition '" + name.text + "'", name);
  }

  // -- top-level definitions -----------------------------------------------
  void option() {
    expect("option");
    const Token& key = ident("an option name");
    const Token& value = ident("an option value");
    if (key.text == "mode") {
      if (value.text == "exact") file_.mode = MonitorMode::Exact;
      else if (value.text == "prefix") file_.mode = MonitorMode::PrefixClosed;
      else fail_valid("mode must be 'exact' or 'prefix'", value);
    } else if (key.text == "seed") {
      file_.seed = number(value);
    } else if (key.text == "max_steps") {
      file_.max_steps = number(value);
    } else {
      fail_valid("unknown option '" + key.text + "'", key);
    }
    expect(";");
  }

  static std::uint64_t number(const Token& t) {
    try {
      std::size_t used = 0;
      std::uint64_t v = std::stoull(t.text, &used);
      if (used == t.text.size()) return v;
    } catch (const std::exception&) {
    }
    fail_valid("expected a number, found '" + t.text + "'", t);
  }

  void entry_declaration() {
    expect("entry");
    const Token& name = ident("a process name");
    if (!file_.entry.empty()) fail_valid("entry declared twice", name);
    if (file_.find_proc(name.text) == nullptr) fail_valid("entry '" + name.text + "' is not a defined process", name);
    file_.entry = name.text;
    expect(";");
  }

  void regex_definition() {
    expect("regex");
    const Token& name = ident("a regex name");
    define(name);
    expect("=");
    const Token& at = peek();
    Expr e = regex_expr();
    auto r = e.to_regex();
    if (!r) fail_valid("regex definition must be a ground regular expression", at);
    file_.regexes.emplace_back(name.text, *r);
    expect(";");
  }

  void labelset_definition() {
    expect("labelset");
    const Token& name = ident("a labelset name");
    define(name);
    expect("=");
    std::vector<Label> labels;
    do {
      labels.emplace_back(ident("a label").text);
    } while (accept(","));
    file_.labelsets.emplace_back(name.text, std::move(labels));
    expect(";");
  }

  void proc_definition() {
    expect("proc");
    const Token& name = ident("a process name");
    define(name);
    expect("=");
    scope_.clear();
    Process p = process();
    file_.procs.emplace_back(name.text, std::move(p));
    expect(";");
  }

  // -- TSS blocks ----------------------------------------------------------
  struct RuleText {
    std::string name;
    std::vector<std::string> schema_vars;
    std::vector<std::vector<std::string>> schema_values;
    std::vector<Token> body;
    Token at;
  };

  void tss_definition() {
    expect("tss");
    const Token& name = ident("a TSS name");
    define(name);
    TssDef def;
    def.name = name.text;
    if (accept("=")) {
      const Token& first = ident("a TSS name");
      const TssDef* base = lookup_tss(first);
      def.union_of.push_back(first.text);
      Tss acc = *base->value;
      while (accept("union")) {
        const Token& operand = ident("a TSS name");
        const TssDef* other = lookup_tss(operand);
        def.union_of.push_back(operand.text);
        try {
          acc = union_tss(acc, *other->value);
        } catch (const ArityClash& e) {
          fail_valid(e.what(), operand);
        }
      }
      def.value = std::make_shared<const Tss>(acc.renamed(name.text));
      expect(";");
      file_.tss.push_back(std::move(def));
      return;
    }

    expect("{");
    Signature sig;
    std::set<Label> labels;
    std::vector<RuleText> rules;
    vars_.clear();
    while (!accept("}")) {
      const Token& kw = ident("'labels', 'ops', 'vars' or 'rule'");
      if (kw.text == "labels") {
        do {
          labels.insert(Label(ident("a label").text));
        } while (accept(","));
        expect(";");
      } else if (kw.text == "ops") {
        do {
          const Token& op = ident("an operator");
          expect("/");
          const Token& arity = ident("an arity");
          try {
            sig.declare(Symbol(op.text), number(arity));
          } catch (const ArityClash& e) {
            fail_valid(e.what(), op);
          }
        } while (accept(","));
        expect(";");
      } else if (kw.text == "vars") {
        do {
          const Token& v = ident("a variable");
          vars_.insert(v.text);
        } while (accept(","));
        expect(";");
      } else if (kw.text == "rule") {
        rules.push_back(rule_text(kw));
      } else {
        fail_valid("unknown TSS clause '" + kw.text + "'", kw);
      }
    }
    for (const auto& v : vars_) {
      if (sig.contains(Symbol(v))) fail_valid("variable '" + v + "' clashes with an operator", name);
      if (labels.count(Label(v))) fail_valid("variable '" + v + "' clashes with a label", name);
    }

    std::vector<DeductionRule> concrete;
    for (const auto& rt : rules) {
      std::vector<std::vector<std::string>> instances = rt.schema_values;
      if (rt.schema_vars.empty()) instances = {{}};
      for (const auto& values : instances) {
        std::vector<Token> body = rt.body;
        for (auto& tok : body) {
          for (std::size_t k = 0; k < rt.schema_vars.size(); ++k) {
            if (tok.kind == Token::Kind::Ident && tok.text == rt.schema_vars[k]) tok.text = values[k];
          }
        }
        concrete.push_back(rule_body(rt, body, sig, labels));
      }
    }
    try {
      def.value = std::make_shared<const Tss>(sig, labels, concrete, name.text);
    } catch (const InvalidRule& e) {
      fail_valid(e.what(), name);
    }
    def.declared_rules = rules.size();
    file_.tss.push_back(std::move(def));
  }

  const TssDef* lookup_tss(const Token& t) const {
    const TssDef* d = file_.find_tss(t.text);
    if (d == nullptr) fail_valid("unknown TSS '" + t.text + "'", t);
    return d;
  }

  /// `rule [name] [for v in a, b | for (v, w) in (a, b), (c, d)]: body;`
  RuleText rule_text(const Token& kw) {
    RuleText rt{{}, {}, {}, {}, kw};
    if (accept("[")) {
      rt.name = ident("a rule name").text;
      expect("]");
    } else if (peek().kind == Token::Kind::Ident && !peek().is("for")) {
      rt.name = next().text;
    }
    if (accept("for")) {
      if (accept("(")) {
        do {
          rt.schema_vars.push_back(ident("a schema variable").text);
        } while (accept(","));
        expect(")");
        expect("in");
        do {
          const Token& open = expect("(");
          std::vector<std::string> tuple;
          do {
            tuple.push_back(ident("a schema value").text);
          } while (accept(","));
          expect(")");
          if (tuple.size() != rt.schema_vars.size()) fail_valid("schema tuple has the wrong width", open);
          rt.schema_values.push_back(std::move(tuple));
        } while (accept(","));
      } else {
        rt.schema_vars.push_back(ident("a schema variable").text);
        expect("in");
        do {
          rt.schema_values.push_back({ident("a schema value").text});
        } while (accept(","));
      }
    }
    expect(":");
    while (!peek().is(";")) {
      if (at_end()) fail_parse("unterminated rule");
      rt.body.push_back(next());
    }
    expect(";");
    return rt;
  }

  /// premises (`==>` or `---`) conclusion, over a pre-substituted token list.
  DeductionRule rule_body(const RuleText& rt, const std::vector<Token>& body, const Signature& sig,
                          const std::set<Label>& labels) {
    std::vector<Token> saved = std::move(tokens_);
    std::size_t saved_pos = pos_;
    tokens_ = body;
    Token end = body.empty() ? rt.at : body.back();
    tokens_.push_back({Token::Kind::End, "end of rule", end.line, end.column});
    pos_ = 0;

    std::vector<Formula> formulas;
    std::size_t premise_count = 0;
    bool has_arrow = false;
    formulas.push_back(formula(sig, labels));
    while (true) {
      if (accept(",")) {
        formulas.push_back(formula(sig, labels));
      } else if (accept("==>") || accept("---")) {
        if (has_arrow) fail_parse("a rule has one conclusion");
        has_arrow = true;
        premise_count = formulas.size();
        formulas.push_back(formula(sig, labels));
      } else {
        break;
      }
    }
    if (!at_end()) fail_parse("unexpected '" + peek().text + "' in rule");
    if (!has_arrow && formulas.size() != 1) fail_valid("premises must be followed by '==>' and a conclusion", rt.at);
    if (has_arrow && formulas.size() != premise_count + 1) fail_valid("a rule has exactly one conclusion", rt.at);
    Formula conclusion = formulas.back();
    formulas.pop_back();
    if (conclusion.is_negative()) fail_valid("rule conclusion must be a positive formula", rt.at);

    tokens_ = std::move(saved);
    pos_ = saved_pos;
    return DeductionRule{std::move(formulas), std::move(conclusion), rt.name};
  }

  Formula formula(const Signature& sig, const std::set<Label>& labels) {
    Term source = rule_term(sig);
    expect("-");
    const Token& l = ident("a label");
    if (!labels.count(Label(l.text))) fail_valid("label '" + l.text + "' is not declared", l);
    if (accept("-/>")) return Formula::negative(std::move(source), Label(l.text));
    expect("->");
    Term target = rule_term(sig);
    return Formula::positive(std::move(source), Label(l.text), std::move(target));
  }

  Term rule_term(const Signature& sig) {
    const Token& head = ident("a term");
    if (vars_.count(head.text)) {
      if (peek().is("(")) fail_valid("variable '" + head.text + "' cannot be applied", head);
      return Term::variable(head.text);
    }
    auto arity = sig.arity(Symbol(head.text));
    if (!arity) fail_valid("undeclared operator '" + head.text + "'", head);
    std::vector<Term> args;
    if (accept("(")) {
      do {
        args.push_back(rule_term(sig));
      } while (accept(","));
      expect(")");
    }
    if (args.size() != *arity) {
      fail_valid("operator '" + head.text + "' has arity " + std::to_string(*arity) + ", applied to " +
                     std::to_string(args.size()),
                 head);
    }
    return Term::apply(head.text, std::move(args));
  }

  // -- processes -----------------------------------------------------------
  Process process() {
    std::vector<Process> parts{summation()};
    while (accept("|")) parts.push_back(summation());
    return parts.size() == 1 ? parts.front() : Process::par(std::move(parts));
  }

  Process summation() {
    std::vector<Process> parts{prefixed()};
    while (accept("+")) parts.push_back(prefixed());
    return parts.size() == 1 ? parts.front() : Process::sum(std::move(parts));
  }

  Process continuation() {
    if (accept(".")) return prefixed();
    return Process::nil();
  }

  Process prefixed() {
    const Token& t = peek();
    if (accept("(")) {
      Process p = process();
      expect(")");
      return p;
    }
    if (accept("!")) return Process::bang(prefixed());
    if (t.kind != Token::Kind::Ident) fail_parse("expected a process, found '" + t.text + "'");
    if (t.text == "0") {
      next();
      return Process::nil();
    }
    if (t.text == "new") {
      next();
      std::vector<Token> names;
      do {
        names.push_back(binder());
      } while (accept(","));
      expect(".");
      for (const auto& n : names) scope_.push_back(n.text);
      Process body = prefixed();
      for (std::size_t k = 0; k < names.size(); ++k) scope_.pop_back();
      for (auto it = names.rbegin(); it != names.rend(); ++it) body = Process::restrict(it->text, body);
      return body;
    }
    if (t.text == "exec" && peek(1).is("(")) return exec();
    if (t.text == "verify" && peek(1).is("(")) return verify();
    if (t.text == "labels" && peek(1).is("(")) return labels();
    if (peek(1).is("(")) return input();
    if (peek(1).is("<")) return output();
    if (const Process* p = file_.find_proc(t.text)) {
      next();
      return *p;
    }
    fail_valid("unknown process '" + t.text + "'", t);
  }

  Token binder() {
    const Token& n = ident("a name");
    if (defined_.count(n.text)) fail_valid("binder '" + n.text + "' reuses a definition name", n);
    if (n.text == "0") fail_valid("'0' cannot be a name", n);
    return n;
  }

  Expr channel() {
    const Token& c = ident("a channel");
    return resolve(c, Sort::Channel);
  }

  Process input() {
    Expr chan = channel();
    expect("(");
    std::vector<Token> params;
    if (!peek().is(")")) {
      do {
        params.push_back(binder());
      } while (accept(","));
    }
    expect(")");
    if (params.size() <= 1) {
      std::string bound = params.empty() ? "_" : params.front().text;
      scope_.push_back(bound);
      Process body = continuation();
      scope_.pop_back();
      return Process::input(chan, Name::free(bound), body);
    }
    // x(a, b).P = x(c).c(a).c(b).P with a private carrier c.
    std::string carrier = fresh_carrier();
    for (const auto& p : params) scope_.push_back(p.text);
    Process body = continuation();
    for (std::size_t k = 0; k < params.size(); ++k) scope_.pop_back();
    for (auto it = params.rbegin(); it != params.rend(); ++it) {
      body = Process::input(Expr::name(carrier), Name::free(it->text), body);
    }
    return Process::input(chan, Name::free(carrier), body);
  }

  Process output() {
    Expr chan = channel();
    expect("<");
    std::vector<Expr> args;
    if (!peek().is(">")) {
      do {
        args.push_back(transmittable(std::nullopt));
      } while (accept(","));
    }
    expect(">");
    Process cont = continuation();
    if (args.empty()) return Process::output(chan, Expr::epsilon(), cont);
    if (args.size() == 1) return Process::output(chan, args.front(), cont);
    // x<a, b>.P = new c.x<c>.c<a>.c<b>.P
    std::string carrier = fresh_carrier();
    Process body = cont;
    for (auto it = args.rbegin(); it != args.rend(); ++it) body = Process::output(Expr::name(carrier), *it, body);
    return Process::restrict(carrier, Process::output(chan, Expr::name(carrier), body));
  }

  std::string fresh_carrier() {
    std::string c;
    do {
      c = "_c" + std::to_string(++carriers_);
    } while (defined_.count(c));
    return c;
  }

  Process exec() {
    expect("exec");
    expect("(");
    Expr lang = transmittable(Sort::Language);
    expect(",");
    Expr chan = transmittable(Sort::Channel);
    expect(",");
    Expr program = transmittable(Sort::Term);
    Trace trace;
    if (accept(",")) {
      const Token& at = peek();
      auto r = regex_expr().to_regex();
      auto tr = r ? Trace::from_regex(*r) : std::nullopt;
      if (!tr) fail_valid("exec trace must be a sequence of labels", at);
      trace = *tr;
    }
    expect(")");
    std::vector<Monitor> monitors;
    if (accept("{")) {
      while (!accept("}")) {
        Expr e = transmittable(Sort::Regex);
        expect("=>");
        Process handler = process();
        expect(";");
        monitors.push_back({std::move(e), std::move(handler)});
      }
    }
    return Process::exec(std::move(lang), std::move(chan), std::move(program), std::move(trace), std::move(monitors));
  }

  Process verify() {
    expect("verify");
    expect("(");
    Expr e1 = transmittable(Sort::Regex);
    expect(",");
    Expr e2 = transmittable(Sort::Regex);
    expect(")");
    expect("?");
    Process p = prefixed();
    expect(":");
    Process q = prefixed();
    return Process::verify(std::move(e1), std::move(e2), std::move(p), std::move(q));
  }

  Process labels() {
    expect("labels");
    expect("(");
    std::vector<Label> allowed;
    if (!peek().is(";")) {
      do {
        const Token& l = ident("a label");
        bool expanded = false;
        for (const auto& [n, set] : file_.labelsets) {
          if (n == l.text) {
            allowed.insert(allowed.end(), set.begin(), set.end());
            expanded = true;
          }
        }
        if (!expanded) allowed.emplace_back(l.text);
      } while (accept(","));
    }
    expect(";");
    Expr lang = transmittable(Sort::Language);
    expect(")");
    expect("?");
    Process p = prefixed();
    expect(":");
    Process q = prefixed();
    return Process::labels(std::move(allowed), std::move(lang), std::move(p), std::move(q));
  }

  // -- transmittables ------------------------------------------------------
  bool bound(const std::string& n) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (*it == n) return true;
    }
    return false;
  }

  /// Identifier resolution: bound name, TSS definition, regex definition,
  /// then a label / symbol / free channel depending on the position's sort.
  Expr resolve(const Token& t, std::optional<Sort> sort) {
    if (bound(t.text)) return Expr::name(t.text);
    if (const TssDef* d = file_.find_tss(t.text)) return Expr::tss(d->value);
    if (const Regex* r = file_.find_regex(t.text)) return Expr::from_regex(*r);
    if (sort == Sort::Regex) return Expr::label(t.text);
    if (sort == Sort::Term) return Expr::term(Term::apply(t.text));
    if (sort == Sort::Language) fail_valid("unknown language '" + t.text + "'", t);
    if (file_.find_proc(t.text) != nullptr) fail_valid("process '" + t.text + "' used as a name", t);
    return Expr::name(t.text);
  }

  /// An expression in a position whose default sort is `sort` (nullopt: an
  /// output payload, sort inferred). `re:`, `term:`, `lang:` override.
  Expr transmittable(std::optional<Sort> sort) {
    if (peek().kind == Token::Kind::Ident && peek(1).is(":")) {
      const std::string& m = peek().text;
      if (m == "re" || m == "term" || m == "lang") {
        next();
        next();
        if (m == "re") return regex_expr();
        if (m == "term") return term_expr(true);
        return lang_expr();
      }
    }
    if (sort == Sort::Language) return lang_expr();
    if (sort == Sort::Regex) return regex_expr();
    if (sort == Sort::Term) return term_expr(false);
    if (sort == Sort::Channel) return resolve(ident("a channel"), Sort::Channel);
    return inferred();
  }

  Expr inferred() {
    int depth = 0;
    bool has_union = false, has_regex = false;
    for (std::size_t k = 0;; ++k) {
      const Token& t = peek(k);
      if (t.kind == Token::Kind::End) break;
      if (t.is("(")) ++depth;
      else if (t.is(")")) {
        if (depth == 0) break;
        --depth;
      } else if (depth == 0 && (t.is(",") || t.is(">"))) {
        break;
      }
      if (t.is("union")) has_union = true;
      if (t.is(".") || t.is("|") || t.is("*") || t.is("%e")) has_regex = true;
    }
    if (has_union) return lang_expr();
    if (has_regex || peek().is("(")) return regex_expr();
    if (peek(1).is("(")) return term_expr(true);
    return resolve(ident("an expression"), std::nullopt);
  }

  Expr lang_expr() {
    Expr e = lang_atom();
    while (accept("union")) e = Expr::lang_union(e, lang_atom());
    return e;
  }

  Expr lang_atom() {
    if (accept("(")) {
      Expr e = lang_expr();
      expect(")");
      return e;
    }
    return resolve(ident("a language"), Sort::Language);
  }

  Expr regex_expr() {
    Expr e = regex_concat();
    while (accept("|")) e = Expr::alt(e, regex_concat());
    return e;
  }

  Expr regex_concat() {
    Expr e = regex_star();
    while (accept(".")) e = Expr::concat(e, regex_star());
    return e;
  }

  Expr regex_star() {
    Expr e = regex_atom();
    while (accept("*")) e = Expr::star(e);
    return e;
  }

  Expr regex_atom() {
    if (accept("%e")) return Expr::epsilon();
    if (accept("(")) {
      Expr e = regex_expr();
      expect(")");
      return e;
    }
    return resolve(ident("a label"), Sort::Regex);
  }

  /// A ground term literal, or a bound name standing for one.
  Expr term_expr(bool literal) {
    const Token& head = ident("a term");
    if (!peek().is("(")) {
      if (!literal) return resolve(head, Sort::Term);
      if (bound(head.text)) return Expr::name(head.text);
      return Expr::term(Term::apply(head.text));
    }
    return Expr::term(ground_term(head));
  }

  Term ground_term(const Token& head) {
    if (bound(head.text)) fail_valid("name '" + head.text + "' cannot occur inside a term", head);
    std::vector<Term> args;
    if (accept("(")) {
      do {
        args.push_back(ground_term(ident("a term")));
      } while (accept(","));
      expect(")");
    }
    return Term::apply(head.text, std::move(args));
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  SystemFile file_;
  std::set<std::string> defined_;
  std::set<std::string> vars_;
  std::vector<std::string> scope_;
  std::size_t carriers_ = 0;
};

inline void print_term_vars(const DeductionRule& r, std::set<Variable>& vars) {
  auto more = r.variables();
  vars.insert(more.begin(), more.end());
}

} // namespace detail

/// Parses system-file text. Throws ParseError / ValidationError with line and column.
inline SystemFile parse_system(std::string_view text) { return detail::SystemReader(text).read(); }

/// Reads a ground term such as `par(a(nil), co_a(nil))` over `sig`.
inline Term parse_term(std::string_view text, const Signature& sig) {
  auto toks = detail::tokenize(text);
  std::size_t i = 0;
  auto fail = [&](const std::string& what) -> void {
    const auto& t = toks[std::min(i, toks.size() - 1)];
    throw ParseError(what, t.line, t.column);
  };
  std::function<Term()> term = [&]() -> Term {
    if (toks[i].kind != detail::Token::Kind::Ident) fail("expected an operator");
    const auto& head = toks[i++];
    auto arity = sig.arity(Symbol(head.text));
    if (!arity) throw ValidationError("undeclared operator '" + head.text + "'", head.line, head.column);
    std::vector<Term> args;
    if (toks[i].is("(")) {
      ++i;
      while (true) {
        args.push_back(term());
        if (toks[i].is(",")) {
          ++i;
          continue;
        }
        if (!toks[i].is(")")) fail("expected ',' or ')'");
        ++i;
        break;
      }
    }
    if (args.size() != *arity) {
      throw ValidationError("'" + head.text + "' expects " + std::to_string(*arity) + " arguments, got " +
                                std::to_string(args.size()),
                            head.line, head.column);
    }
    return Term::apply(Symbol(head.text), std::move(args));
  };
  Term t = term();
  if (toks[i].kind != detail::Token::Kind::End) fail("trailing input after term");
  return t;
}

/// Reads a regex, replacing atoms that name a `regex` definition of `f`.
inline Regex parse_regex(std::string_view text, const SystemFile& f) {
  std::function<Regex(const Regex&)> expand = [&](const Regex& r) -> Regex {
    switch (r.kind()) {
    case Regex::Kind::Atom:
      if (const Regex* def = f.find_regex(r.label().str())) return *def;
      return r;
    case Regex::Kind::Epsilon: return r;
    case Regex::Kind::Concat: return Regex::concat(expand(r.left()), expand(r.right()));
    case Regex::Kind::Alt: return Regex::alt(expand(r.left()), expand(r.right()));
    case Regex::Kind::Star: return Regex::star(expand(r.body()));
    }
    return r;
  };
  return expand(parse_regex(text));
}

inline SystemFile load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_system(buffer.str());
}

/// Pretty-prints a system file; parse_system(save(f)) == f.
inline std::string save(const SystemFile& f) {
  std::ostringstream os;
  if (f.mode == MonitorMode::PrefixClosed) os << "option mode prefix;\n";
  if (f.seed) os << "option seed " << *f.seed << ";\n";
  if (f.max_steps) os << "option max_steps " << *f.max_steps << ";\n";
  for (const auto& def : f.tss) {
    if (!def.union_of.empty()) {
      os << "tss " << def.name << " = ";
      for (std::size_t i = 0; i < def.union_of.size(); ++i) os << (i ? " union " : "") << def.union_of[i];
      os << ";\n";
      continue;
    }
    const Tss& t = *def.value;
    os << "tss " << def.name << " {\n";
    auto list = [&](const char* kw, const std::vector<std::string>& items) {
      if (items.empty()) return;
      os << "  " << kw << ' ';
      for (std::size_t i = 0; i < items.size(); ++i) os << (i ? ", " : "") << items[i];
      os << ";\n";
    };
    std::vector<std::string> labels, ops, vars;
    for (const auto& l : t.labels()) labels.push_back(l.str());
    for (const auto& [s, n] : t.signature().symbols()) ops.push_back(s.str() + "/" + std::to_string(n));
    std::set<Variable> vs;
    for (const auto& r : t.rules()) detail::print_term_vars(r, vs);
    for (const auto& v : vs) vars.push_back(v.str());
    list("labels", labels);
    list("ops", ops);
    list("vars", vars);
    for (const auto& r : t.rules()) {
      os << "  rule ";
      if (!r.name.empty()) os << '[' << r.name << "]";
      os << ": ";
      for (std::size_t i = 0; i < r.premises.size(); ++i) os << (i ? ", " : "") << r.premises[i];
      if (!r.premises.empty()) os << " ==> ";
      os << r.conclusion << ";\n";
    }
    os << "}\n";
  }
  for (const auto& [n, r] : f.regexes) os << "regex " << n << " = " << r << ";\n";
  for (const auto& [n, ls] : f.labelsets) {
    os << "labelset " << n << " = ";
    for (std::size_t i = 0; i < ls.size(); ++i) os << (i ? ", " : "") << ls[i];
    os << ";\n";
  }
  for (const auto& [n, p] : f.procs) os << "proc " << n << " = " << p << ";\n";
  if (!f.entry.empty()) os << "entry " << f.entry << ";\n";
  return os.str();
}

} // namespace lns
