#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "lns/canonical.hpp"
#include "lns/derive.hpp"
#include "lns/process.hpp"
#include "lns/regex.hpp"

namespace lns {

/// Closed set of reduction event tags.
enum class Rule : std::uint8_t {
  Comm,
  ExecStep,
  MonitorFail,
  ProgramEnd,
  VerifySuccess,
  VerifyFail,
  LabelsSuccess,
  LabelsFail,
  UnionEval,
  BangUnfold
};

inline const char* rule_tag(Rule r) {
  switch (r) {
  case Rule::Comm: return "comm";
  case Rule::ExecStep: return "exec-step";
  case Rule::MonitorFail: return "monitor-fail";
  case Rule::ProgramEnd: return "program-end";
  case Rule::VerifySuccess: return "verify-success";
  case Rule::VerifyFail: return "verify-fail";
  case Rule::LabelsSuccess: return "labels-success";
  case Rule::LabelsFail: return "labels-fail";
  case Rule::UnionEval: return "union-eval";
  case Rule::BangUnfold: return "bang-unfold";
  }
  return "?";
}

struct ReductionEvent {
  Rule rule;
  std::string detail;

  friend bool operator==(const ReductionEvent&, const ReductionEvent&) = default;
  friend auto operator<=>(const ReductionEvent& a, const ReductionEvent& b) {
    if (auto c = static_cast<int>(a.rule) <=> static_cast<int>(b.rule); c != 0) return c;
    return a.detail <=> b.detail;
  }
};

inline std::ostream& operator<<(std::ostream& os, const ReductionEvent& e) {
  return os << "rule=" << rule_tag(e.rule) << " detail=" << e.detail;
}

enum class StuckKind : std::uint8_t { TypeError, ArityClash, NotStratifiable, DerivationError, AutomatonTooLarge };

inline const char* stuck_tag(StuckKind k) {
  switch (k) {
  case StuckKind::TypeError: return "StuckTypeError";
  case StuckKind::ArityClash: return "ArityClash";
  case StuckKind::NotStratifiable: return "NotStratifiable";
  case StuckKind::DerivationError: return "DerivationError";
  case StuckKind::AutomatonTooLarge: return "AutomatonTooLarge";
  }
  return "?";
}

/// Why a redex-shaped subterm cannot fire.
struct StuckDiagnosis {
  StuckKind kind;
  std::string site;
  std::string message;

  friend bool operator==(const StuckDiagnosis&, const StuckDiagnosis&) = default;
  friend auto operator<=>(const StuckDiagnosis& a, const StuckDiagnosis& b) {
    if (auto c = static_cast<int>(a.kind) <=> static_cast<int>(b.kind); c != 0) return c;
    if (auto c = a.site <=> b.site; c != 0) return c;
    return a.message <=> b.message;
  }
};

// ---------------------------------------------------------------------------
// Language builders

/// One left-innermost evaluation step of a language builder, with the rule
/// used (union, union-ctx1, union-ctx2); nullopt when `e` is already a TSS.
/// Throws StuckTypeError for non-language sorts and ArityClash for an
/// undefined union.
inline std::optional<std::pair<Expr, std::string>> lang_step(const Expr& e) {
  switch (e.kind()) {
  case Expr::Kind::Tss: return std::nullopt;
  case Expr::Kind::Union: {
    const Expr& l = e.children()[0];
    const Expr& r = e.children()[1];
    if (l.kind() != Expr::Kind::Tss) {
      auto s = lang_step(l);
      return std::make_pair(Expr::lang_union(s->first, r), std::string("union-ctx1"));
    }
    if (r.kind() != Expr::Kind::Tss) {
      auto s = lang_step(r);
      return std::make_pair(Expr::lang_union(l, s->first), std::string("union-ctx2"));
    }
    return std::make_pair(Expr::tss(union_tss(l.as_tss(), r.as_tss())), std::string("union"));
  }
  default:
    throw StuckTypeError(std::string("expected a language, found a ") + sort_name(e.sort()) + ": " + e.str());
  }
}

/// Evaluates a language builder to a TSS.
inline Tss eval_lang(const Expr& e) {
  Expr cur = e;
  while (auto s = lang_step(cur)) cur = s->first;
  return cur.as_tss();
}

// ---------------------------------------------------------------------------
// Program execution

enum class MonitorChoice {
  All,    ///< one monitor-fail outcome per failing monitor
  Lowest, ///< only the lowest failing index
  Random  ///< one failing index drawn from the supplied generator
};

struct StepOptions {
  MonitorChoice monitor_choice = MonitorChoice::All;
  std::mt19937_64* rng = nullptr;
  DeriveOptions derive{};
  std::size_t automaton_cap = default_state_cap;
};

struct Outcome {
  ReductionEvent event;
  Process result;
};

namespace detail {

inline bool monitor_accepts(const Trace& trace, const Regex& e, MonitorMode mode) {
  return mode == MonitorMode::Exact ? member(trace, e) : prefix_feasible(trace, e);
}

inline std::vector<Outcome> step_exec(const Expr& lang, const Expr& chan, const Term& program,
                                      const Trace& trace, const std::vector<Monitor>& monitors,
                                      MonitorMode mode, const StepOptions& options) {
  std::vector<Regex> patterns;
  for (const auto& m : monitors) {
    auto r = m.expr.to_regex();
    if (!r) throw StuckTypeError("monitor is not a regular expression: " + m.expr.str());
    patterns.push_back(*r);
  }
  Deriver deriver(lang.as_tss(), options.derive);
  std::set<Transition> moves = deriver.derive_all(program);
  std::vector<Outcome> out;
  if (moves.empty()) {
    out.push_back({{Rule::ProgramEnd, "chan=" + chan.str() + " trace=" + trace.str()},
                   Process::bang(Process::output(chan, Expr::from_trace(trace)))});
    return out;
  }
  for (const auto& [label, target] : moves) {
    Trace next = append(trace, label);
    std::vector<std::size_t> failing;
    for (std::size_t i = 0; i < patterns.size(); ++i) {
      if (!monitor_accepts(next, patterns[i], mode)) failing.push_back(i);
    }
    if (failing.empty()) {
      out.push_back({{Rule::ExecStep, "label=" + label.str() + " trace=" + next.str() + " program=" + target.str()},
                     Process::exec(lang, chan, Expr::term(target), next, monitors)});
      continue;
    }
    if (options.monitor_choice == MonitorChoice::Lowest) {
      failing.resize(1);
    } else if (options.monitor_choice == MonitorChoice::Random && options.rng != nullptr) {
      std::uniform_int_distribution<std::size_t> pick(0, failing.size() - 1);
      failing = {failing[pick(*options.rng)]};
    }
    for (std::size_t i : failing) {
      out.push_back({{Rule::MonitorFail, "monitor=" + std::to_string(i + 1) + " label=" + label.str() +
                                             " trace=" + next.str()},
                     monitors[i].handler});
    }
  }
  return out;
}

} // namespace detail

/// Outcomes of one step of the program execution exec(t, x, prog, tr){monitors}:
/// program-end when the program has no transition, otherwise per derived
/// (label, target) an exec-step when every monitor accepts the extended trace,
/// else monitor-fail outcomes. Monitor expressions must be ground regexes.
inline std::vector<Outcome> step_exec(const Tss& tss, const Name& chan, const Term& program, const Trace& trace,
                                      const std::vector<Monitor>& monitors, MonitorMode mode,
                                      const StepOptions& options = {}) {
  return detail::step_exec(Expr::tss(tss), Expr::name(chan), program, trace, monitors, mode, options);
}

// ---------------------------------------------------------------------------
// Redex enumeration

struct Successor {
  ReductionEvent event;
  Configuration next;
};

struct Enabled {
  std::vector<Successor> steps;
  std::vector<StuckDiagnosis> stuck;
};

namespace detail {

class Reducer {
public:
  Reducer(std::uint64_t fresh, MonitorMode mode, const StepOptions& options)
      : fresh_(fresh), mode_(mode), options_(options) {}

  std::uint64_t fresh() const noexcept { return fresh_; }
  std::vector<StuckDiagnosis> stuck() const { return {stuck_.begin(), stuck_.end()}; }

  /// One-step reducts of `p` in isolation (context closure over | and nu).
  std::vector<Outcome> successors(const Process& p) {
    std::vector<Name> binders;
    std::vector<Process> atoms;
    collect(p, binders, atoms);
    std::vector<Outcome> out;
    auto rebuild = [&](const std::vector<Name>& extra, std::vector<Process> parts) {
      Process body = parts.empty() ? Process::nil() : parts.size() == 1 ? parts.front() : Process::par(std::move(parts));
      for (auto it = extra.rbegin(); it != extra.rend(); ++it) body = Process::restrict(*it, body);
      for (auto it = binders.rbegin(); it != binders.rend(); ++it) body = Process::restrict(*it, body);
      return body;
    };

    for (std::size_t i = 0; i < atoms.size(); ++i) {
      for (auto& [event, result] : local(atoms[i])) {
        std::vector<Process> parts = atoms;
        parts[i] = result;
        out.push_back({event, rebuild({}, std::move(parts))});
      }
    }

    // Offers of real atoms (copy 0) and of up to two unfolded copies of each bang.
    std::map<std::pair<std::size_t, int>, Unfolded> copies;
    std::vector<Offer> offers;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (atoms[i].kind() != Process::Kind::Bang) {
        offers_of(atoms[i], i, 0, 0, offers);
        continue;
      }
      for (int copy = 1; copy <= 2; ++copy) {
        Unfolded c = unfold(atoms[i]);
        for (std::size_t j = 0; j < c.atoms.size(); ++j) offers_of(c.atoms[j], i, copy, j, offers);
        copies[{i, copy}] = std::move(c);
      }
    }

    for (const auto& o : offers) {
      if (!o.output) continue;
      for (const auto& n : offers) {
        if (n.output || !(n.chan == o.chan)) continue;
        if (o.source == n.source) {
          bool cross = (o.copy == 1 && n.copy == 2) || (o.copy == 2 && n.copy == 1);
          if (!cross) continue;
        } else if (o.copy == 2 || n.copy == 2) {
          continue;
        }
        Process received = substitute(n.cont, o.payload, n.bound, fresh_);
        std::vector<Process> parts;
        std::vector<Name> extra;
        for (std::size_t k = 0; k < atoms.size(); ++k) {
          if (k != o.source && k != n.source) parts.push_back(atoms[k]);
        }
        auto contribute = [&](const Offer& side, const Process& result) {
          if (side.copy == 0) {
            parts.push_back(result);
            return;
          }
          const Unfolded& c = copies.at({side.source, side.copy});
          extra.insert(extra.end(), c.binders.begin(), c.binders.end());
          for (std::size_t j = 0; j < c.atoms.size(); ++j) {
            parts.push_back(j == side.copy_atom ? result : c.atoms[j]);
          }
        };
        contribute(o, o.cont);
        contribute(n, received);
        if (o.copy != 0 || n.copy != 0) {
          std::size_t bang = o.copy != 0 ? o.source : n.source;
          parts.push_back(atoms[bang]);
          if (o.copy != 0 && n.copy != 0 && o.source != n.source) parts.push_back(atoms[n.source]);
        }
        out.push_back({{Rule::Comm, "chan=" + o.chan.str() + " payload=" + o.payload.str()},
                       rebuild(extra, std::move(parts))});
      }
    }
    return out;
  }

private:
  struct Offer {
    bool output = false;
    Name chan;
    Expr payload = Expr::epsilon();
    Name bound;
    Process cont = Process::nil();
    std::size_t source = 0;
    int copy = 0;
    std::size_t copy_atom = 0;
  };

  static void collect(const Process& p, std::vector<Name>& binders, std::vector<Process>& atoms) {
    switch (p.kind()) {
    case Process::Kind::Nil: return;
    case Process::Kind::Par:
      for (const auto& c : p.children()) collect(c, binders, atoms);
      return;
    case Process::Kind::Restrict:
      binders.push_back(p.bound());
      collect(p.continuation(), binders, atoms);
      return;
    default: atoms.push_back(p);
    }
  }

  /// A copy of a bang body whose top-level restrictions get fresh names so
  /// they can be extruded next to the bang.
  struct Unfolded {
    std::vector<Name> binders;
    std::vector<Process> atoms;
  };
  Unfolded unfold(const Process& bang) {
    std::vector<Name> zs;
    std::vector<Process> atoms;
    collect(bang.continuation(), zs, atoms);
    std::map<Name, Name> map;
    Unfolded u;
    for (const auto& z : zs) {
      Name f = Name::fresh(z.stem(), fresh_++);
      map[z] = f;
      u.binders.push_back(f);
    }
    for (const auto& a : atoms) u.atoms.push_back(rename_free(a, map));
    return u;
  }

  void offers_of(const Process& a, std::size_t source, int copy, std::size_t copy_atom, std::vector<Offer>& out) {
    auto prefix = [&](const Process& p) {
      if (p.kind() != Process::Kind::Input && p.kind() != Process::Kind::Output) return;
      if (p.channel().kind() != Expr::Kind::Name) {
        diagnose(StuckKind::TypeError, p,
                 std::string("channel position holds a ") + sort_name(p.channel().sort()) + ": " + p.channel().str());
        return;
      }
      Offer o;
      o.output = p.kind() == Process::Kind::Output;
      o.chan = p.channel().as_name();
      if (o.output) o.payload = p.payload();
      else o.bound = p.bound();
      o.cont = p.continuation();
      o.source = source;
      o.copy = copy;
      o.copy_atom = copy_atom;
      out.push_back(std::move(o));
    };
    if (a.kind() == Process::Kind::Sum) {
      for (const auto& s : a.children()) prefix(s);
    } else {
      prefix(a);
    }
  }

  std::vector<Outcome> local(const Process& a) {
    switch (a.kind()) {
    case Process::Kind::Sum: {
      std::vector<Outcome> out;
      for (const auto& s : a.children()) {
        for (auto& o : successors(s)) out.push_back(std::move(o));
      }
      return out;
    }
    case Process::Kind::Bang: {
      std::vector<Outcome> out;
      for (auto& [event, result] : successors(a.continuation())) {
        out.push_back({event, Process::par(result, a)});
      }
      return out;
    }
    case Process::Kind::Exec: return exec(a);
    case Process::Kind::Verify: return verify(a);
    case Process::Kind::Labels: return labels(a);
    default: return {};
    }
  }

  /// exec-ctx / labels-ctx: one language-builder step in place.
  std::optional<std::vector<Outcome>> lang_position(const Process& a, const char* context) {
    const Expr& lang = a.lang();
    if (lang.kind() == Expr::Kind::Tss) return std::nullopt;
    try {
      auto [next, rule] = *lang_step(lang);
      std::vector<Expr> exprs = a.exprs();
      exprs[0] = next;
      return std::vector<Outcome>{{{Rule::UnionEval, "rule=" + rule + " ctx=" + context}, a.with(exprs, a.children())}};
    } catch (const ArityClash& e) {
      diagnose(StuckKind::ArityClash, a, e.what());
    } catch (const StuckTypeError& e) {
      diagnose(StuckKind::TypeError, a, e.what());
    }
    return std::vector<Outcome>{};
  }

  std::vector<Outcome> exec(const Process& a) {
    if (auto step = lang_position(a, "exec-ctx")) return *step;
    if (a.channel().kind() != Expr::Kind::Name) {
      diagnose(StuckKind::TypeError, a,
               std::string("exec result channel holds a ") + sort_name(a.channel().sort()) + ": " + a.channel().str());
      return {};
    }
    if (a.program().kind() != Expr::Kind::Term) {
      diagnose(StuckKind::TypeError, a,
               std::string("exec program position holds a ") + sort_name(a.program().sort()) + ": " + a.program().str());
      return {};
    }
    const Tss& tss = a.lang().as_tss();
    const Term& program = a.program().as_term();
    if (!well_formed(program, tss.signature())) {
      diagnose(StuckKind::TypeError, a, "program " + program.str() + " is not a term of the language signature");
      return {};
    }
    for (std::size_t i = 0; i < a.monitor_count(); ++i) {
      if (!a.monitor_expr(i).to_regex()) {
        diagnose(StuckKind::TypeError, a,
                 "monitor " + std::to_string(i + 1) + " holds a " + sort_name(a.monitor_expr(i).sort()) + ": " +
                     a.monitor_expr(i).str());
        return {};
      }
    }
    try {
      return detail::step_exec(a.lang(), a.channel(), program, a.trace(), a.monitors(), mode_, options_);
    } catch (const NotStratifiable& e) {
      diagnose(StuckKind::NotStratifiable, a, e.what());
    } catch (const DerivationError& e) {
      diagnose(StuckKind::DerivationError, a, e.what());
    }
    return {};
  }

  std::vector<Outcome> verify(const Process& a) {
    auto r1 = a.verify_left().to_regex();
    auto r2 = a.verify_right().to_regex();
    for (const Expr* e : {&a.verify_left(), &a.verify_right()}) {
      if (!e->to_regex()) {
        diagnose(StuckKind::TypeError, a,
                 std::string("verify expects regular expressions, found a ") + sort_name(e->sort()) + ": " + e->str());
        return {};
      }
    }
    try {
      InclusionResult r = include(*r1, *r2, {}, options_.automaton_cap);
      std::string detail = r1->str() + " <= " + r2->str();
      if (r.included) return {{{Rule::VerifySuccess, detail}, a.then_branch()}};
      return {{{Rule::VerifyFail, detail + " witness=" + r.witness->str()}, a.else_branch()}};
    } catch (const AutomatonTooLarge& e) {
      diagnose(StuckKind::AutomatonTooLarge, a, e.what());
    }
    return {};
  }

  std::vector<Outcome> labels(const Process& a) {
    if (auto step = lang_position(a, "labels-ctx")) return *step;
    std::set<Label> allowed(a.allowed_labels().begin(), a.allowed_labels().end());
    std::vector<std::string> outside;
    for (const auto& l : a.lang().as_tss().labels()) {
      if (!allowed.count(l)) outside.push_back(l.str());
    }
    if (outside.empty()) return {{{Rule::LabelsSuccess, "lang=" + a.lang().str()}, a.then_branch()}};
    std::string list;
    for (const auto& l : outside) list += (list.empty() ? "" : ",") + l;
    return {{{Rule::LabelsFail, "lang=" + a.lang().str() + " outside=" + list}, a.else_branch()}};
  }

  void diagnose(StuckKind kind, const Process& site, std::string message) {
    std::string s = site.str();
    if (s.size() > 160) s = s.substr(0, 157) + "...";
    stuck_.insert({kind, std::move(s), std::move(message)});
  }

  std::uint64_t fresh_;
  MonitorMode mode_;
  StepOptions options_;
  std::set<StuckDiagnosis> stuck_;
};

} // namespace detail

/// Every one-step successor of a configuration, each canonicalized, plus
/// diagnoses for redexes that cannot fire. Successors are deduplicated.
inline Enabled enabled(const Configuration& c, const StepOptions& options = {}) {
  detail::Reducer reducer(c.fresh, c.mode, options);
  auto outcomes = reducer.successors(c.root);
  Enabled out;
  std::set<std::pair<ReductionEvent, Process>> seen;
  for (auto& [event, result] : outcomes) {
    Process canon = canonicalize(result);
    if (!seen.emplace(event, canon).second) continue;
    out.steps.push_back({std::move(event), Configuration{canon, reducer.fresh(), c.mode}});
  }
  out.stuck = reducer.stuck();
  return out;
}

// ---------------------------------------------------------------------------
// Scheduler

enum class Halt { Quiescent, StepLimit };

struct RunOptions {
  std::uint64_t seed = 0;
  std::size_t max_steps = 1000;
  MonitorChoice monitor_choice = MonitorChoice::Lowest;
  DeriveOptions derive{};
};

struct LogEntry {
  std::size_t step;
  ReductionEvent event;
};

struct RunResult {
  Configuration final;
  std::vector<LogEntry> events;
  std::vector<StuckDiagnosis> stuck;
  Halt halt = Halt::Quiescent;

  /// `step=<n> rule=<tag> detail=<payload>` per event, then stuck diagnoses
  /// and the halt reason.
  std::vector<std::string> lines() const {
    std::vector<std::string> out;
    for (const auto& e : events) {
      out.push_back("step=" + std::to_string(e.step) + " rule=" + rule_tag(e.event.rule) + " detail=" + e.event.detail);
    }
    std::size_t last = events.size();
    for (const auto& s : stuck) {
      out.push_back("step=" + std::to_string(last) + " stuck=" + stuck_tag(s.kind) + " detail=" + s.message +
                    " at " + s.site);
    }
    out.push_back("step=" + std::to_string(last) + " halt=" + (halt == Halt::Quiescent ? "quiescent" : "step-limit"));
    return out;
  }

  bool has(Rule r) const {
    return std::any_of(events.begin(), events.end(), [&](const LogEntry& e) { return e.event.rule == r; });
  }
};

/// Picks uniformly among enabled successors with a seeded generator until
/// quiescence or the step limit.
inline RunResult run(const Configuration& start, const RunOptions& options = {}) {
  std::mt19937_64 rng(options.seed);
  StepOptions step{options.monitor_choice, &rng, options.derive};
  RunResult result;
  result.final = canonicalize(start);
  for (std::size_t n = 1;; ++n) {
    Enabled e = enabled(result.final, step);
    if (e.steps.empty()) {
      result.stuck = std::move(e.stuck);
      result.halt = Halt::Quiescent;
      return result;
    }
    if (n > options.max_steps) {
      result.stuck = std::move(e.stuck);
      result.halt = Halt::StepLimit;
      return result;
    }
    std::uniform_int_distribution<std::size_t> pick(0, e.steps.size() - 1);
    Successor chosen = std::move(e.steps[pick(rng)]);
    result.events.push_back({n, std::move(chosen.event)});
    result.final = std::move(chosen.next);
  }
}

// ---------------------------------------------------------------------------
// Explorer

struct ExploreOptions {
  std::size_t max_depth = 30;
  std::size_t max_nodes = 10000;
  DeriveOptions derive{};
};

struct ExplorationGraph {
  struct Edge {
    std::size_t from;
    std::size_t to;
    ReductionEvent event;
  };
  std::vector<Configuration> nodes;
  std::vector<std::size_t> depth;
  std::vector<Edge> edges;
  std::map<std::size_t, std::vector<StuckDiagnosis>> stuck;
  bool truncated = false;
  std::set<std::string> reasons; ///< subset of {depth, node-cap, derivation-error}

  std::vector<std::size_t> successors_of(std::size_t node) const {
    std::vector<std::size_t> out;
    for (const auto& e : edges) {
      if (e.from == node) out.push_back(e.to);
    }
    return out;
  }

  /// Line-oriented edge list: `<from> -> <to> rule=<tag> detail=<payload>`.
  std::string edge_list() const {
    std::ostringstream os;
    for (const auto& e : edges) os << e.from << " -> " << e.to << ' ' << e.event << '\n';
    return os.str();
  }

  std::string dot() const {
    auto escape = [](const std::string& s) {
      std::string out;
      for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
      }
      return out;
    };
    std::ostringstream os;
    os << "digraph lns {\n  node [shape=box, fontname=monospace];\n";
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      os << "  n" << i << " [label=\"" << i << ": " << escape(nodes[i].root.str()) << '"';
      if (stuck.count(i)) os << ", color=red";
      os << "];\n";
    }
    for (const auto& e : edges) {
      os << "  n" << e.from << " -> n" << e.to << " [label=\"" << rule_tag(e.event.rule) << ' '
         << escape(e.event.detail) << "\"];\n";
    }
    os << "}\n";
    return os.str();
  }
};

/// Breadth-first exploration of all reductions, deduplicating nodes by
/// canonical form. Every failing monitor yields its own branch.
inline ExplorationGraph explore(const Configuration& start, const ExploreOptions& options = {}) {
  ExplorationGraph g;
  std::unordered_map<Configuration, std::size_t> index;
  Configuration root = canonicalize(start);
  index.emplace(root, 0);
  g.nodes.push_back(root);
  g.depth.push_back(0);
  StepOptions step{MonitorChoice::All, nullptr, options.derive};
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    Configuration current = g.nodes[i];
    Enabled e = enabled(current, step);
    if (!e.stuck.empty()) {
      for (const auto& s : e.stuck) {
        if (s.kind == StuckKind::DerivationError) {
          g.truncated = true;
          g.reasons.insert("derivation-error");
        }
      }
      g.stuck[i] = std::move(e.stuck);
    }
    if (e.steps.empty()) continue;
    if (g.depth[i] >= options.max_depth) {
      g.truncated = true;
      g.reasons.insert("depth");
      continue;
    }
    for (auto& s : e.steps) {
      auto it = index.find(s.next);
      if (it == index.end()) {
        if (g.nodes.size() >= options.max_nodes) {
          g.truncated = true;
          g.reasons.insert("node-cap");
          continue;
        }
        it = index.emplace(s.next, g.nodes.size()).first;
        g.nodes.push_back(s.next);
        g.depth.push_back(g.depth[i] + 1);
      }
      g.edges.push_back({i, it->second, std::move(s.event)});
    }
  }
  return g;
}

} // namespace lns
