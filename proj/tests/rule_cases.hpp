#pragma once

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "lns/lns.hpp"
#include "support.hpp"

namespace rules {

/// A configuration together with its complete, exact successor set.
struct Case {
  std::string name;
  lns::Configuration start;
  std::vector<std::pair<lns::Rule, lns::Process>> expected;
};

inline const std::string languages = std::string(support::partial_ccs) + R"(
tss tpaMinus {
  labels sigma;
  ops nil/0, a/1, co_a/1, b/1, co_b/1;
  vars p;
  rule [idle_nil]: nil -sigma-> nil;
  rule [idle_act] for act in a, co_a, b, co_b: act(p) -sigma-> act(p);
}
tss parallel {
  labels sigma, tau;
  ops par/2;
  vars p, p1, q, q1;
  rule [par_idle]: p -sigma-> p1, q -sigma-> q1 ==> par(p, q) -sigma-> par(p1, q1);
}
tss fileOps {
  labels open, read, write, close;
  ops done/0, open/1, read/1, write/1, close/1;
  vars p;
  rule [step] for act in open, read, write, close: act(p) -act-> p;
}
regex fileProtocol = open.(read|write)*.close;
)";

inline std::vector<Case> all() {
  using lns::Expr;
  using lns::Process;
  using lns::Rule;
  const lns::SystemFile defs = support::system(languages, "0");
  auto tss = [&](const char* n) { return *defs.find_tss(n)->value; };
  auto lang = [&](const char* n) { return Expr::tss(defs.find_tss(n)->value); };
  auto p = [&](const std::string& body) { return support::process(languages, body); };
  auto c = [&](const std::string& body) { return lns::Configuration{p(body), 0, lns::MonitorMode::Exact}; };
  const Expr nil = Expr::term(lns::Term::apply("nil"));
  const Expr r = Expr::name("r");
  const Expr open_close = Expr::from_trace(lns::Trace{"open", "close"});

  std::vector<Case> out;
  out.push_back({"comm", c("x(y).y<e> | x<z>.w<v>"), {{Rule::Comm, p("z<e> | w<v>")}}});
  out.push_back({"exec", c("exec(fileOps, r, open(done)) | r(t).log<t>"),
                 {{Rule::ExecStep, p("exec(fileOps, r, done, open) | r(t).log<t>")}}});
  out.push_back({"exec-ctx", c("exec(tpaMinus union parallel, r, nil)"),
                 {{Rule::UnionEval, Process::exec(Expr::tss(lns::union_tss(tss("tpaMinus"), tss("parallel"))), r, nil)}}});
  out.push_back({"verify-success", c("verify(open.read.close, fileProtocol*) ? ok<> : ko<>"),
                 {{Rule::VerifySuccess, p("ok<>")}}});
  out.push_back({"verify-fail", c("verify(read.close, fileProtocol*) ? ok<> : ko<>"), {{Rule::VerifyFail, p("ko<>")}}});
  out.push_back({"labels-success", c("labels(open, read, write, close; fileOps) ? ok<> : ko<>"),
                 {{Rule::LabelsSuccess, p("ok<>")}}});
  out.push_back({"labels-fail", c("labels(open, read, close; fileOps) ? ok<> : ko<>"), {{Rule::LabelsFail, p("ko<>")}}});
  out.push_back({"labels-ctx", c("labels(sigma, tau; tpaMinus union parallel) ? ok<> : ko<>"),
                 {{Rule::UnionEval, Process::labels({lns::Label("sigma"), lns::Label("tau")},
                                                    Expr::tss(lns::union_tss(tss("tpaMinus"), tss("parallel"))),
                                                    p("ok<>"), p("ko<>"))}}});
  out.push_back({"union", c("exec(partialCCS union tpaMinus, r, nil)"),
                 {{Rule::UnionEval, Process::exec(Expr::tss(lns::union_tss(tss("partialCCS"), tss("tpaMinus"))), r, nil)}}});
  out.push_back({"union-ctx1", c("exec(partialCCS union tpaMinus union parallel, r, nil)"),
                 {{Rule::UnionEval,
                   Process::exec(Expr::lang_union(Expr::tss(lns::union_tss(tss("partialCCS"), tss("tpaMinus"))),
                                                  lang("parallel")),
                                 r, nil)}}});
  out.push_back({"union-ctx2", c("exec(partialCCS union (tpaMinus union parallel), r, nil)"),
                 {{Rule::UnionEval,
                   Process::exec(Expr::lang_union(lang("partialCCS"),
                                                  Expr::tss(lns::union_tss(tss("tpaMinus"), tss("parallel")))),
                                 r, nil)}}});
  out.push_back({"program-step", c("exec(fileOps, r, close(done), open) { fileProtocol => bad<>; }"),
                 {{Rule::ExecStep, p("exec(fileOps, r, done, open.close) { fileProtocol => bad<>; }")}}});
  out.push_back({"monitor-fail", c("exec(fileOps, r, read(done)) { fileProtocol => one<>; open* => two<>; read => fine<>; }"),
                 {{Rule::MonitorFail, p("one<>")}, {Rule::MonitorFail, p("two<>")}}});
  out.push_back({"program-end", c("exec(fileOps, r, done, open.close)"),
                 {{Rule::ProgramEnd, Process::bang(Process::output(r, open_close))}}});
  out.push_back({"program-end shared by two receivers",
                 c("!r<open.close> | r(t).one<t> | r(t).two<t>"),
                 {{Rule::Comm, p("!r<open.close> | one<open.close> | r(t).two<t>")},
                  {Rule::Comm, p("!r<open.close> | r(t).one<t> | two<open.close>")}}});
  out.push_back({"congruence: parallel", c("x<z> | (w<v> | (0 | x(y).y<q>))"), {{Rule::Comm, p("w<v> | z<q>")}}});
  out.push_back({"congruence: sum", c("(x(y).y<q> + a(b).b<c>) | x<z>"), {{Rule::Comm, p("z<q>")}}});
  out.push_back({"congruence: restriction and replication", c("new k.a<k> | !a(y).y<m>"),
                 {{Rule::Comm, p("new k.k<m> | !a(y).y<m>")}}});
  return out;
}

/// Successors of the case's start, canonical, as (rule, process) pairs.
inline std::set<std::pair<lns::Rule, lns::Process>> actual(const Case& k, std::vector<lns::StuckDiagnosis>* stuck = nullptr) {
  lns::Enabled e = lns::enabled(lns::canonicalize(k.start));
  if (stuck != nullptr) *stuck = e.stuck;
  std::set<std::pair<lns::Rule, lns::Process>> out;
  for (const auto& s : e.steps) out.insert({s.event.rule, s.next.root});
  return out;
}

inline std::set<std::pair<lns::Rule, lns::Process>> expected(const Case& k) {
  std::set<std::pair<lns::Rule, lns::Process>> out;
  for (const auto& [rule, p] : k.expected) out.insert({rule, lns::canonicalize(p)});
  return out;
}

} // namespace rules
