#include <catch_amalgamated.hpp>

#include "generators.hpp"
#include "lns/lns.hpp"
#include "support.hpp"

using lns::Expr;
using lns::Name;
using lns::Process;

namespace {

Name free(const char* n) { return Name::free(n); }

std::set<Name> names(std::initializer_list<const char*> ns) {
  std::set<Name> out;
  for (const char* n : ns) out.insert(free(n));
  return out;
}

const lns::SystemFile& tpa_file() {
  static const lns::SystemFile f = support::corpus_file("tpa.lns");
  return f;
}

Expr tss_expr(const char* name) { return Expr::tss(tpa_file().find_tss(name)->value); }

} // namespace

TEST_CASE("substitution in channel positions", "[calculus]") {
  Process p = support::process("", "x(y).y<e>");
  Process q = lns::substitute(p, Expr::name("z"), free("x"));
  CHECK(q == support::process("", "z(y).y<e>"));
  CHECK(lns::substitute(p, Expr::name("w"), free("y")) == p);
}

TEST_CASE("substitution avoids capture", "[calculus]") {
  Process p = Process::restrict(free("y"), Process::output(Expr::name("x"), Expr::name("y")));
  Process q = lns::substitute(p, Expr::name("y"), free("x"));
  REQUIRE(q.kind() == Process::Kind::Restrict);
  CHECK_FALSE(q.bound() == free("y"));
  const Process& body = q.continuation();
  CHECK(body.channel() == Expr::name("y"));
  CHECK(body.payload() == Expr::name(q.bound()));
  CHECK(lns::free_names(q) == names({"y"}));
  CHECK(lns::canonicalize(q) == support::canon("", "new w.y<w>"));
}

TEST_CASE("substitution reaches language positions", "[calculus]") {
  Process p = Process::exec(Expr::lang_union(tss_expr("almostTPA"), Expr::name("x")), Expr::name("c"),
                            Expr::term(lns::Term::apply("nil")));
  Process q = lns::substitute(p, tss_expr("parallel"), free("x"));
  CHECK(q.lang() == Expr::lang_union(tss_expr("almostTPA"), tss_expr("parallel")));
  CHECK(lns::free_names(q) == names({"c"}));
}

TEST_CASE("substitution reaches regex positions", "[calculus]") {
  Process p = Process::verify(Expr::name("tr"), Expr::concat(Expr::label("sudo"), Expr::name("rexp")),
                              Process::nil(), Process::nil());
  Process q = lns::substitute(p, Expr::from_regex(lns::parse_regex("3.4")), free("rexp"));
  auto r = q.verify_right().to_regex();
  REQUIRE(r);
  CHECK(lns::Trace::from_regex(*r) == lns::Trace{"sudo", "3", "4"});
  CHECK_FALSE(q.verify_left().to_regex());
}

TEST_CASE("free names", "[calculus]") {
  CHECK(lns::free_names(Process::nil()).empty());
  CHECK(lns::free_names(support::process("", "new x.x<e>")) == names({"e"}));
  CHECK(lns::free_names(support::process("", "x(y).y<z>")) == names({"x", "z"}));
  CHECK(lns::free_names(support::process("", "!a(u).(u<b> + c<u>)")) == names({"a", "b", "c"}));
}

TEST_CASE("free names after substitution", "[calculus][property]") {
  gen::Rng rng(3);
  gen::ProcessGen g(rng);
  for (int i = 0; i < 200; ++i) {
    Process p = g.process(4);
    Name x = free(i % 2 ? "a" : "b");
    Expr e = Expr::name(i % 3 ? "c" : "v");
    std::set<Name> bound = lns::free_names(p);
    bound.erase(x);
    bound.insert(free(i % 3 ? "c" : "v"));
    for (const auto& n : lns::free_names(lns::substitute(p, e, x))) {
      INFO(p);
      CHECK(bound.count(n) == 1);
    }
    CHECK(lns::canonicalize(lns::substitute(p, Expr::name(x), x)) == lns::canonicalize(p));
  }
}

TEST_CASE("canonical forms respect congruence laws", "[calculus]") {
  SECTION("parallel unit") { CHECK(support::canon("", "a<b> | 0") == support::canon("", "a<b>")); }
  SECTION("parallel commutativity and associativity") {
    CHECK(support::canon("", "a<b> | c(x).0") == support::canon("", "c(x).0 | a<b>"));
    CHECK(support::canon("", "(a<b> | c<d>) | e<f>") == support::canon("", "a<b> | (e<f> | c<d>)"));
  }
  SECTION("sum unit, commutativity and associativity") {
    CHECK(support::canon("", "a<b> + 0") == support::canon("", "a<b>"));
    CHECK(support::canon("", "a<b> + c(x).0") == support::canon("", "c(x).0 + a<b>"));
    CHECK(support::canon("", "(a<b> + c<d>) + e<f>") == support::canon("", "a<b> + (e<f> + c<d>)"));
  }
  SECTION("restriction laws") {
    CHECK(support::canon("", "new x.0") == lns::canonicalize(Process::nil()));
    CHECK(support::canon("", "new x.new y.x<y>") == support::canon("", "new y.new x.x<y>"));
    CHECK(support::canon("", "new x.(x<a> | b<c>)") == support::canon("", "new x.x<a> | b<c>"));
    CHECK(support::canon("", "new x.x<a>") == support::canon("", "new z.z<a>"));
    CHECK_FALSE(support::canon("", "new x.(x<a> | x(y).0)") == support::canon("", "new x.x<a> | x(y).0"));
  }
  SECTION("alpha-equivalent inputs") {
    CHECK(support::canon("", "a(x).x<b>") == support::canon("", "a(y).y<b>"));
    CHECK_FALSE(support::canon("", "a(x).x<b>") == support::canon("", "a(x).b<x>"));
  }
  SECTION("replication is left folded") {
    Process c = support::canon("", "!a(x).0");
    CHECK(c.kind() == Process::Kind::Bang);
  }
}

TEST_CASE("canonicalize is idempotent", "[calculus][property]") {
  gen::Rng rng(17);
  gen::ProcessGen g(rng);
  for (int i = 0; i < 300; ++i) {
    Process p = g.process(5);
    Process c = lns::canonicalize(p);
    INFO(p);
    CHECK(lns::canonicalize(c) == c);
    CHECK(lns::free_names(c) == lns::free_names(p));
  }
}

TEST_CASE("language builders evaluate left-innermost", "[calculus]") {
  const lns::Tss& almost = tpa_file().find_tss("almostTPA")->value.operator*();
  CHECK(lns::eval_lang(tss_expr("almostTPA")) == almost);

  lns::Tss max = lns::eval_lang(Expr::lang_union(tss_expr("almostTPA"), tss_expr("parallel_max")));
  CHECK(std::any_of(max.rules().begin(), max.rules().end(),
                    [](const lns::DeductionRule& r) { return r.name == "par_max"; }));
  CHECK(max == *tpa_file().find_tss("tpa_max")->value);

  Expr nested = Expr::lang_union(Expr::lang_union(tss_expr("partialCCS"), tss_expr("tpaMinus")),
                                 Expr::lang_union(tss_expr("parallel"), tss_expr("parallel_max")));
  auto s1 = lns::lang_step(nested);
  REQUIRE(s1);
  CHECK(s1->second == "union-ctx1");
  auto s2 = lns::lang_step(s1->first);
  REQUIRE(s2);
  CHECK(s2->second == "union-ctx2");
  auto s3 = lns::lang_step(s2->first);
  REQUIRE(s3);
  CHECK(s3->second == "union");
  CHECK_FALSE(lns::lang_step(s3->first));

  // Any grouping of the same operands yields the same system.
  Expr regrouped = Expr::lang_union(tss_expr("partialCCS"),
                                    Expr::lang_union(Expr::lang_union(tss_expr("parallel_max"), tss_expr("tpaMinus")),
                                                     tss_expr("parallel")));
  CHECK(lns::eval_lang(nested) == lns::eval_lang(regrouped));
}

TEST_CASE("language builders reject other sorts and clashes", "[calculus]") {
  CHECK_THROWS_AS(lns::eval_lang(Expr::from_regex(lns::parse_regex("a.b"))), lns::StuckTypeError);
  CHECK_THROWS_AS(lns::eval_lang(Expr::name("x")), lns::StuckTypeError);
  CHECK_THROWS_AS(lns::eval_lang(Expr::term(lns::Term::apply("nil"))), lns::StuckTypeError);

  lns::Tss f1(lns::Signature{{lns::Symbol("f"), 1}}, {}, {}, "f1");
  lns::Tss f2(lns::Signature{{lns::Symbol("f"), 2}}, {}, {}, "f2");
  CHECK_THROWS_AS(lns::eval_lang(Expr::lang_union(Expr::tss(f1), Expr::tss(f2))), lns::ArityClash);
}

TEST_CASE("processes print in the concrete syntax", "[calculus]") {
  const char* sources[] = {
      "a(x).x<b>",
      "new x.(x<a> | x(y).y<c>)",
      "!a(x).0 + b<c>",
      "verify(open.close, (open|close)*) ? ok<> : ko<>",
  };
  for (const char* s : sources) {
    Process p = support::process("", s);
    INFO(s << " printed as " << p);
    CHECK(support::process("", p.str()) == p);
  }
}
