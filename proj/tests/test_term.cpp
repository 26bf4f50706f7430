#include <catch_amalgamated.hpp>

#include "lns/lns.hpp"

using lns::Signature;
using lns::Symbol;
using lns::Term;

namespace {

Signature ccs_signature() {
  return Signature{{Symbol("nil"), 0}, {Symbol("a"), 1}, {Symbol("co_a"), 1},
                   {Symbol("b"), 1},   {Symbol("co_b"), 1}, {Symbol("par"), 2}};
}

Term nil() { return Term::apply("nil"); }
Term a(Term t) { return Term::apply("a", {std::move(t)}); }
Term par(Term l, Term r) { return Term::apply("par", {std::move(l), std::move(r)}); }
Term var(const char* v) { return Term::variable(v); }

} // namespace

TEST_CASE("well_formed checks arities against the signature", "[term]") {
  Signature sig = ccs_signature();
  CHECK(lns::well_formed(nil(), sig));
  CHECK(lns::well_formed(var("x"), sig));
  CHECK(lns::well_formed(var("x"), Signature{}));
  CHECK(lns::well_formed(par(a(nil()), var("q")), sig));
  CHECK_FALSE(lns::well_formed(Term::apply("par", {nil()}), sig));
  CHECK_FALSE(lns::well_formed(Term::apply("nil", {nil()}), sig));
  CHECK_FALSE(lns::well_formed(Term::apply("zero"), sig));
  CHECK_FALSE(lns::well_formed(a(Term::apply("par", {nil()})), sig));
}

TEST_CASE("union_signatures merges compatible maps", "[term]") {
  Signature ccs = ccs_signature();
  Signature idle{{Symbol("nil"), 0}, {Symbol("a"), 1}, {Symbol("delay"), 1}};

  SECTION("empty signature is a two-sided identity") {
    CHECK(lns::union_signatures(Signature{}, ccs) == ccs);
    CHECK(lns::union_signatures(ccs, Signature{}) == ccs);
    CHECK(lns::union_signatures(Signature{}, Signature{}).empty());
  }
  SECTION("merged map holds every symbol of both sides") {
    Signature u = lns::union_signatures(ccs, idle);
    CHECK(u.size() == 7);
    CHECK(u.arity(Symbol("delay")) == std::optional<std::size_t>(1));
    CHECK(u.arity(Symbol("par")) == std::optional<std::size_t>(2));
    CHECK(u == lns::union_signatures(idle, ccs));
  }
  SECTION("associative when defined") {
    Signature third{{Symbol("tick"), 0}};
    CHECK(lns::union_signatures(lns::union_signatures(ccs, idle), third) ==
          lns::union_signatures(ccs, lns::union_signatures(idle, third)));
  }
  SECTION("arity clash is reported with both arities") {
    Signature f1{{Symbol("f"), 1}};
    Signature f2{{Symbol("f"), 2}};
    CHECK_THROWS_AS(lns::union_signatures(f1, f2), lns::ArityClash);
    try {
      (void)lns::union_signatures(f1, f2);
    } catch (const lns::ArityClash& e) {
      CHECK(e.symbol() == "f");
      CHECK(e.left_arity() == 1);
      CHECK(e.right_arity() == 2);
    }
  }
  SECTION("well-formedness survives a defined union") {
    Term t = par(a(nil()), nil());
    REQUIRE(lns::well_formed(t, ccs));
    CHECK(lns::well_formed(t, lns::union_signatures(ccs, idle)));
  }
}

TEST_CASE("substitute_term replaces bound variables only", "[term]") {
  CHECK(lns::substitute_term(var("p"), {{lns::Variable("p"), nil()}}) == nil());
  CHECK(lns::substitute_term(par(var("p"), var("q")), {{lns::Variable("p"), a(nil())}}) ==
        par(a(nil()), var("q")));
  CHECK(lns::substitute_term(a(var("p")), {{lns::Variable("p"), par(nil(), nil())}}) == a(par(nil(), nil())));
  Term t = par(a(var("p")), var("q"));
  CHECK(lns::substitute_term(t, {}) == t);
}

TEST_CASE("match_term binds pattern variables consistently", "[term]") {
  lns::Binding b;
  REQUIRE(lns::match_term(par(var("p"), var("q")), par(a(nil()), nil()), b));
  CHECK(b.at(lns::Variable("p")) == a(nil()));
  CHECK(b.at(lns::Variable("q")) == nil());
  lns::Binding c;
  CHECK_FALSE(lns::match_term(a(var("p")), nil(), c));
}

TEST_CASE("terms print, compare and report groundness", "[term]") {
  Term t = par(a(nil()), var("q"));
  CHECK(t.str() == "par(a(nil),q)");
  CHECK_FALSE(t.is_ground());
  CHECK(par(a(nil()), nil()).is_ground());
  CHECK(t == par(a(nil()), var("q")));
  CHECK(t.hash() == par(a(nil()), var("q")).hash());
  CHECK(nil().depth() == 1);
  CHECK(t.depth() == 3);
}
