#include <catch_amalgamated.hpp>

#include "generators.hpp"
#include "lns/lns.hpp"
#include "oracles.hpp"

using lns::Regex;
using lns::Trace;

namespace {

const Regex file_protocol = lns::parse_regex("open.(read|write)*.close");
const Regex fig4_password = lns::parse_regex(
    "((open|read|write|close)*.(sudo.3.4.5.6.delete).(open|read|write|close)*)*");

std::vector<std::string> alphabet_of(const Regex& a, const Regex& b) {
  std::set<lns::Label> ls = a.labels();
  for (const auto& l : b.labels()) ls.insert(l);
  std::vector<std::string> out;
  for (const auto& l : ls) out.push_back(l.str());
  return out;
}

} // namespace

TEST_CASE("regex text syntax", "[regex]") {
  CHECK(lns::parse_regex("%e") == Regex::epsilon());
  CHECK(lns::parse_regex("a.b|c*") ==
        Regex::alt(Regex::concat(Regex::atom("a"), Regex::atom("b")), Regex::star(Regex::atom("c"))));
  CHECK(lns::parse_regex("(a|b)*").str() == "(a|b)*");
  CHECK(file_protocol.str() == "open.(read|write)*.close");
  CHECK(lns::parse_regex(file_protocol.str()) == file_protocol);
  CHECK_THROWS(lns::parse_regex("a.(b"));
  CHECK_THROWS(lns::parse_regex("a..b"));
}

TEST_CASE("compiled automata accept exactly the language", "[regex][oracle]") {
  SECTION("epsilon") {
    lns::Automaton a = lns::compile(Regex::epsilon());
    CHECK(a.accepts(Trace{}));
    CHECK_FALSE(a.accepts(Trace{"a"}));
  }
  SECTION("star base cases") {
    lns::Automaton a = lns::compile(lns::parse_regex("a*"));
    CHECK(a.accepts(Trace{}));
    CHECK(a.accepts(Trace{"a"}));
    CHECK(a.accepts(Trace{"a", "a"}));
  }
  SECTION("file protocol against enumeration to length 6") {
    lns::Automaton a = lns::compile(file_protocol);
    CHECK(a.accepts(Trace{"open", "read", "read", "close"}));
    for (const auto& w : oracle::words({"open", "read", "write", "close"}, 6)) {
      std::vector<lns::Label> labels(w.begin(), w.end());
      INFO(Trace(labels).str());
      CHECK(a.accepts(Trace(labels)) == oracle::matches(file_protocol, w));
    }
  }
}

TEST_CASE("member", "[regex]") {
  CHECK(lns::member(Trace{}, lns::parse_regex("(open|read|write|close)*")));
  CHECK(lns::member(Trace{"open", "read", "close"}, file_protocol));
  CHECK_FALSE(lns::member(Trace{"write", "close"}, file_protocol));
  CHECK_FALSE(lns::member(Trace{"open", "read"}, file_protocol));
}

TEST_CASE("include", "[regex]") {
  Regex star = Regex::star(file_protocol);
  CHECK(lns::include(file_protocol, file_protocol).included);
  CHECK(lns::include(file_protocol, Regex::alt(file_protocol, lns::parse_regex("x.y"))).included);
  CHECK(lns::include(lns::parse_regex("open.close"), star).included);
  CHECK(lns::include(file_protocol, star).included);

  lns::InclusionResult r = lns::include(lns::parse_regex("open.read"), file_protocol);
  CHECK_FALSE(r.included);
  REQUIRE(r.witness);
  CHECK(*r.witness == Trace{"open", "read"});

  lns::InclusionResult eps = lns::include(star, file_protocol);
  CHECK_FALSE(eps.included);
  REQUIRE(eps.witness);
  CHECK(eps.witness->empty());
  CHECK(eps.witness->str() == "%e");
}

TEST_CASE("include counts letters the right side never mentions", "[regex]") {
  // shell is absent from the right alphabet; complementation must still see it.
  lns::InclusionResult r = lns::include(lns::parse_regex("open.shell.close"), Regex::star(file_protocol));
  CHECK_FALSE(r.included);
  REQUIRE(r.witness);
  CHECK(*r.witness == Trace{"open", "shell", "close"});
  CHECK(lns::include(lns::parse_regex("a*"), lns::parse_regex("a*"), {lns::Label("b")}).included);
}

TEST_CASE("include witnesses are shortest counterexamples", "[regex][oracle]") {
  gen::Rng rng(11);
  const std::vector<std::string> sigma{"a", "b", "c"};
  for (int i = 0; i < 150; ++i) {
    Regex l = gen::regex(rng, sigma, 1 + rng.below(10));
    Regex r = gen::regex(rng, sigma, 1 + rng.below(10));
    INFO(l.str() << " <= " << r.str());
    lns::InclusionResult got = lns::include(l, r);
    oracle::Inclusion want = oracle::derivative_inclusion(l, r);
    REQUIRE(got.included == want.included);
    if (!got.included) {
      REQUIRE(got.witness);
      CHECK(oracle::matches(l, oracle::word_of(*got.witness)));
      CHECK_FALSE(oracle::matches(r, oracle::word_of(*got.witness)));
      CHECK(got.witness->length() == want.shortest->size());
    }
    if (auto cex = oracle::enumerate_counterexample(l, r, alphabet_of(l, r), 5)) CHECK_FALSE(got.included);
  }
}

TEST_CASE("prefix_feasible", "[regex]") {
  CHECK(lns::prefix_feasible(Trace{}, file_protocol));
  CHECK(lns::prefix_feasible(Trace{"sudo", "3"}, fig4_password));
  CHECK_FALSE(lns::prefix_feasible(Trace{"sudo", "7"}, fig4_password));
  CHECK(lns::prefix_feasible(Trace{"sudo", "3", "4", "5", "6", "delete", "open"}, fig4_password));
  CHECK_FALSE(lns::prefix_feasible(Trace{"read"}, file_protocol));
  CHECK(lns::prefix_feasible(Trace{"open", "write"}, file_protocol));
}

TEST_CASE("prefix_feasible agrees with the extension oracle and never heals", "[regex][oracle]") {
  gen::Rng rng(23);
  const std::vector<std::string> sigma{"a", "b", "c"};
  for (int i = 0; i < 200; ++i) {
    Regex e = gen::regex(rng, sigma, 1 + rng.below(10));
    Trace t = gen::trace(rng, sigma, 5);
    INFO(t.str() << " in " << e.str());
    bool feasible = lns::prefix_feasible(t, e);
    CHECK(feasible == oracle::extendable(oracle::word_of(t), e));
    CHECK(lns::member(t, e) == oracle::matches(e, oracle::word_of(t)));
    if (lns::member(t, e)) CHECK(feasible);
    if (!feasible) {
      for (const auto& s : sigma) CHECK_FALSE(lns::prefix_feasible(lns::append(t, lns::Label(s)), e));
    }
  }
}

TEST_CASE("traces", "[regex]") {
  Trace open_read{"open", "read"};
  CHECK(lns::append(Trace{}, lns::Label("open")) == Trace{"open"});
  CHECK(lns::append(open_read, lns::Label("close")) == Trace{"open", "read", "close"});
  CHECK(lns::append(open_read, lns::Label("close")).length() == open_read.length() + 1);

  gen::Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    Trace t = gen::trace(rng, {"a", "b", "c"}, 6);
    auto back = Trace::from_regex(t.to_regex());
    REQUIRE(back);
    CHECK(*back == t);
    CHECK(lns::member(t, t.to_regex()));
    Trace other = gen::trace(rng, {"a", "b", "c"}, 6);
    if (other != t) CHECK_FALSE(lns::member(other, t.to_regex()));
  }
  CHECK_FALSE(Trace::from_regex(lns::parse_regex("a|b")));
}

TEST_CASE("determinization respects its state cap", "[regex]") {
  // The n-th letter from the end being a needs 2^n subset states.
  Regex e = lns::parse_regex("(a|b)*.a.(a|b).(a|b).(a|b).(a|b)");
  lns::Automaton nfa = lns::compile(e);
  std::set<lns::Label> sigma{lns::Label("a"), lns::Label("b")};
  CHECK(lns::determinize(nfa, sigma).state_count() >= 32);
  CHECK_THROWS_AS(lns::determinize(nfa, sigma, 8), lns::AutomatonTooLarge);
  CHECK_THROWS_AS(lns::include(lns::parse_regex("a"), e, {}, 8), lns::AutomatonTooLarge);
}
