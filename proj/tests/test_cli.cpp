#include <catch_amalgamated.hpp>

#include <string>

#include "lns/lns.hpp"
#include "support.hpp"

namespace {

const char* const corpus_files[] = {"partialccs.lns", "tpa.lns", "fig2.lns", "fig3.lns",
                                    "fig3_badtrace.lns", "fig4.lns", "fig4_wrongpassword.lns"};

template <class E>
void rejects(const std::string& text, const std::string& message_part) {
  INFO(text);
  try {
    (void)lns::parse_system(text);
    FAIL("accepted");
  } catch (const E& e) {
    CHECK(std::string(e.what()).find(message_part) != std::string::npos);
  }
}

} // namespace

TEST_CASE("corpus files load", "[cli]") {
  for (const char* name : corpus_files) {
    INFO(name);
    lns::SystemFile f = support::corpus_file(name);
    CHECK_FALSE(f.entry.empty());
    CHECK_NOTHROW(f.configuration());
  }
  lns::SystemFile ccs = support::corpus_file("partialccs.lns");
  REQUIRE(ccs.tss.size() == 1);
  CHECK(ccs.tss[0].name == "partialCCS");
  CHECK(ccs.tss[0].declared_rules == 7);

  lns::SystemFile tpa = support::corpus_file("tpa.lns");
  CHECK(tpa.find_tss("tpa_max")->union_of == std::vector<std::string>{"almostTPA", "parallel_max"});
  CHECK(support::corpus_file("fig4.lns").mode == lns::MonitorMode::PrefixClosed);
  CHECK(support::corpus_file("fig3.lns").mode == lns::MonitorMode::Exact);
}

TEST_CASE("validation errors", "[cli]") {
  rejects<lns::ValidationError>("", "no entry");
  rejects<lns::ValidationError>("tss T { labels a; ops nil/0; rule: nil -b-> nil; }\nproc M = 0;\nentry M;\n", "b");
  rejects<lns::ValidationError>("tss T { labels a; ops nil/0, f/1; rule: f(nil, nil) -a-> nil; }\nproc M = 0;\nentry M;\n",
                                "f");
  rejects<lns::ValidationError>("proc M = 0;\nproc M = 0;\nentry M;\n", "M");
  rejects<lns::ValidationError>("proc M = 0;\nentry N;\n", "N");
  rejects<lns::ValidationError>("proc M = exec(Unknown, r, nil);\nentry M;\n", "Unknown");
  rejects<lns::ValidationError>(
      "tss A { labels a; ops f/1; }\ntss B { labels a; ops f/2; }\ntss C = A union B;\nproc M = 0;\nentry M;\n", "f");
  rejects<lns::ParseError>("proc M = x(y.0;\nentry M;\n", "");
  rejects<lns::ParseError>("tss T { labels a }\n", "");
}

TEST_CASE("errors carry a location", "[cli]") {
  try {
    (void)lns::parse_system("proc M = 0;\n\nproc N = x<y;\nentry M;\n");
    FAIL("accepted");
  } catch (const lns::SourceError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() > 0);
  }
}

TEST_CASE("save and load round-trip", "[cli]") {
  for (const char* name : corpus_files) {
    INFO(name);
    lns::SystemFile f = support::corpus_file(name);
    std::string text = lns::save(f);
    lns::SystemFile g = lns::parse_system(text);
    CHECK(g == f);
    CHECK(lns::save(g) == text);
  }
}

TEST_CASE("polyadic prefixes are unary chains over a private channel", "[cli]") {
  lns::Process in = support::process("", "x(a, b).a<b>");
  REQUIRE(in.kind() == lns::Process::Kind::Input);
  lns::Process in_chain = in.continuation();
  CHECK(in_chain.kind() == lns::Process::Kind::Input);
  CHECK(in_chain.channel() == lns::Expr::name(in.bound()));
  CHECK(in_chain.continuation().continuation() == support::process("", "a<b>"));

  lns::Process out = support::process("", "x<a, b>");
  REQUIRE(out.kind() == lns::Process::Kind::Restrict);
  CHECK(out.continuation().payload() == lns::Expr::name(out.bound()));

  // The pair arrives intact even with a competing sender on x.
  lns::Configuration c{support::process("", "x<a, b> | x<c, d> | x(u, v).got<u>.got<v>")};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    lns::RunResult r = lns::run(c, {.seed = seed});
    std::vector<std::string> got;
    for (const auto& e : r.events) {
      if (e.event.rule == lns::Rule::Comm && e.event.detail.rfind("chan=_c", 0) == 0) {
        got.push_back(e.event.detail.substr(e.event.detail.find("payload=") + 8));
      }
    }
    REQUIRE(got.size() == 2);
    CHECK(((got[0] == "a" && got[1] == "b") || (got[0] == "c" && got[1] == "d")));
  }
}

TEST_CASE("sort markers pick the payload sort", "[cli]") {
  lns::Process p = support::process("", "x<re: a.b> | y<term: f(c)> | z<w>");
  CHECK(p.str().find("re: a.b") != std::string::npos);
  CHECK(p.str().find("term: f(c)") != std::string::npos);
}

TEST_CASE("ground terms parse against a signature", "[cli]") {
  lns::Signature sig{{lns::Symbol("nil"), 0}, {lns::Symbol("a"), 1}, {lns::Symbol("par"), 2}};
  CHECK(lns::parse_term("par(a(nil), nil)", sig) ==
        lns::Term::apply("par", {lns::Term::apply("a", {lns::Term::apply("nil")}), lns::Term::apply("nil")}));
  CHECK_THROWS_AS(lns::parse_term("par(nil)", sig), lns::ValidationError);
  CHECK_THROWS_AS(lns::parse_term("b(nil)", sig), lns::ValidationError);
  CHECK_THROWS_AS(lns::parse_term("par(nil,", sig), lns::ParseError);
}

TEST_CASE("regex definitions expand by name", "[cli]") {
  lns::SystemFile f = support::corpus_file("fig3.lns");
  CHECK(lns::parse_regex("fileProtocol*", f) == lns::Regex::star(*f.find_regex("fileProtocol")));
  CHECK(lns::parse_regex("open.close", f) == lns::parse_regex("open.close"));
}
