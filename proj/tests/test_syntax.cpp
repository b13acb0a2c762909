#include "doctest.h"
#include "fairck/sweep.hpp"
#include "fairck/syntax.hpp"
#include "support.hpp"

using namespace fairck;
using test::corpus;

namespace {

ErrorKind kind_of(const char* text) {
  try {
    syntax::load(text);
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error for: " << text);
  return ErrorKind::Io;
}

}  // namespace

TEST_CASE("parse keeps the shape of the source") {
  syntax::SourceFile f = syntax::parse("alphabet {true,false,z,p}\ntype T1 = !true.!{z,p}.T1 + !false.end?");
  REQUIRE(f.types.size() == 1);
  const syntax::Term& body = f.types[0].body;
  CHECK(body.kind == syntax::Term::Kind::Sum);
  REQUIRE(body.operands.size() == 2);
  CHECK(body.operands[0].kind == syntax::Term::Kind::Prefix);
  CHECK(body.operands[1].kind == syntax::Term::Kind::Prefix);
  CHECK(body.operands[0].operands[0].labels == std::vector<Label>{2, 3});
  CHECK(f.types[0].pos.line == 2);

  syntax::SourceFile g = syntax::parse("alphabet {a}\ntype X = !a.X");
  CHECK(g.types[0].body.kind == syntax::Term::Kind::Prefix);
  CHECK(g.types[0].body.operands[0].kind == syntax::Term::Kind::Ref);
}

TEST_CASE("parse and elaboration errors") {
  CHECK(kind_of("type X = nil") == ErrorKind::Syntax);
  CHECK(kind_of("alphabet {a}\ntype X = X") == ErrorKind::UnguardedRecursion);
  CHECK(kind_of("alphabet {a}\ntype X = Y\ntype Y = X + end!") == ErrorKind::UnguardedRecursion);
  CHECK(kind_of("alphabet {a, b}\ntype X = !a.end? + ?b.end?") == ErrorKind::PolarityMismatch);
  CHECK(kind_of("alphabet {a, b}\ntype X = !a.end? + !a.end!") == ErrorKind::OverlappingLabels);
  CHECK(kind_of("alphabet {a, a}") == ErrorKind::DuplicateAlphabetLabel);
  CHECK(kind_of("alphabet {a}\ntype X = !b.end?") == ErrorKind::UnknownLabel);
  CHECK(kind_of("alphabet {a}\ntype X = Y") == ErrorKind::UndefinedTypeName);
  CHECK(kind_of("alphabet {a}\ntype X = end!\ntype X = end?") == ErrorKind::DuplicateTypeName);
  CHECK(kind_of("alphabet {a}\ntype X = !a.") == ErrorKind::Syntax);
  CHECK_THROWS_AS(syntax::load_file("/nonexistent/file.st"), Error);
}

TEST_CASE("diagnostics carry positions and are deterministic") {
  std::string first, second;
  for (std::string* out : {&first, &second}) {
    try {
      syntax::load("alphabet {a}\n\ntype X =   !b.end?");
    } catch (const Error& e) {
      *out = e.what();
      CHECK(e.line() == 3);
      CHECK(e.column() == 13);
    }
  }
  CHECK(first == second);
  CHECK(first.rfind("3:13:", 0) == 0);
}

TEST_CASE("singleton alphabets warn") {
  std::vector<std::string> warnings;
  syntax::load("alphabet {a}\ntype X = !a.X", &warnings);
  CHECK(warnings.size() == 1);
  warnings.clear();
  syntax::load("alphabet {a, b}\ntype X = !a.X", &warnings);
  CHECK(warnings.empty());
}

TEST_CASE("elaboration of the corpus") {
  const auto& sys = corpus();
  CHECK(sys.names().size() == 14);
  for (const char* n : {"T1", "S1", "T2", "S2"}) {
    StateRef s = sys.resolve(n);
    CHECK(dom(sys, s).size() == 2);
    CHECK(reachable(sys, {s}).size() == 4);
  }
  SessionSystem alias = syntax::load("alphabet {a, b}\ntype X = Y\ntype Y = !a.X + !b.end?");
  // An alias is its own state with the same node.
  CHECK(alias.node(alias.resolve("X")) == alias.node(alias.resolve("Y")));
  CHECK(bisimilar(alias, alias.resolve("X"), alias, alias.resolve("Y")));
  CHECK_THROWS_AS(sys.resolve("Missing"), Error);
}

TEST_CASE("printing uses the sugar") {
  SessionSystem s = syntax::load("alphabet {a}\ntype E = end!\ntype I = end?");
  CHECK(syntax::print_term(s, s.resolve("E")) == "end!");
  CHECK(syntax::print_term(s, s.resolve("I")) == "end?");
  CHECK(syntax::print_term(s, SessionSystem::kNil) == "nil");
  CHECK(syntax::print_term(corpus(), corpus().resolve("T1")) == "!true.!{z,p}.T1 + !false.end?");
}

TEST_CASE("round trip on the corpus") {
  const auto& sys = corpus();
  SessionSystem again = syntax::load(syntax::print_system(sys));
  for (const auto& n : sys.names()) CHECK(bisimilar(sys, n.state, again, again.resolve(n.name)));
  for (const auto& n : sys.names()) {
    SessionSystem one = syntax::load(syntax::print(sys, n.state, "Root"));
    CHECK(bisimilar(sys, n.state, one, one.resolve("Root")));
  }
  SessionSystem nil = syntax::load(syntax::print(sys, SessionSystem::kNil));
  CHECK(nil.resolve("Root") == SessionSystem::kNil);
}

TEST_CASE("property: round trip on random systems, including unnamed cycles") {
  for (std::uint64_t i = 0; i < 500; ++i) {
    SessionSystem sys = random_system(23, i, 8, 3);
    SessionSystem again = syntax::load(syntax::print_system(sys));
    for (const auto& n : sys.names()) REQUIRE(bisimilar(sys, n.state, again, again.resolve(n.name)));
    // Unnamed states force generated names in print().
    SessionSystem anon(sys.alphabet_ptr(), sys.states());
    for (std::uint32_t s = 0; s < anon.size(); ++s) {
      SessionSystem one = syntax::load(syntax::print(anon, StateRef{s}));
      REQUIRE(bisimilar(anon, StateRef{s}, one, one.resolve("Root")));
    }
  }
}
