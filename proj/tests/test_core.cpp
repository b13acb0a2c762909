#include <map>
#include <random>
#include <tuple>

#include "doctest.h"
#include "fairck/core.hpp"
#include "fairck/sweep.hpp"
#include "fairck/syntax.hpp"
#include "support.hpp"

using namespace fairck;
using test::corpus;

namespace {

// Equality of unfoldings up to a fixed depth, memoized on (a, b, depth).
struct Unfolding {
  const SessionSystem& l;
  const SessionSystem& r;
  std::map<std::tuple<std::uint32_t, std::uint32_t, std::size_t>, bool> memo;

  bool equal(StateRef a, StateRef b, std::size_t depth) {
    if (depth == 0) return true;
    auto key = std::make_tuple(a.index, b.index, depth);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    const Node& x = l.node(a);
    const Node& y = r.node(b);
    bool eq = x.is_nil() == y.is_nil();
    if (eq && !x.is_nil()) {
      eq = x.polarity == y.polarity;
      for (Label k = 0; eq && k < x.cont.size(); ++k) eq = equal(x.cont[k], y.cont[k], depth - 1);
    }
    return memo[key] = eq;
  }
};

bool unfold_equal(const SessionSystem& l, StateRef a, const SessionSystem& r, StateRef b) {
  std::size_t n = l.size() * r.size() + 1;
  return Unfolding{l, r, {}}.equal(a, b, n);
}

}  // namespace

TEST_CASE("alphabet rejects duplicates and empty label sets") {
  CHECK_THROWS_AS(Alphabet({"a", "a"}), Error);
  CHECK_THROWS_AS(Alphabet(std::vector<std::string>{}), Error);
  Alphabet a({"x", "y"});
  CHECK(a.find("y") == Label{1});
  CHECK_FALSE(a.find("z"));
}

TEST_CASE("dom, definedness and win") {
  const auto& sys = corpus();
  SessionSystem s = syntax::load("alphabet {a, b}\ntype Ei = end?\ntype Eo = end!\ntype P = !a.end!");
  CHECK(dom(s, s.resolve("Ei")).empty());
  CHECK(dom(s, SessionSystem::kNil).empty());
  CHECK(dom(sys, sys.resolve("T1")) == std::vector<Label>{0, 1});
  CHECK_FALSE(is_defined(s, SessionSystem::kNil));
  CHECK(is_defined(s, s.resolve("Eo")));
  CHECK(is_defined(sys, sys.resolve("T1")));
  CHECK(is_win(s, s.resolve("Eo")));
  CHECK_FALSE(is_win(s, s.resolve("Ei")));
  CHECK_FALSE(is_win(s, s.resolve("P")));
}

TEST_CASE("plus merges disjoint branches and rejects the rest") {
  SessionSystem s = syntax::load(
      "alphabet {true, false}\ntype A = !true.end?\ntype B = !false.end?\ntype AB = !{true,false}.end?\n"
      "type E = end!\ntype I = ?true.end?\ntype A2 = !true.end!");
  Extension ab = plus(s, s.resolve("A"), s.resolve("B"));
  CHECK(bisimilar(ab.system, ab.state, s, s.resolve("AB")));
  Extension unit = plus(s, s.resolve("A"), s.resolve("E"));
  CHECK(bisimilar(unit.system, unit.state, s, s.resolve("A")));
  try {
    plus(s, s.resolve("A"), s.resolve("A2"));
    FAIL("expected OverlappingLabels");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::OverlappingLabels);
  }
  try {
    plus(s, s.resolve("A"), s.resolve("I"));
    FAIL("expected PolarityMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::PolarityMismatch);
  }
  CHECK_THROWS_AS(plus(s, s.resolve("A"), SessionSystem::kNil), Error);
}

TEST_CASE("bisimilarity examples") {
  SessionSystem s = syntax::load("alphabet {a}\ntype X = !a.X\ntype Y = !a.!a.Y\ntype Eo = end!\ntype Ei = end?");
  CHECK(bisimilar(s, s.resolve("X"), s.resolve("Y")));
  CHECK(unfold_equal(s, s.resolve("X"), s, s.resolve("Y")));
  CHECK_FALSE(bisimilar(s, s.resolve("Eo"), s.resolve("Ei")));
  CHECK(bisimilar(corpus(), corpus().resolve("T1"), corpus().resolve("T1")));
}

TEST_CASE("reachable examples") {
  const auto& sys = corpus();
  SessionSystem s = syntax::load("alphabet {a}\ntype Ei = end?");
  CHECK(reachable(s, {s.resolve("Ei")}) == std::vector<StateRef>{SessionSystem::kNil, s.resolve("Ei")});
  CHECK(reachable(s, {SessionSystem::kNil}) == std::vector<StateRef>{SessionSystem::kNil});
  CHECK(reachable(sys, {sys.resolve("T1")}).size() == 4);
}

TEST_CASE("system validation") {
  auto alpha = std::make_shared<const Alphabet>(std::vector<std::string>{"a"});
  CHECK_THROWS_AS(SessionSystem(alpha, {Node::branch(Polarity::In, {StateRef{0}})}), Error);
  CHECK_THROWS_AS(SessionSystem(alpha, {Node::nil(), Node::branch(Polarity::In, {StateRef{5}})}), Error);
  CHECK_THROWS_AS(SessionSystem(alpha, {Node::nil(), Node::branch(Polarity::In, {})}), Error);
  CHECK_THROWS_AS(SessionSystem(alpha, {Node::nil(), Node::nil()}), Error);
}

TEST_CASE("property: bisimilarity agrees with bounded unfolding and is an equivalence") {
  for (std::uint64_t i = 0; i < 300; ++i) {
    SessionSystem sys = random_system(11, i, 6, 2);
    const auto n = static_cast<std::uint32_t>(sys.size());
    for (std::uint32_t a = 0; a < n; ++a)
      for (std::uint32_t b = 0; b < n; ++b) {
        bool bis = bisimilar(sys, StateRef{a}, StateRef{b});
        REQUIRE(bis == unfold_equal(sys, StateRef{a}, sys, StateRef{b}));
        CHECK(bis == bisimilar(sys, StateRef{b}, StateRef{a}));
        if (bis) {
          CHECK(dom(sys, StateRef{a}) == dom(sys, StateRef{b}));
          CHECK(is_defined(sys, StateRef{a}) == is_defined(sys, StateRef{b}));
          for (std::uint32_t c = 0; c < n; ++c)
            if (bisimilar(sys, StateRef{b}, StateRef{c})) CHECK(bisimilar(sys, StateRef{a}, StateRef{c}));
        }
      }
    for (std::uint32_t a = 0; a < n; ++a) CHECK(bisimilar(sys, StateRef{a}, StateRef{a}));
  }
}

TEST_CASE("property: plus is commutative and associative up to bisimilarity") {
  std::mt19937_64 rng(5);
  for (std::uint64_t i = 0; i < 300; ++i) {
    SessionSystem base = random_system(13, i, 5, 3);
    const auto n = static_cast<std::uint32_t>(base.size());
    Polarity p = rng() % 2 ? Polarity::In : Polarity::Out;
    // Three branches with disjoint domains: every label goes to at most one.
    std::vector<Node> parts(3, Node::branch(p, std::vector<StateRef>(3, SessionSystem::kNil)));
    for (Label x = 0; x < 3; ++x) {
      std::size_t owner = rng() % 4;
      // Any non-nil state of the extended system, the parts included.
      if (owner < 3) parts[owner].cont[x] = StateRef{static_cast<std::uint32_t>(1 + rng() % (n + 2))};
    }
    SessionSystem sys = base.extended(parts);
    StateRef a{n}, b{n + 1}, c{n + 2};
    Extension ab = plus(sys, a, b), ba = plus(sys, b, a);
    CHECK(bisimilar(ab.system, ab.state, ba.system, ba.state));
    Extension ab_c = plus(ab.system, ab.state, c);
    Extension bc = plus(sys, b, c);
    Extension a_bc = plus(bc.system, a, bc.state);
    CHECK(bisimilar(ab_c.system, ab_c.state, a_bc.system, a_bc.state));
  }
}

TEST_CASE("property: reachable is monotone and idempotent, dom stays in the alphabet") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    SessionSystem sys = random_system(17, i, 8, 3);
    const auto n = static_cast<std::uint32_t>(sys.size());
    for (std::uint32_t a = 0; a < n; ++a) {
      auto r1 = reachable(sys, {StateRef{a}});
      CHECK(reachable(sys, r1) == r1);
      auto r2 = reachable(sys, {StateRef{a}, StateRef{(a + 1) % n}});
      CHECK(std::includes(r2.begin(), r2.end(), r1.begin(), r1.end()));
      for (Label x : dom(sys, StateRef{a})) CHECK(x < sys.alphabet().size());
      if (is_win(sys, StateRef{a})) CHECK(is_defined(sys, StateRef{a}));
    }
  }
}
