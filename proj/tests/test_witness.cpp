#include "doctest.h"
#include "fairck/checkers.hpp"
#include "fairck/semantics.hpp"
#include "fairck/sweep.hpp"
#include "fairck/witness.hpp"
#include "support.hpp"

using namespace fairck;
using test::corpus;

namespace {

StateRef at(const char* n) { return corpus().resolve(n); }

std::vector<std::string> rule_spine(const DerivationNode& d) {
  std::vector<std::string> out{d.rule};
  const DerivationNode* cur = &d;
  while (!cur->premises.empty()) {
    cur = &cur->premises.front();
    out.push_back(cur->rule);
  }
  return out;
}

}  // namespace

TEST_CASE("fair compliance derivation synchronizes then succeeds") {
  Verdict v = explain_fair_compliance(corpus(), Config{at("R2"), at("T2")});
  REQUIRE(v.holds);
  const auto& w = std::get<DerivationWitness>(*v.witness);
  REQUIRE(w.bounding);
  CHECK(rule_spine(*w.bounding) == std::vector<std::string>{"c-sync(!true)", "c-sync(?z)", "c-success"});
  CHECK(w.bounding->judgment == "R2 ⊣ T2");
  REQUIRE(w.root);
  CHECK(w.root->rule == "c-out-inp");
}

TEST_CASE("fair subtyping failure points at the escaping pair") {
  Verdict v = explain_fair_subtyping(corpus(), at("T2"), at("S2"));
  REQUIRE_FALSE(v.holds);
  const auto& w = std::get<DivergenceWitness>(*v.witness);
  CHECK(w.node == "T2 ⊑ S2");
  CHECK(w.prefix.empty());
  CHECK(w.escape == std::vector<std::string>{"?true", "!z"});
}

TEST_CASE("fair subtyping derivation uses convergence") {
  Verdict v = explain_fair_subtyping(corpus(), at("T1"), at("S1"));
  REQUIRE(v.holds);
  const auto& w = std::get<DerivationWitness>(*v.witness);
  REQUIRE(w.bounding);
  CHECK(rule_spine(*w.bounding) == std::vector<std::string>{"s-converge", "s-converge"});
}

TEST_CASE("termination of nil is an axiom") {
  Verdict v = explain_fair_termination(corpus(), SessionSystem::kNil);
  REQUIRE(v.holds);
  const auto& w = std::get<DerivationWitness>(*v.witness);
  REQUIRE(w.bounding);
  CHECK(w.bounding->rule == "t-nil");
  CHECK(w.bounding->premises.empty());
}

TEST_CASE("termination failure names the stuck residual") {
  Verdict v = explain_fair_termination(corpus(), at("R'"));
  REQUIRE_FALSE(v.holds);
  const auto& w = std::get<TracePath>(*v.witness);
  CHECK(w.steps == std::vector<std::string>{"!true"});
  CHECK(w.terminal == "R");
}

TEST_CASE("compliance failure replays to a stuck session") {
  const auto& sys = corpus();
  Verdict v = explain_compliance(sys, Config{at("Chooser"), at("TrueOnly")});
  REQUIRE_FALSE(v.holds);
  const auto& w = std::get<TracePath>(*v.witness);
  CHECK(w.steps == std::vector<std::string>{"?false"});
}

TEST_CASE("subtyping failure of zero against any number") {
  Verdict v = explain_subtyping(corpus(), at("Z"), at("N"));
  REQUIRE_FALSE(v.holds);
  const auto& w = std::get<TracePath>(*v.witness);
  CHECK(w.steps.empty());
  CHECK(w.reason.find("{p}") != std::string::npos);
}

TEST_CASE("discriminating client for the unfair refinement") {
  const auto& sys = corpus();
  for (bool parallel : {false, true}) {
    ClientSpec spec = synth_discriminating_client(sys, at("T2"), at("S2"), {64, 200000, parallel});
    REQUIRE(spec.status == ClientSpec::Status::Found);
    CHECK(bisimilar(*spec.system, spec.root, sys, at("R2")));
    CHECK(oracle_fair_compliance(*spec.system, Config{spec.root, at("T2")}).holds);
    CHECK_FALSE(oracle_fair_compliance(*spec.system, Config{spec.root, at("S2")}).holds);
    CHECK(spec.source.rfind("alphabet", 0) == 0);
  }
}

TEST_CASE("synthesis is inapplicable when fair subtyping holds") {
  const auto& sys = corpus();
  CHECK(synth_discriminating_client(sys, at("T1"), at("S1")).status == ClientSpec::Status::Inapplicable);
  CHECK(synth_discriminating_client(sys, SessionSystem::kNil, at("TrueOnly")).status ==
        ClientSpec::Status::Inapplicable);
}

namespace {

bool same(const ClientSpec& a, const ClientSpec& b) {
  if (a.status != b.status || a.candidates != b.candidates || a.source != b.source) return false;
  return a.status != ClientSpec::Status::Found || bisimilar(*a.system, a.root, *b.system, b.root);
}

// Follows rendered reduction steps from c; nullopt if some step is absent.
std::optional<Config> replay(const SessionSystem& sys, Config c, const std::vector<std::string>& steps) {
  for (const auto& s : steps) {
    bool moved = false;
    for (const Reduction& r : reduce(sys, c))
      if (to_string(sys.alphabet(), r.action) == s) {
        c = r.target;
        moved = true;
        break;
      }
    if (!moved) return std::nullopt;
  }
  return c;
}

}  // namespace

TEST_CASE("property: explanations agree with verdicts and replay") {
  for (std::uint64_t i = 0; i < 200; ++i) {
    SessionSystem sys = random_system(31, i, 6, 2);
    for (std::uint32_t a = 0; a < sys.size(); ++a) {
      Verdict ft = explain_fair_termination(sys, StateRef{a});
      REQUIRE(ft.holds == fair_termination(sys, StateRef{a}));
      REQUIRE(ft.witness.has_value());
      for (std::uint32_t b = 0; b < sys.size(); ++b) {
        Config c{StateRef{a}, StateRef{b}};
        for (bool fair : {false, true}) {
          Verdict v = fair ? explain_fair_compliance(sys, c) : explain_compliance(sys, c);
          REQUIRE(v.holds == (fair ? fair_compliance(sys, c) : compliance(sys, c)));
          REQUIRE(v.witness.has_value());
          if (v.holds) {
            REQUIRE(std::holds_alternative<DerivationWitness>(*v.witness));
          } else {
            const auto& path = std::get<TracePath>(*v.witness);
            auto end = replay(sys, c, path.steps);
            REQUIRE(end.has_value());
            REQUIRE(describe(sys, *end) == path.terminal);
            REQUIRE_FALSE(is_success(sys, *end));
          }
        }
        Verdict fs = explain_fair_subtyping(sys, StateRef{a}, StateRef{b});
        REQUIRE(fs.holds == fair_subtyping(sys, StateRef{a}, StateRef{b}));
        REQUIRE(explain_subtyping(sys, StateRef{a}, StateRef{b}).holds == subtyping(sys, StateRef{a}, StateRef{b}));
        REQUIRE(explain_converges(sys, StateRef{a}, StateRef{b}).holds == converges(sys, StateRef{a}, StateRef{b}));
      }
    }
  }
}

TEST_CASE("property: the client evaluator agrees with the oracles") {
  for (std::uint64_t i = 0; i < 60; ++i) {
    SessionSystem sys = random_system(37, i, 4, 2);
    for (std::uint32_t t = 1; t < sys.size(); ++t)
      for (std::size_t size = 1; size <= 3; ++size)
        enumerate_strategy_clients(sys, StateRef{t}, size, [&](const ClientNodes& client) {
          Extension ext = attach_client(sys, client);
          for (std::uint32_t s = 0; s < sys.size(); ++s) {
            Config c{ext.state, StateRef{s}};
            REQUIRE(client_complies(sys, client, StateRef{s}, false) ==
                    oracle_compliance(ext.system, c, false).holds);
            REQUIRE(client_complies(sys, client, StateRef{s}, true) ==
                    oracle_fair_compliance(ext.system, c, false).holds);
          }
          return true;
        });
  }
}

TEST_CASE("property: synthesis is deterministic and its clients discriminate") {
  std::size_t found = 0;
  for (std::uint64_t i = 0; i < 300; ++i) {
    SessionSystem sys = random_system(41, i, 4, 2);
    for (std::uint32_t t = 1; t < sys.size(); ++t)
      for (std::uint32_t s = 1; s < sys.size(); ++s) {
        if (!subtyping(sys, StateRef{t}, StateRef{s}) || fair_subtyping(sys, StateRef{t}, StateRef{s})) continue;
        SynthOptions opt{8, 20000, false};
        ClientSpec serial = synth_discriminating_client(sys, StateRef{t}, StateRef{s}, opt);
        opt.parallel = true;
        ClientSpec parallel = synth_discriminating_client(sys, StateRef{t}, StateRef{s}, opt);
        REQUIRE(same(serial, parallel));
        if (serial.status != ClientSpec::Status::Found) continue;
        ++found;
        REQUIRE(oracle_fair_compliance(*serial.system, Config{serial.root, StateRef{t}}, false).holds);
        REQUIRE_FALSE(oracle_fair_compliance(*serial.system, Config{serial.root, StateRef{s}}, false).holds);
      }
  }
  CHECK(found > 0);
}

TEST_CASE("synthesis over many candidates is deterministic") {
  SessionSystem sys = syntax::load(
      "alphabet {a, b, c}\n"
      "type T = !{a,b,c}.T\n"
      "type S = !a.P1\n"
      "type P1 = !{a,c}.P2 + !b.P1\n"
      "type P2 = !a.P3 + !c.P1\n"
      "type P3 = !a.P1\n");
  SynthOptions opt;
  opt.parallel = false;
  ClientSpec serial = synth_discriminating_client(sys, sys.resolve("T"), sys.resolve("S"), opt);
  opt.parallel = true;
  ClientSpec parallel = synth_discriminating_client(sys, sys.resolve("T"), sys.resolve("S"), opt);
  REQUIRE(serial.status == ClientSpec::Status::Found);
  CHECK(serial.candidates > 10000);
  CHECK(same(serial, parallel));
  opt.max_candidates = 1000;
  ClientSpec capped = synth_discriminating_client(sys, sys.resolve("T"), sys.resolve("S"), opt);
  CHECK(capped.status == ClientSpec::Status::NotFound);
  CHECK(capped.candidates <= 1000);
}
