// Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "fairck/checkers.hpp"
#include "fairck/gis.hpp"
#include "fairck/semantics.hpp"
#include "fairck/sweep.hpp"
#include "fairck/syntax.hpp"
#include "fairck/witness.hpp"

using namespace fairck;

namespace {

const std::string kCorpus = std::string(FAIRCK_SAMPLES_DIR) + "/corpus.st";

struct Outcome {
  bool pass = true;
  std::string summary;
  std::vector<std::string> problems;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      problems.push_back(what);
    }
  }
};

struct Golden {
  const SessionSystem& sys;
  Outcome& o;
  int checks = 0;

  StateRef at(const char* n) const { return n ? sys.resolve(n) : SessionSystem::kNil; }
  void term(const char* t, bool want) {
    ++checks;
    o.expect(fair_termination(sys, at(t)) == want, std::string("fair termination of ") + (t ? t : "nil"));
  }
  void comp(const char* c, const char* s, bool fair, bool want) {
    ++checks;
    Config cfg{at(c), at(s)};
    bool got = fair ? fair_compliance(sys, cfg) : compliance(sys, cfg);
    o.expect(got == want, std::string(fair ? "fair " : "") + "compliance of " + c + " with " + s);
  }
  void sub(const char* t, const char* s, bool fair, bool want) {
    ++checks;
    bool got = fair ? fair_subtyping(sys, at(t), at(s)) : subtyping(sys, at(t), at(s));
    o.expect(got == want, std::string(fair ? "fair " : "") + "subtyping " + t + " <= " + s);
  }
};

Outcome golden(const SessionSystem& sys) {
  Outcome o;
  Golden g{sys, o};
  for (const char* t : {"T1", "S1", "T2", "S2", "R1", "R2"}) g.term(t, true);
  g.term(nullptr, true);
  g.term("R", false);
  g.term("R'", false);
  g.comp("R2", "T2", false, true);
  g.comp("R2", "S2", false, true);
  g.comp("R1", "T1", false, true);
  g.comp("R1", "S1", false, true);
  g.comp("R1", "T1", true, true);
  g.comp("R1", "S1", true, true);
  g.comp("R2", "T2", true, true);
  g.comp("R2", "S2", true, false);
  g.comp("Chooser", "TrueOnly", false, false);
  g.sub("T1", "S1", false, true);
  g.sub("T2", "S2", false, true);
  g.sub("T1", "S1", true, true);
  g.sub("T2", "S2", true, false);
  g.sub("Z", "N", false, false);
  g.sub("Z", "N", true, false);
  ++g.checks;
  o.expect(converges(sys, sys.resolve("Z"), sys.resolve("N")), "convergence of Z and N");
  g.sub("T", "S", true, true);
  o.summary = std::to_string(g.checks) + " verdicts on the example corpus";
  return o;
}

// Every instantiation made while checking the corpus verdicts.
Outcome corpus_inclusions(const SessionSystem& sys) {
  Outcome o;
  std::size_t n = 0;
  for (const auto& a : sys.names()) {
    TermInstance ti = instantiate_termination(sys, a.state);
    o.expect(generalized_inclusions_hold(ti.rules, ti.corules, gis::gen(ti.rules, ti.corules).result.members),
             "termination of " + a.name);
    ++n;
    for (const auto& b : sys.names()) {
      CompInstance ci = instantiate_compliance(sys, Config{a.state, b.state});
      o.expect(generalized_inclusions_hold(ci.rules, ci.corules, gis::gen(ci.rules, ci.corules).result.members),
               "compliance of " + a.name + " with " + b.name);
      SubInstance si = instantiate_subtyping(sys, SubPair{a.state, b.state});
      o.expect(generalized_inclusions_hold(si.rules, si.corules, gis::gen_within(si.rules, si.bound).members),
               "subtyping " + a.name + " <= " + b.name);
      n += 2;
    }
  }
  o.summary = std::to_string(n) + " corpus instantiations";
  return o;
}

Outcome synthesis(const SessionSystem& sys) {
  Outcome o;
  StateRef t2 = sys.resolve("T2"), s2 = sys.resolve("S2");
  SynthOptions opt;
  opt.budget = 64;
  ClientSpec spec = synth_discriminating_client(sys, t2, s2, opt);
  o.expect(spec.status == ClientSpec::Status::Found, "no client found for (T2, S2)");
  if (spec.status == ClientSpec::Status::Found) {
    const SessionSystem& ext = *spec.system;
    o.expect(fair_compliance(ext, Config{spec.root, t2}), "client not fairly compliant with T2");
    o.expect(!fair_compliance(ext, Config{spec.root, s2}), "client fairly compliant with S2");
    o.expect(oracle_fair_compliance(ext, Config{spec.root, t2}, false).holds, "oracle rejects client with T2");
    o.expect(!oracle_fair_compliance(ext, Config{spec.root, s2}, false).holds, "oracle accepts client with S2");
    o.summary = "client for (T2, S2) after " + std::to_string(spec.candidates) + " candidates";
  }
  ClientSpec none = synth_discriminating_client(sys, sys.resolve("T1"), sys.resolve("S1"), opt);
  o.expect(none.status == ClientSpec::Status::Inapplicable, "(T1, S1) not reported inapplicable");
  o.summary += ", (T1, S1) inapplicable";
  return o;
}

Outcome max_elem() {
  // l = cons 1 l; judgment 0: maxElem(l, 1), judgment 1: maxElem(l, 2).
  Outcome o;
  gis::RuleSystem rules(2);
  rules.add(0, "max", {0});  // maxElem(cons 1 l, max(1, 1)) <- maxElem(l, 1)
  rules.add(1, "max", {1});  // maxElem(cons 1 l, max(1, 2)) <- maxElem(l, 2)
  gis::RuleSystem corules(2);
  corules.add(0, "max-head", {});  // maxElem(cons 1 l, 1)
  gis::JudgmentSet greatest = gis::gfp(rules).members;
  gis::JudgmentSet generalized = gis::gen(rules, corules).result.members;
  o.expect(greatest.contains(1), "maxElem(l, 2) not in gfp");
  o.expect(!generalized.contains(1), "maxElem(l, 2) in gen");
  o.expect(generalized.contains(0), "maxElem(l, 1) not in gen");
  o.summary = "maxElem(l, 2) only coinductive, maxElem(l, 1) generalized";
  return o;
}

Outcome round_trip(const SessionSystem& sys) {
  Outcome o;
  SessionSystem again = syntax::load(syntax::print_system(sys));
  for (const auto& n : sys.names()) {
    o.expect(bisimilar(sys, n.state, again, again.resolve(n.name)), "system round trip of " + n.name);
    SessionSystem one = syntax::load(syntax::print(sys, n.state, "Root"));
    o.expect(bisimilar(sys, n.state, one, one.resolve("Root")), "single round trip of " + n.name);
  }
  const std::vector<std::vector<std::string>> commands = {
      {"parse", kCorpus, "--json"},
      {"term", kCorpus, "-t", "R'", "--explain", "--json"},
      {"term", kCorpus, "-t", "T1", "--explain", "--json"},
      {"comp", kCorpus, "-c", "R1", "-s", "T1", "--mode", "fair", "--explain", "--json"},
      {"comp", kCorpus, "-c", "Chooser", "-s", "TrueOnly", "--mode", "safety", "--explain", "--json"},
      {"sub", kCorpus, "-t", "T1", "-s", "S1", "--mode", "fair", "--explain", "--json"},
      {"sub", kCorpus, "-t", "T2", "-s", "S2", "--mode", "fair", "--synth-client", "--json"},
      {"sub", kCorpus, "-t", "Z", "-s", "N", "--mode", "safety", "--explain", "--json"},
      {"selftest", "--max-states", "3", "--random-count", "50", "--json"},
      {"batch", "--all", std::string(FAIRCK_SAMPLES_DIR) + "/corpus.manifest", "--json"},
  };
  for (const auto& args : commands) {
    std::string first;
    for (int run = 0; run < 3; ++run) {
      std::ostringstream out, err;
      cli::run(args, out, err);
      if (run == 0) first = out.str();
      o.expect(!first.empty() && out.str() == first, "JSON differs between runs of " + args.front());
    }
  }
  o.summary = std::to_string(sys.names().size()) + " named types, " + std::to_string(commands.size()) +
              " commands run 3 times";
  return o;
}

}  // namespace

int main() {
  const SessionSystem sys = syntax::load_file(kCorpus);
  int failures = 0;
  auto report = [&](int id, const char* title, const std::function<Outcome()>& f) {
    auto start = std::chrono::steady_clock::now();
    Outcome o = f();
    double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %d %s: %s (%.2f s)\n", o.pass ? "PASS" : "FAIL", id, title, o.summary.c_str(), s);
    for (std::size_t i = 0; i < o.problems.size() && i < 10; ++i) std::printf("     %s\n", o.problems[i].c_str());
    std::fflush(stdout);
    if (!o.pass) ++failures;
  };

  SelftestReport st;
  report(1, "golden verdicts", [&] { return golden(sys); });
  report(2, "fair termination against its oracle", [&] {
    st = run_selftest(SelftestOptions{});
    Outcome o;
    o.expect(st.exhaustive_systems == 33101, "exhaustive family size");
    o.expect(st.random_systems >= 500, "random systems");
    o.expect(st.tally.termination_mismatches == 0, "termination mismatches");
    if (st.counterexample) o.problems.push_back(*st.counterexample);
    o.summary = std::to_string(st.exhaustive_systems) + " exhaustive + " + std::to_string(st.random_systems) +
                " random systems, " + std::to_string(st.tally.states) + " states, " +
                std::to_string(st.tally.termination_mismatches) + " mismatches";
    return o;
  });
  report(3, "compliance and fair compliance against their oracles", [&] {
    Outcome o;
    o.expect(st.tally.compliance_mismatches == 0, "compliance mismatches");
    o.expect(st.tally.fair_compliance_mismatches == 0, "fair compliance mismatches");
    o.expect(st.tally.fair_not_safe == 0, "fair compliance without compliance");
    o.summary = std::to_string(st.tally.configs) + " sessions, " +
                std::to_string(st.tally.compliance_mismatches + st.tally.fair_compliance_mismatches +
                               st.tally.fair_not_safe) +
                " mismatches";
    return o;
  });
  report(4, "generalized interpretation inclusions", [&] {
    Outcome o = corpus_inclusions(sys);
    o.expect(st.tally.inclusion_violations == 0, "inclusion violations in the generated families");
    o.summary += " and every generated instantiation, " + std::to_string(st.tally.inclusion_violations) +
                 " violations";
    return o;
  });
  report(5, "subtyping soundness against strategy clients", [&] {
    SoundnessReport r = run_subtyping_soundness(SoundnessOptions{});
    Outcome o;
    o.expect(r.fair_pairs >= 200, "fewer than 200 fair pairs");
    o.expect(r.safe_pairs >= 200, "fewer than 200 safe pairs");
    o.expect(r.passed(), "violations");
    if (r.counterexample) o.problems.push_back(*r.counterexample);
    o.summary = std::to_string(r.fair_pairs) + " fair pairs / " + std::to_string(r.fair_clients) + " clients, " +
                std::to_string(r.safe_pairs) + " safe pairs / " + std::to_string(r.safe_clients) + " clients, " +
                std::to_string(r.fair_violations + r.safe_violations) + " violations";
    return o;
  });
  report(6, "discriminating client synthesis", [&] { return synthesis(sys); });
  report(7, "generalized interpretation of maxElem", max_elem);
  report(8, "round trip and deterministic JSON", [&] { return round_trip(sys); });
  return failures == 0 ? 0 : 1;
}
