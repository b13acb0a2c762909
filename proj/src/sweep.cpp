#include "fairck/sweep.hpp"

#include <algorithm>
#include <limits>
#include <random>
#include <vector>

#include <omp.h>

#include "fairck/checkers.hpp"
#include "fairck/semantics.hpp"
#include "fairck/syntax.hpp"
#include "fairck/witness.hpp"

namespace fairck {

namespace {

std::shared_ptr<const Alphabet> alphabet_of(std::size_t labels) {
  static const char* const names[] = {"a", "b", "c", "d", "e", "f", "g", "h"};
  if (labels == 0 || labels > std::size(names)) throw Error(ErrorKind::InvalidSystem, "alphabet size out of range");
  return std::make_shared<const Alphabet>(std::vector<std::string>(names, names + labels));
}

std::uint64_t ipow(std::uint64_t b, std::size_t e) {
  std::uint64_t r = 1;
  while (e--) r *= b;
  return r;
}

SessionSystem named_system(std::shared_ptr<const Alphabet> alpha, std::vector<Node> states) {
  std::vector<NamedState> names;
  for (std::uint32_t i = 1; i < states.size(); ++i) names.push_back({"Q" + std::to_string(i), StateRef{i}});
  return SessionSystem(std::move(alpha), std::move(states), std::move(names));
}

}  // namespace

std::uint64_t exhaustive_count(std::size_t branches, std::size_t labels) {
  return ipow(2 * ipow(branches + 1, labels), branches);
}

SessionSystem exhaustive_system(std::uint64_t index, std::size_t branches, std::size_t labels) {
  auto alpha = alphabet_of(labels);
  const std::uint64_t per_state = 2 * ipow(branches + 1, labels);
  std::vector<Node> states{Node::nil()};
  for (std::size_t k = 0; k < branches; ++k) {
    std::uint64_t digit = index % per_state;
    index /= per_state;
    Polarity p = digit % 2 ? Polarity::Out : Polarity::In;
    digit /= 2;
    std::vector<StateRef> cont(labels);
    for (auto& c : cont) {
      c = StateRef{static_cast<std::uint32_t>(digit % (branches + 1))};
      digit /= branches + 1;
    }
    states.push_back(Node::branch(p, std::move(cont)));
  }
  return named_system(std::move(alpha), std::move(states));
}

std::uint64_t exhaustive_family_size(std::size_t max_states, std::size_t labels) {
  std::uint64_t n = 0;
  for (std::size_t k = 0; k < max_states; ++k) n += exhaustive_count(k, labels);
  return n;
}

SessionSystem exhaustive_family_member(std::uint64_t index, std::size_t max_states, std::size_t labels) {
  for (std::size_t k = 0; k < max_states; ++k) {
    std::uint64_t c = exhaustive_count(k, labels);
    if (index < c) return exhaustive_system(index, k, labels);
    index -= c;
  }
  throw Error(ErrorKind::InvalidSystem, "exhaustive index out of range");
}

SessionSystem random_system(std::uint64_t seed, std::uint64_t index, std::size_t max_states, std::size_t labels) {
  auto alpha = alphabet_of(labels);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  std::mt19937_64 rng(seq);
  const std::size_t top = max_states > 1 ? max_states - 1 : 0;
  const std::size_t k = top == 0 ? 0 : std::uniform_int_distribution<std::size_t>(1, top)(rng);
  std::vector<Node> states{Node::nil()};
  for (std::size_t i = 0; i < k; ++i) {
    Polarity p = rng() % 2 ? Polarity::Out : Polarity::In;
    std::vector<StateRef> cont(labels);
    // A third of the continuations are nil so that domains vary.
    for (auto& c : cont)
      c = rng() % 3 == 0 ? SessionSystem::kNil
                         : StateRef{static_cast<std::uint32_t>(std::uniform_int_distribution<std::size_t>(1, k)(rng))};
    states.push_back(Node::branch(p, std::move(cont)));
  }
  return named_system(std::move(alpha), std::move(states));
}

SystemTally& SystemTally::operator+=(const SystemTally& o) {
  states += o.states;
  configs += o.configs;
  termination_mismatches += o.termination_mismatches;
  compliance_mismatches += o.compliance_mismatches;
  fair_compliance_mismatches += o.fair_compliance_mismatches;
  fair_not_safe += o.fair_not_safe;
  inclusion_violations += o.inclusion_violations;
  return *this;
}

SystemTally check_system(const SessionSystem& sys, Fault fault, std::string* first_problem) {
  SystemTally t;
  auto note = [&](const std::string& what) {
    if (first_problem && first_problem->empty()) *first_problem = what;
  };
  const auto n = static_cast<std::uint32_t>(sys.size());
  for (std::uint32_t i = 0; i < n; ++i) {
    StateRef s{i};
    ++t.states;
    TermInstance in = instantiate_termination(sys, s);
    gis::Generalized g = gis::gen(in.rules, in.corules);
    bool holds = g.result.members.contains(in.root);
    if (holds != oracle_fair_termination(sys, s, false).holds) {
      ++t.termination_mismatches;
      note("fair termination of " + syntax::describe(sys, s));
    }
    if (!g.result.members.subset_of(gis::gfp(in.rules).members) || !g.result.members.subset_of(g.bound.members)) {
      ++t.inclusion_violations;
      note("inclusions for termination of " + syntax::describe(sys, s));
    }
  }
  for (std::uint32_t a = 0; a < n; ++a)
    for (std::uint32_t b = 0; b < n; ++b) {
      Config c{StateRef{a}, StateRef{b}};
      ++t.configs;
      CompInstance in = instantiate_compliance(sys, c);
      gis::Fixpoint safe = gis::gfp(in.rules);
      gis::Generalized g = gis::gen(in.rules, fault == Fault::DropSyncCorules ? gis::RuleSystem(in.universe.size())
                                                                             : in.corules);
      bool comp = safe.members.contains(in.root);
      bool fair = fault == Fault::DropSyncCorules ? comp : g.result.members.contains(in.root);
      if (comp != oracle_compliance(sys, c, false).holds) {
        ++t.compliance_mismatches;
        note("compliance of " + describe(sys, c));
      }
      if (fair != oracle_fair_compliance(sys, c, false).holds) {
        ++t.fair_compliance_mismatches;
        note("fair compliance of " + describe(sys, c));
      }
      if (fair && !comp) {
        ++t.fair_not_safe;
        note("fair compliance without compliance for " + describe(sys, c));
      }
      if (!g.result.members.subset_of(safe.members) || !g.result.members.subset_of(g.bound.members)) {
        ++t.inclusion_violations;
        note("inclusions for compliance of " + describe(sys, c));
      }
    }
  return t;
}

SelftestReport run_selftest(const SelftestOptions& o) {
  SelftestReport report;
  report.exhaustive_systems = exhaustive_family_size(o.max_states, o.labels);
  report.random_systems = o.max_states == 0 ? 0 : o.random_count;
  const auto total = static_cast<std::int64_t>(report.exhaustive_systems + report.random_systems);
  auto member = [&](std::int64_t i) {
    auto u = static_cast<std::uint64_t>(i);
    return u < report.exhaustive_systems
               ? exhaustive_family_member(u, o.max_states, o.labels)
               : random_system(o.seed, u - report.exhaustive_systems, o.random_max_states, o.random_labels);
  };

  std::int64_t first_bad = std::numeric_limits<std::int64_t>::max();
  if (o.parallel) {
    std::vector<SystemTally> partial(static_cast<std::size_t>(omp_get_max_threads()));
#pragma omp parallel for schedule(dynamic, 64) reduction(min : first_bad)
    for (std::int64_t i = 0; i < total; ++i) {
      SystemTally t = check_system(member(i), o.fault);
      if (t.problems() && i < first_bad) first_bad = i;
      partial[static_cast<std::size_t>(omp_get_thread_num())] += t;
    }
    for (const auto& t : partial) report.tally += t;
  } else {
    for (std::int64_t i = 0; i < total; ++i) {
      SystemTally t = check_system(member(i), o.fault);
      if (t.problems() && first_bad == std::numeric_limits<std::int64_t>::max()) first_bad = i;
      report.tally += t;
    }
  }
  if (first_bad != std::numeric_limits<std::int64_t>::max()) {
    SessionSystem sys = member(first_bad);
    std::string what;
    check_system(sys, o.fault, &what);
    report.counterexample = what + "\n" + syntax::print_system(sys);
  }
  return report;
}

bool client_complies(const SessionSystem& sys, const ClientNodes& client, StateRef server, bool fair) {
  // Configurations (client node, server state); client index 0 is nil and
  // i + 1 is client[i].
  const std::size_t m = sys.size();
  const std::size_t total = (client.size() + 1) * m;
  const std::size_t labels = sys.alphabet().size();
  static thread_local std::vector<std::uint32_t> order, succ, bounds;
  static thread_local std::vector<std::int8_t> seen, good;
  order.clear();
  succ.clear();
  seen.assign(total, 0);
  good.assign(total, 0);

  auto client_node = [&](std::uint32_t c) -> const Node& { return c == 0 ? sys.node(SessionSystem::kNil) : client[c - 1]; };
  auto success = [&](std::uint32_t id) {
    const Node& r = client_node(static_cast<std::uint32_t>(id / m));
    const Node& t = sys.node(StateRef{static_cast<std::uint32_t>(id % m)});
    if (r.is_nil() || t.is_nil() || r.polarity != Polarity::Out) return false;
    return std::all_of(r.cont.begin(), r.cont.end(), [](StateRef x) { return x == SessionSystem::kNil; });
  };

  // Breadth-first exploration; the successors of order[i] are
  // succ[bounds[i] .. bounds[i + 1]).
  const auto root = static_cast<std::uint32_t>(1 * m + server.index);
  order.push_back(root);
  seen[root] = 1;
  bounds.assign(1, 0);
  for (std::size_t i = 0; i < order.size(); ++i) {
    const std::uint32_t id = order[i];
    const Node& r = client_node(static_cast<std::uint32_t>(id / m));
    const Node& t = sys.node(StateRef{static_cast<std::uint32_t>(id % m)});
    if (!r.is_nil() && !t.is_nil() && r.polarity != t.polarity) {
      for (Label x = 0; x < labels; ++x) {
        StateRef rc = r.cont[x], tc = t.cont[x];
        // The sender needs a non-nil continuation; the receiver may fail.
        if ((t.polarity == Polarity::Out ? tc : rc) == SessionSystem::kNil) continue;
        const auto next = static_cast<std::uint32_t>(rc.index * m + tc.index);
        succ.push_back(next);
        if (!seen[next]) {
          seen[next] = 1;
          order.push_back(next);
        }
      }
    }
    bounds.push_back(static_cast<std::uint32_t>(succ.size()));
  }
  if (!fair) {
    for (std::size_t i = 0; i < order.size(); ++i)
      if (bounds[i] == bounds[i + 1] && !success(order[i])) return false;
    return true;
  }
  // Backward closure of the successful configurations, by iteration: the
  // graphs here have a few dozen nodes.
  for (std::uint32_t id : order) good[id] = success(id) ? 1 : 0;
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (good[order[i]]) continue;
      for (std::uint32_t k = bounds[i]; k < bounds[i + 1]; ++k)
        if (good[succ[k]]) {
          good[order[i]] = 1;
          changed = true;
          break;
        }
    }
  }
  for (std::uint32_t id : order)
    if (!good[id]) return false;
  return true;
}

namespace {

struct Candidate {
  std::uint64_t system;
  SubPair pair;
};

struct PairOutcome {
  std::uint64_t clients = 0;
  std::uint64_t violations = 0;
  std::string problem;
};

PairOutcome check_pair(const SessionSystem& sys, SubPair p, std::size_t client_states, bool fair) {
  PairOutcome out;
  for (std::size_t size = 1; size < client_states; ++size)
    enumerate_strategy_clients(sys, p.left, size, [&](const ClientNodes& nodes) {
      if (!client_complies(sys, nodes, p.left, fair)) return true;
      ++out.clients;
      if (!client_complies(sys, nodes, p.right, fair) && !out.violations++) {
        Extension ext = attach_client(sys, nodes);
        out.problem = std::string(fair ? "fair" : "plain") + " subtyping " + syntax::describe(sys, p.left) +
                      " ⊑ " + syntax::describe(sys, p.right) + " broken by\n" +
                      syntax::print(ext.system, ext.state, "Client") + syntax::print_system(sys);
      }
      return true;
    });
  return out;
}

}  // namespace

SoundnessReport run_subtyping_soundness(const SoundnessOptions& o) {
  SoundnessReport report;
  std::vector<Candidate> fair_pairs, safe_pairs;
  std::vector<SessionSystem> systems;
  std::mt19937_64 pick(o.seed);
  // Bounded so that a pathological configuration cannot loop forever.
  const std::uint64_t max_draws = 1000 * (o.pairs + 1);
  for (std::uint64_t i = 0; i < max_draws && (fair_pairs.size() < o.pairs || safe_pairs.size() < o.pairs); ++i) {
    SessionSystem sys = random_system(o.seed, i, o.max_states, o.labels);
    std::vector<SubPair> pairs;
    for (std::uint32_t a = 1; a < sys.size(); ++a)
      for (std::uint32_t b = 0; b < sys.size(); ++b)
        if (a != b) pairs.push_back({StateRef{a}, StateRef{b}});
    std::shuffle(pairs.begin(), pairs.end(), pick);
    bool took_fair = false, took_safe = false;
    for (SubPair p : pairs) {
      if (!took_fair && fair_pairs.size() < o.pairs && fair_subtyping(sys, p.left, p.right)) {
        fair_pairs.push_back({systems.size(), p});
        took_fair = true;
      }
      if (!took_safe && safe_pairs.size() < o.pairs && subtyping(sys, p.left, p.right)) {
        safe_pairs.push_back({systems.size(), p});
        took_safe = true;
      }
    }
    systems.push_back(std::move(sys));
    ++report.systems_drawn;
  }
  report.fair_pairs = fair_pairs.size();
  report.safe_pairs = safe_pairs.size();

  std::vector<std::pair<const Candidate*, bool>> jobs;
  for (const auto& c : fair_pairs) jobs.push_back({&c, true});
  for (const auto& c : safe_pairs) jobs.push_back({&c, false});
  std::vector<PairOutcome> outcomes(jobs.size());
  const auto n = static_cast<std::int64_t>(jobs.size());
  auto run = [&](std::int64_t i) {
    const auto& [c, fair] = jobs[static_cast<std::size_t>(i)];
    outcomes[static_cast<std::size_t>(i)] = check_pair(systems[c->system], c->pair, o.client_states, fair);
  };
  if (o.parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) run(i);
  } else {
    for (std::int64_t i = 0; i < n; ++i) run(i);
  }
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& r = outcomes[i];
    (jobs[i].second ? report.fair_clients : report.safe_clients) += r.clients;
    (jobs[i].second ? report.fair_violations : report.safe_violations) += r.violations;
    if (r.violations && !report.counterexample) report.counterexample = r.problem;
  }
  return report;
}

}  // namespace fairck
