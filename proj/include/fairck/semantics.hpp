#pragma once

// Labelled transition semantics of session types, sessions and the
// brute-force semantic oracles. Nothing here depends on the inference engine:
// the oracles are the independent reference the checkers are compared with.

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "fairck/core.hpp"
#include "fairck/verdict.hpp"

namespace fairck {

/// Sorted by label (alphabet order), then polarity with ? before !.
struct Action {
  Polarity polarity = Polarity::In;
  Label label = 0;

  friend bool operator==(const Action&, const Action&) = default;
  friend std::strong_ordering operator<=>(const Action& a, const Action& b) {
    if (auto c = a.label <=> b.label; c != 0) return c;
    return static_cast<int>(a.polarity) <=> static_cast<int>(b.polarity);
  }
};

using Trace = std::vector<Action>;

/// A session: client and server states of the same system.
struct Config {
  StateRef client;
  StateRef server;
  friend auto operator<=>(const Config&, const Config&) = default;
};

std::string to_string(const Alphabet& alphabet, Action a);
std::string to_string(const Alphabet& alphabet, const Trace& t);  // "ε" for the empty trace

constexpr Action co_action(Action a) { return Action{dual(a.polarity), a.label}; }

/// One transition. Inputs are unconditional (the target may be nil); outputs
/// exist only towards non-nil continuations.
std::optional<StateRef> step(const SessionSystem& sys, StateRef s, Action a);

/// Iterated step; nullopt as soon as some step is absent.
std::optional<StateRef> residual(const SessionSystem& sys, StateRef s, const Trace& t);

/// Actions that extend a trace: p x for every x in dom(s).
std::vector<Action> trace_next(const SessionSystem& sys, StateRef s);

bool is_trace(const SessionSystem& sys, StateRef s, const Trace& t);
/// A trace is maximal iff its residual has an empty domain: inputs to nil
/// are transitions but never extend a trace, so for either polarity the
/// residual admits no trace-extending action exactly when dom is empty.
bool is_maximal_trace(const SessionSystem& sys, StateRef s, const Trace& t);

struct InclusionResult {
  bool holds = true;
  Trace counterexample;  // shortest, lexicographically least; empty when holds
};

/// traces(t) ⊆ traces(s), by breadth-first search of the synchronized pair graph.
InclusionResult trace_inclusion(const SessionSystem& sys, StateRef t, StateRef s);

struct Reduction {
  Action action;  // the server's action; the client performs its co-action
  Config target;
};

/// All synchronizations of a session, sorted by action.
std::vector<Reduction> reduce(const SessionSystem& sys, Config c);

struct ConfigGraph {
  struct Edge {
    std::uint32_t from;
    Action action;
    std::uint32_t to;
  };
  std::vector<Config> nodes;  // breadth-first order, nodes[0] is the root
  std::vector<Edge> edges;
  std::vector<std::vector<std::uint32_t>> out;  // edge indices per node
  std::vector<std::int64_t> parent_edge;        // BFS tree, -1 at the root
};

ConfigGraph config_graph(const SessionSystem& sys, Config root);

/// A successful session: the client is end! and the server is not nil.
bool is_success(const SessionSystem& sys, Config c);

std::string describe(const SessionSystem& sys, Config c);

// Witnesses are reduction or transition paths; `with_witness = false` skips
// rendering them.
Verdict oracle_fair_termination(const SessionSystem& sys, StateRef s, bool with_witness = true);
Verdict oracle_compliance(const SessionSystem& sys, Config c, bool with_witness = true);
Verdict oracle_fair_compliance(const SessionSystem& sys, Config c, bool with_witness = true);

}  // namespace fairck

template <>
struct std::hash<fairck::Config> {
  std::size_t operator()(const fairck::Config& c) const noexcept {
    return (static_cast<std::size_t>(c.client.index) << 32) ^ c.server.index;
  }
};
