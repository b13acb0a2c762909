#pragma once

// The three inference systems instantiated over premise-closed universes, and
// the convergence procedure that bounds fair subtyping.

#include <cstdint>
#include <vector>

#include "fairck/core.hpp"
#include "fairck/gis.hpp"
#include "fairck/semantics.hpp"
#include "fairck/verdict.hpp"

namespace fairck {

/// A subtyping judgment T ⊑ S.
struct SubPair {
  StateRef left;
  StateRef right;
  friend auto operator<=>(const SubPair&, const SubPair&) = default;
};

}  // namespace fairck

template <>
struct std::hash<fairck::SubPair> {
  std::size_t operator()(const fairck::SubPair& p) const noexcept {
    return (static_cast<std::size_t>(p.left.index) << 32) ^ p.right.index;
  }
};

namespace fairck {

struct TermInstance {
  gis::Universe<StateRef> universe;
  gis::RuleSystem rules;    // t-nil, t-all
  gis::RuleSystem corules;  // t-any, tag = label
  gis::JudgmentId root = 0;
};

struct CompInstance {
  gis::Universe<Config> universe;
  gis::RuleSystem rules;    // c-success, c-inp-out, c-out-inp
  gis::RuleSystem corules;  // c-sync, tag = index of the client's action (see sync_action)
  gis::JudgmentId root = 0;
};

TermInstance instantiate_termination(const SessionSystem& sys, StateRef root);
CompInstance instantiate_compliance(const SessionSystem& sys, Config root);

/// Decodes the tag of a c-sync instance into the action the client performs.
Action sync_action(std::int32_t tag);

/// Pairs of non-nil residuals of T and S after their common traces.
struct ProductGraph {
  struct Edge {
    std::uint32_t from;
    Action action;
    std::uint32_t to;
  };
  std::vector<SubPair> nodes;  // breadth-first, nodes[0] = root
  std::vector<Edge> edges;     // per node, sorted by action
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::vector<Action>> escapes;  // trace_next(t) \ trace_next(s)
  std::vector<std::int64_t> parent_edge;
};

/// Product graph of a pair with two non-nil components.
ProductGraph product_graph(const SessionSystem& sys, SubPair root);

struct Convergence {
  ProductGraph graph;
  // Round in which a node joined the converging set (0 for nodes that reach
  // no escape at all), -1 for nodes that never join.
  std::vector<std::int32_t> level;
  // Nodes with a shared output leading into the final converging set.
  std::vector<bool> good;
  // Per converging node, the premises of one s-converge instance concluding
  // it: for every first Good node met on the way to an escape, a successor
  // one level down. Empty at level 0.
  std::vector<std::vector<std::uint32_t>> premises;
  std::uint32_t rounds = 0;
  bool root_converges = false;
};

/// Decides the s-converge corule on regular types. A pair whose left side
/// is nil converges; a non-nil type never converges to nil.
Convergence convergence(const SessionSystem& sys, SubPair root);

struct SubInstance {
  gis::Universe<SubPair> universe;  // the product nodes plus the root
  gis::RuleSystem rules;            // s-nil, s-end, s-inp, s-out
  gis::RuleSystem corules;          // materialized s-converge instances
  gis::JudgmentSet bound;           // converging pairs and axiom conclusions
  Convergence convergence;
  gis::JudgmentId root = 0;
};

SubInstance instantiate_subtyping(const SessionSystem& sys, SubPair root);

/// result ⊆ gfp(rules) and result ⊆ lfp(rules ∪ corules).
bool generalized_inclusions_hold(const gis::RuleSystem& rules, const gis::RuleSystem& corules,
                                 const gis::JudgmentSet& result);

// Plain verdicts without witnesses; see witness.hpp for explanations.
bool fair_termination(const SessionSystem& sys, StateRef s);
bool compliance(const SessionSystem& sys, Config c);
bool fair_compliance(const SessionSystem& sys, Config c);
bool subtyping(const SessionSystem& sys, StateRef t, StateRef s);
bool converges(const SessionSystem& sys, StateRef t, StateRef s);
bool fair_subtyping(const SessionSystem& sys, StateRef t, StateRef s);

}  // namespace fairck
