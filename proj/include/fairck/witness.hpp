#pragma once

// Verdicts with evidence: derivations when a judgment holds, counterexample
// paths or divergence witnesses when it fails, and the search for clients
// that separate subtyping from fair subtyping.

#include <cstddef>
#include <functional>
#include <vector>

#include "fairck/checkers.hpp"
#include "fairck/verdict.hpp"

namespace fairck {

Verdict explain_fair_termination(const SessionSystem& sys, StateRef s);
Verdict explain_compliance(const SessionSystem& sys, Config c);
Verdict explain_fair_compliance(const SessionSystem& sys, Config c);
Verdict explain_subtyping(const SessionSystem& sys, StateRef t, StateRef s);
Verdict explain_converges(const SessionSystem& sys, StateRef t, StateRef s);
Verdict explain_fair_subtyping(const SessionSystem& sys, StateRef t, StateRef s);

// --- strategy clients ------------------------------------------------------
//
// A strategy client for a server T is a finite client whose every state
// follows a state u of T: it either stops (end!), or, when u receives on a
// non-empty domain, sends a non-empty subset of it, or, when u sends on a
// non-empty domain, receives exactly that domain. Clients are numbered in
// creation order and enumerated canonically.

/// Client nodes with local references: 0 is nil, i + 1 is client node i.
using ClientNodes = std::vector<Node>;

/// Visits every canonical strategy client for t with exactly `size` nodes
/// until `visit` returns false. Returns false if it was stopped.
bool enumerate_strategy_clients(const SessionSystem& sys, StateRef t, std::size_t size,
                                const std::function<bool(const ClientNodes&)>& visit);

/// Appends the client to the system; the result's state is the client root.
Extension attach_client(const SessionSystem& sys, const ClientNodes& client);

struct SynthOptions {
  std::size_t budget = 64;             // largest client size tried
  std::size_t max_candidates = 200000; // total candidates examined before giving up
  bool parallel = true;
};

/// A client fairly compliant with t and not with s, or Inapplicable when
/// subtyping fails or fair subtyping holds, or NotFound when the search is
/// exhausted. Found clients are re-verified before being returned, and the
/// result does not depend on `parallel`.
ClientSpec synth_discriminating_client(const SessionSystem& sys, StateRef t, StateRef s,
                                       const SynthOptions& options = {});

}  // namespace fairck
