#pragma once

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fairck/core.hpp"

namespace fairck {

struct Action;
using Trace = std::vector<Action>;

/// A finite derivation; `judgment` is a human-readable rendering.
struct DerivationNode {
  std::uint32_t id = 0;  // judgment id in the instantiated universe
  std::string judgment;
  std::string rule;  // e.g. "c-sync(!true)"
  std::vector<DerivationNode> premises;
};

/// One rule instance whose premises are all in the interpretation: the
/// self-justifying step of a (possibly infinite) coinductive derivation.
struct RuleApplication {
  std::string judgment;
  std::string rule;
  std::vector<std::string> premises;
};

struct DerivationWitness {
  std::optional<DerivationNode> bounding;  // well-founded tree in rules ∪ corules
  std::optional<RuleApplication> root;     // for coinductive membership
};

/// A path of transitions (types) or reductions (sessions, where each action
/// is the server's) ending in the offending judgment.
struct TracePath {
  std::vector<std::string> steps;  // rendered actions
  std::string terminal;
  std::string reason;
};

/// A product node of (T, S) from which some trace of T outside traces(S) is
/// reachable without meeting a node that is closer to convergence.
struct DivergenceWitness {
  StateRef left;
  StateRef right;
  std::string node;
  std::vector<std::string> prefix;  // common trace from the checked root to `node`
  std::vector<std::string> escape;  // from `node`: avoids converging nodes, ends in an action only T has
  std::string note;
};

struct ClientSpec {
  enum class Status { Found, NotFound, Inapplicable };
  Status status = Status::NotFound;
  std::shared_ptr<const SessionSystem> system;  // servers plus the client states
  StateRef root;
  std::string source;  // reparseable .st text, root first
  std::size_t candidates = 0;
  std::string note;
};

using Witness = std::variant<DerivationWitness, TracePath, DivergenceWitness, ClientSpec>;

struct Verdict {
  bool holds = false;
  std::optional<Witness> witness;

  explicit operator bool() const { return holds; }
};

}  // namespace fairck
