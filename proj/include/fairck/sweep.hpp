#pragma once

// Generated session systems and the oracle-equivalence sweeps over them.
// Every sweep has a serial and an OpenMP variant that produce identical
// reports; the serial one is the reference.

#include <cstdint>
#include <optional>
#include <string>

#include "fairck/core.hpp"
#include "fairck/witness.hpp"

namespace fairck {

/// Systems with `branches` branch states over `labels` labels: each state
/// picks a polarity and a continuation (nil or a branch) for every label.
/// Branch states are named Q1..Qk.
std::uint64_t exhaustive_count(std::size_t branches, std::size_t labels);
SessionSystem exhaustive_system(std::uint64_t index, std::size_t branches, std::size_t labels);

/// Every system with at most `max_states` states, nil included.
std::uint64_t exhaustive_family_size(std::size_t max_states, std::size_t labels);
SessionSystem exhaustive_family_member(std::uint64_t index, std::size_t max_states, std::size_t labels);

/// A random system with between 1 and max_states states, nil included. The
/// result depends only on (seed, index).
SessionSystem random_system(std::uint64_t seed, std::uint64_t index, std::size_t max_states, std::size_t labels);

enum class Fault {
  None,
  // Test-only: fair compliance ignores its corules, i.e. degrades to
  // compliance. The sweeps must notice.
  DropSyncCorules,
};

struct SystemTally {
  std::uint64_t states = 0;
  std::uint64_t configs = 0;
  std::uint64_t termination_mismatches = 0;
  std::uint64_t compliance_mismatches = 0;
  std::uint64_t fair_compliance_mismatches = 0;
  std::uint64_t fair_not_safe = 0;       // fair compliance without compliance
  std::uint64_t inclusion_violations = 0;

  std::uint64_t problems() const {
    return termination_mismatches + compliance_mismatches + fair_compliance_mismatches + fair_not_safe +
           inclusion_violations;
  }
  SystemTally& operator+=(const SystemTally& o);
  friend bool operator==(const SystemTally&, const SystemTally&) = default;
};

/// Every state against the termination oracle and every ordered pair of
/// states against the compliance oracles, plus the generalized-interpretation
/// inclusions of every instantiation. `first_problem` receives a description
/// of the first discrepancy when given.
SystemTally check_system(const SessionSystem& sys, Fault fault = Fault::None,
                         std::string* first_problem = nullptr);

struct SelftestOptions {
  std::uint64_t seed = 42;
  std::size_t max_states = 4;  // exhaustive family, nil included
  std::size_t labels = 2;
  std::size_t random_count = 500;
  std::size_t random_max_states = 8;
  std::size_t random_labels = 3;
  bool parallel = true;
  Fault fault = Fault::None;
};

struct SelftestReport {
  std::uint64_t exhaustive_systems = 0;
  std::uint64_t random_systems = 0;
  SystemTally tally;
  // The first offending system in enumeration order and what went wrong.
  std::optional<std::string> counterexample;

  bool passed() const { return tally.problems() == 0; }
  friend bool operator==(const SelftestReport&, const SelftestReport&) = default;
};

SelftestReport run_selftest(const SelftestOptions& options);

/// Compliance (or fair compliance) of a strategy client with a server of
/// `sys`, decided by reachability on the client nodes directly rather than
/// on an extended system. Agrees with the oracles on attach_client.
bool client_complies(const SessionSystem& sys, const ClientNodes& client, StateRef server, bool fair);

struct SoundnessOptions {
  std::uint64_t seed = 7;
  std::size_t pairs = 200;        // pairs to collect for each relation
  std::size_t client_states = 6;  // largest strategy client, nil included
  std::size_t max_states = 4;
  std::size_t labels = 2;
  bool parallel = true;
};

struct SoundnessReport {
  std::uint64_t fair_pairs = 0;
  std::uint64_t safe_pairs = 0;
  std::uint64_t fair_clients = 0;   // clients fairly compliant with the subtype
  std::uint64_t safe_clients = 0;
  std::uint64_t fair_violations = 0;
  std::uint64_t safe_violations = 0;
  std::uint64_t systems_drawn = 0;
  std::optional<std::string> counterexample;

  bool passed() const { return fair_violations == 0 && safe_violations == 0; }
  friend bool operator==(const SoundnessReport&, const SoundnessReport&) = default;
};

/// Draws non-trivial pairs T ≠ S with T not nil from random systems, keeps
/// those related by fair subtyping (resp. subtyping) and checks that every
/// strategy client of T that is fairly compliant (resp. compliant) with T is
/// so with S.
SoundnessReport run_subtyping_soundness(const SoundnessOptions& options);

}  // namespace fairck
