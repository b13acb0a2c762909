#pragma once

// Regular session types as finite deterministic automata.
//
// A SessionSystem is an immutable table of states over a finite alphabet of
// message classes. Every state is either the unusable type `nil` or a
// polarized branch that maps *every* label to a continuation state. Absent
// labels in the surface syntax map to the canonical nil state, which always
// lives at index 0.

#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fairck {

enum class ErrorKind {
  Io,
  Syntax,
  DuplicateTypeName,
  DuplicateAlphabetLabel,
  UnknownLabel,
  UndefinedTypeName,
  UnknownTypeName,
  UnguardedRecursion,
  PolarityMismatch,
  OverlappingLabels,
  InvalidSystem,
};

std::string_view to_string(ErrorKind kind);

/// Every user-facing failure of the library. Line and column are 1-based and
/// zero when the error has no source position.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message, int line = 0, int column = 0);

  ErrorKind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  ErrorKind kind_;
  int line_;
  int column_;
};

enum class Polarity : std::uint8_t { In, Out };

constexpr Polarity dual(Polarity p) { return p == Polarity::In ? Polarity::Out : Polarity::In; }
constexpr char symbol(Polarity p) { return p == Polarity::In ? '?' : '!'; }

/// Index of a label in its alphabet's declaration order.
using Label = std::uint32_t;

/// The finite set of message classes. Iteration order is declaration order.
class Alphabet {
 public:
  /// Throws DuplicateAlphabetLabel or InvalidSystem (empty alphabet).
  explicit Alphabet(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  const std::string& name(Label x) const { return labels_.at(x); }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<Label> find(std::string_view name) const;

  friend bool operator==(const Alphabet& a, const Alphabet& b) { return a.labels_ == b.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Label> index_;
};

struct StateRef {
  std::uint32_t index = 0;
  friend auto operator<=>(const StateRef&, const StateRef&) = default;
};

struct Node {
  enum class Kind : std::uint8_t { Nil, Branch };

  Kind kind = Kind::Nil;
  Polarity polarity = Polarity::Out;  // meaningless for Nil
  std::vector<StateRef> cont;         // one entry per label for a Branch, empty for Nil

  static Node nil() { return Node{}; }
  static Node branch(Polarity p, std::vector<StateRef> cont) {
    return Node{Kind::Branch, p, std::move(cont)};
  }

  bool is_nil() const { return kind == Kind::Nil; }
  friend bool operator==(const Node&, const Node&) = default;
};

struct NamedState {
  std::string name;
  StateRef state;
};

class SessionSystem {
 public:
  static constexpr StateRef kNil{0};

  /// Validates the structural invariants: state 0 is the only Nil state,
  /// every Branch has a total continuation map and every reference is in
  /// range. Throws Error(InvalidSystem) otherwise.
  SessionSystem(std::shared_ptr<const Alphabet> alphabet, std::vector<Node> states,
                std::vector<NamedState> names = {});

  const Alphabet& alphabet() const { return *alphabet_; }
  const std::shared_ptr<const Alphabet>& alphabet_ptr() const { return alphabet_; }
  std::size_t size() const { return states_.size(); }
  const Node& node(StateRef s) const { return states_[s.index]; }
  const std::vector<Node>& states() const { return states_; }
  const std::vector<NamedState>& names() const { return names_; }
  bool valid(StateRef s) const { return s.index < states_.size(); }

  std::optional<StateRef> lookup(std::string_view name) const;
  /// Like lookup, but throws Error(UnknownTypeName).
  StateRef resolve(std::string_view name) const;
  /// First declared name of `s`, if any.
  const std::string* name_of(StateRef s) const;

  /// A new system with `extra` appended after the existing states. Nodes in
  /// `extra` may refer to each other by their final indices.
  SessionSystem extended(std::vector<Node> extra, std::vector<NamedState> extra_names = {}) const;

 private:
  std::shared_ptr<const Alphabet> alphabet_;
  std::vector<Node> states_;
  std::vector<NamedState> names_;
};

/// Incremental construction of a SessionSystem with arbitrary Nil nodes;
/// build() aliases every Nil to the canonical state 0.
class SystemBuilder {
 public:
  explicit SystemBuilder(std::shared_ptr<const Alphabet> alphabet);

  StateRef nil() const { return SessionSystem::kNil; }
  StateRef reserve();
  StateRef add(Node node);
  void set(StateRef s, Node node);
  const Node& node(StateRef s) const { return nodes_.at(s.index); }
  void name(std::string name, StateRef s);
  const Alphabet& alphabet() const { return *alphabet_; }
  std::size_t size() const { return nodes_.size(); }

  /// With `prune`, states unreachable from the named roots are dropped and
  /// the remaining ones are numbered in breadth-first order from the roots.
  SessionSystem build(bool prune) const;

 private:
  std::shared_ptr<const Alphabet> alphabet_;
  std::vector<Node> nodes_;
  std::vector<bool> assigned_;
  std::vector<NamedState> names_;
};

// --- structural operations -------------------------------------------------

std::vector<Label> dom(const SessionSystem& sys, StateRef s);
bool is_defined(const SessionSystem& sys, StateRef s);
/// end!: an output branch with empty domain.
bool is_win(const SessionSystem& sys, StateRef s);

/// Node-level `+`: merges two same-polarity branches with disjoint domains.
/// Throws PolarityMismatch or OverlappingLabels.
Node plus(const Alphabet& alphabet, const Node& a, const Node& b);

struct Extension {
  SessionSystem system;
  StateRef state;
};

/// `+` on states of a system; the result lives in an extended copy.
Extension plus(const SessionSystem& sys, StateRef a, StateRef b);

/// Equality of the unfolded trees, decided by coinductive pair closure.
bool bisimilar(const SessionSystem& sys, StateRef a, StateRef b);
/// Cross-system variant; false when the alphabets differ.
bool bisimilar(const SessionSystem& left, StateRef a, const SessionSystem& right, StateRef b);

/// Least set containing `roots` and closed under continuation edges,
/// including edges to nil. Sorted by index.
std::vector<StateRef> reachable(const SessionSystem& sys, const std::vector<StateRef>& roots);

}  // namespace fairck

template <>
struct std::hash<fairck::StateRef> {
  std::size_t operator()(fairck::StateRef s) const noexcept { return s.index; }
};
