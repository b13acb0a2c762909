#pragma once

// Generalized inference systems over finite universes.
//
// A judgment is an index into a finite universe. A RuleSystem lists, for each
// conclusion, its rule instances (name, optional tag, finite premises). The
// inductive, coinductive and generalized interpretations are computed by
// round-based Kleene iteration, so that every judgment of a least fixed point
// carries a minimal-depth justification.

#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fairck::gis {

using JudgmentId = std::uint32_t;

class JudgmentSet {
 public:
  JudgmentSet() = default;
  explicit JudgmentSet(std::size_t universe_size, bool full = false)
      : bits_(universe_size, full ? 1 : 0) {}

  std::size_t universe_size() const { return bits_.size(); }
  bool contains(JudgmentId j) const { return bits_[j] != 0; }
  void insert(JudgmentId j) { bits_[j] = 1; }
  void erase(JudgmentId j) { bits_[j] = 0; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  bool subset_of(const JudgmentSet& other) const;
  std::vector<JudgmentId> members() const;

  friend bool operator==(const JudgmentSet&, const JudgmentSet&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

JudgmentSet set_union(const JudgmentSet& a, const JudgmentSet& b);
JudgmentSet set_intersection(const JudgmentSet& a, const JudgmentSet& b);

struct RuleView {
  std::string_view name;
  std::int32_t tag;  // free for the instantiation, -1 when unused
  std::span<const JudgmentId> premises;
};

/// Rule instances indexed by conclusion. Rule names are not copied: pass
/// string literals or storage that outlives the system.
class RuleSystem {
 public:
  explicit RuleSystem(std::size_t universe_size = 0) : by_conclusion_(universe_size) {}

  void resize(std::size_t universe_size) { by_conclusion_.resize(universe_size); }
  void add(JudgmentId conclusion, std::string_view name, std::span<const JudgmentId> premises,
           std::int32_t tag = -1);
  void add(JudgmentId conclusion, std::string_view name, std::initializer_list<JudgmentId> premises,
           std::int32_t tag = -1) {
    add(conclusion, name, std::span<const JudgmentId>(premises.begin(), premises.size()), tag);
  }

  std::size_t universe_size() const { return by_conclusion_.size(); }
  std::size_t rule_count(JudgmentId j) const { return by_conclusion_[j].size(); }
  std::size_t total_rules() const;
  RuleView rule(JudgmentId j, std::size_t k) const;

  /// Instances of `first` precede those of `second` for every conclusion.
  static RuleSystem merge(const RuleSystem& first, const RuleSystem& second);

 private:
  struct Entry {
    std::string_view name;
    std::int32_t tag;
    std::uint32_t begin;
    std::uint32_t count;
  };
  std::vector<std::vector<Entry>> by_conclusion_;
  std::vector<JudgmentId> premises_;
};

struct Fixpoint {
  JudgmentSet members;
  // Least fixed points: the round (1-based) in which a judgment entered and
  // the index of the first rule that fired then. Greatest fixed points: the
  // round in which a judgment was removed (0 if it stayed), no rule.
  std::vector<std::uint32_t> round;
  std::vector<std::int32_t> justification;
  std::uint32_t rounds = 0;
};

/// One-step derivability: conclusions of instances whose premises lie in X.
JudgmentSet inf_op(const RuleSystem& rs, const JudgmentSet& x);

Fixpoint lfp(const RuleSystem& rs);
Fixpoint gfp(const RuleSystem& rs);
/// Greatest post-fixed point of the rules contained in `bound`.
Fixpoint gen_within(const RuleSystem& rules, const JudgmentSet& bound);

struct Generalized {
  Fixpoint bound;   // lfp(corules ∪ rules)
  Fixpoint result;  // gen_within(rules, bound.members)
};

/// Generalized interpretation. The bound is computed on corules ∪ rules
/// with corule instances first, so bounding derivations prefer corules.
Generalized gen(const RuleSystem& rules, const RuleSystem& corules);

struct BoundedCheck {
  enum class Failure { None, Unbounded, Inconsistent };
  bool holds = true;
  Failure failure = Failure::None;
  std::optional<JudgmentId> violation;
};

/// candidate ⊆ lfp(rules ∪ corules) and candidate ⊆ inf_op(rules, candidate),
/// which together give candidate ⊆ gen(rules, corules).
BoundedCheck check_bounded_coinduction(const RuleSystem& rules, const RuleSystem& corules,
                                       const JudgmentSet& candidate);

/// Index of the first instance concluding j whose premises lie in `set`.
std::optional<std::size_t> supporting_rule(const RuleSystem& rs, const JudgmentSet& set, JudgmentId j);

struct Derivation {
  JudgmentId judgment;
  std::string_view rule;
  std::int32_t tag;
  std::vector<Derivation> premises;
};

/// The minimal-depth well-founded derivation of j recorded by an lfp run.
std::optional<Derivation> derivation(const RuleSystem& rs, const Fixpoint& least, JudgmentId j);

/// Interns judgments of type J; ids follow insertion order.
template <class J, class Hash = std::hash<J>>
class Universe {
 public:
  std::pair<JudgmentId, bool> intern(const J& j) {
    auto [it, fresh] = index_.emplace(j, static_cast<JudgmentId>(items_.size()));
    if (fresh) items_.push_back(j);
    return {it->second, fresh};
  }
  std::optional<JudgmentId> find(const J& j) const {
    auto it = index_.find(j);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  const J& operator[](JudgmentId id) const { return items_[id]; }
  std::size_t size() const { return items_.size(); }
  const std::vector<J>& items() const { return items_; }

 private:
  std::vector<J> items_;
  std::unordered_map<J, JudgmentId, Hash> index_;
};

}  // namespace fairck::gis
