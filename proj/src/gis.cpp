#include "fairck/gis.hpp"

#include <algorithm>
#include <numeric>

namespace fairck::gis {

std::size_t JudgmentSet::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

bool JudgmentSet::subset_of(const JudgmentSet& other) const {
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i] && !other.bits_[i]) return false;
  return true;
}

std::vector<JudgmentId> JudgmentSet::members() const {
  std::vector<JudgmentId> out;
  for (std::size_t i = 0; i < bits_.size(); ++i)
    if (bits_[i]) out.push_back(static_cast<JudgmentId>(i));
  return out;
}

JudgmentSet set_union(const JudgmentSet& a, const JudgmentSet& b) {
  JudgmentSet out(a.universe_size());
  for (JudgmentId j = 0; j < a.universe_size(); ++j)
    if (a.contains(j) || b.contains(j)) out.insert(j);
  return out;
}

JudgmentSet set_intersection(const JudgmentSet& a, const JudgmentSet& b) {
  JudgmentSet out(a.universe_size());
  for (JudgmentId j = 0; j < a.universe_size(); ++j)
    if (a.contains(j) && b.contains(j)) out.insert(j);
  return out;
}

void RuleSystem::add(JudgmentId conclusion, std::string_view name, std::span<const JudgmentId> premises,
                     std::int32_t tag) {
  by_conclusion_.at(conclusion).push_back(Entry{name, tag, static_cast<std::uint32_t>(premises_.size()),
                                                static_cast<std::uint32_t>(premises.size())});
  premises_.insert(premises_.end(), premises.begin(), premises.end());
}

std::size_t RuleSystem::total_rules() const {
  std::size_t n = 0;
  for (const auto& v : by_conclusion_) n += v.size();
  return n;
}

RuleView RuleSystem::rule(JudgmentId j, std::size_t k) const {
  const Entry& e = by_conclusion_[j][k];
  return RuleView{e.name, e.tag, std::span<const JudgmentId>(premises_.data() + e.begin, e.count)};
}

RuleSystem RuleSystem::merge(const RuleSystem& first, const RuleSystem& second) {
  RuleSystem out(std::max(first.universe_size(), second.universe_size()));
  for (const RuleSystem* rs : {&first, &second})
    for (JudgmentId j = 0; j < rs->universe_size(); ++j)
      for (std::size_t k = 0; k < rs->rule_count(j); ++k) {
        RuleView r = rs->rule(j, k);
        out.add(j, r.name, r.premises, r.tag);
      }
  return out;
}

namespace {

bool premises_in(const RuleView& r, const JudgmentSet& set) {
  return std::all_of(r.premises.begin(), r.premises.end(), [&](JudgmentId p) { return set.contains(p); });
}

}  // namespace

std::optional<std::size_t> supporting_rule(const RuleSystem& rs, const JudgmentSet& set, JudgmentId j) {
  for (std::size_t k = 0; k < rs.rule_count(j); ++k)
    if (premises_in(rs.rule(j, k), set)) return k;
  return std::nullopt;
}

JudgmentSet inf_op(const RuleSystem& rs, const JudgmentSet& x) {
  JudgmentSet out(rs.universe_size());
  for (JudgmentId j = 0; j < rs.universe_size(); ++j)
    if (supporting_rule(rs, x, j)) out.insert(j);
  return out;
}

Fixpoint lfp(const RuleSystem& rs) {
  const std::size_t n = rs.universe_size();
  Fixpoint fp{JudgmentSet(n), std::vector<std::uint32_t>(n, 0), std::vector<std::int32_t>(n, -1), 0};
  while (true) {
    // Each round only sees judgments derived in earlier rounds.
    std::vector<std::pair<JudgmentId, std::size_t>> fired;
    for (JudgmentId j = 0; j < n; ++j) {
      if (fp.members.contains(j)) continue;
      if (auto k = supporting_rule(rs, fp.members, j)) fired.emplace_back(j, *k);
    }
    if (fired.empty()) break;
    ++fp.rounds;
    for (auto [j, k] : fired) {
      fp.members.insert(j);
      fp.round[j] = fp.rounds;
      fp.justification[j] = static_cast<std::int32_t>(k);
    }
  }
  return fp;
}

Fixpoint gen_within(const RuleSystem& rules, const JudgmentSet& bound) {
  const std::size_t n = rules.universe_size();
  Fixpoint fp{bound, std::vector<std::uint32_t>(n, 0), std::vector<std::int32_t>(n, -1), 0};
  while (true) {
    std::vector<JudgmentId> dropped;
    for (JudgmentId j = 0; j < n; ++j)
      if (fp.members.contains(j) && !supporting_rule(rules, fp.members, j)) dropped.push_back(j);
    if (dropped.empty()) break;
    ++fp.rounds;
    for (JudgmentId j : dropped) {
      fp.members.erase(j);
      fp.round[j] = fp.rounds;
    }
  }
  return fp;
}

Fixpoint gfp(const RuleSystem& rs) { return gen_within(rs, JudgmentSet(rs.universe_size(), true)); }

Generalized gen(const RuleSystem& rules, const RuleSystem& corules) {
  Generalized g;
  g.bound = lfp(RuleSystem::merge(corules, rules));
  g.result = gen_within(rules, g.bound.members);
  return g;
}

BoundedCheck check_bounded_coinduction(const RuleSystem& rules, const RuleSystem& corules,
                                       const JudgmentSet& candidate) {
  Fixpoint bound = lfp(RuleSystem::merge(corules, rules));
  for (JudgmentId j : candidate.members())
    if (!bound.members.contains(j)) return {false, BoundedCheck::Failure::Unbounded, j};
  for (JudgmentId j : candidate.members())
    if (!supporting_rule(rules, candidate, j)) return {false, BoundedCheck::Failure::Inconsistent, j};
  return {};
}

std::optional<Derivation> derivation(const RuleSystem& rs, const Fixpoint& least, JudgmentId j) {
  if (!least.members.contains(j) || least.justification[j] < 0) return std::nullopt;
  RuleView r = rs.rule(j, static_cast<std::size_t>(least.justification[j]));
  Derivation d{j, r.name, r.tag, {}};
  for (JudgmentId p : r.premises) d.premises.push_back(*derivation(rs, least, p));
  return d;
}

}  // namespace fairck::gis
