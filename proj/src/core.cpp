#include "fairck/core.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <utility>

namespace fairck {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Syntax: return "SyntaxError";
    case ErrorKind::DuplicateTypeName: return "DuplicateTypeName";
    case ErrorKind::DuplicateAlphabetLabel: return "DuplicateAlphabetLabel";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::UndefinedTypeName: return "UndefinedTypeName";
    case ErrorKind::UnknownTypeName: return "UnknownTypeName";
    case ErrorKind::UnguardedRecursion: return "UnguardedRecursion";
    case ErrorKind::PolarityMismatch: return "PolarityMismatch";
    case ErrorKind::OverlappingLabels: return "OverlappingLabels";
    case ErrorKind::InvalidSystem: return "InvalidSystem";
  }
  return "Error";
}

Error::Error(ErrorKind kind, const std::string& message, int line, int column)
    : std::runtime_error(message), kind_(kind), line_(line), column_(column) {}

Alphabet::Alphabet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw Error(ErrorKind::InvalidSystem, "alphabet must not be empty");
  for (Label i = 0; i < labels_.size(); ++i) {
    if (!index_.emplace(labels_[i], i).second)
      throw Error(ErrorKind::DuplicateAlphabetLabel, "duplicate alphabet label '" + labels_[i] + "'");
  }
}

std::optional<Label> Alphabet::find(std::string_view name) const {
  auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SessionSystem::SessionSystem(std::shared_ptr<const Alphabet> alphabet, std::vector<Node> states,
                             std::vector<NamedState> names)
    : alphabet_(std::move(alphabet)), states_(std::move(states)), names_(std::move(names)) {
  if (!alphabet_) throw Error(ErrorKind::InvalidSystem, "missing alphabet");
  if (states_.empty() || !states_[0].is_nil())
    throw Error(ErrorKind::InvalidSystem, "state 0 must be the canonical nil");
  for (std::size_t i = 0; i < states_.size(); ++i) {
    const Node& n = states_[i];
    if (n.is_nil()) {
      if (i != 0) throw Error(ErrorKind::InvalidSystem, "more than one nil state");
      if (!n.cont.empty()) throw Error(ErrorKind::InvalidSystem, "nil with continuations");
      continue;
    }
    if (n.cont.size() != alphabet_->size())
      throw Error(ErrorKind::InvalidSystem, "partial continuation map at state " + std::to_string(i));
    for (StateRef t : n.cont)
      if (!valid(t)) throw Error(ErrorKind::InvalidSystem, "dangling reference at state " + std::to_string(i));
  }
  for (const auto& n : names_)
    if (!valid(n.state)) throw Error(ErrorKind::InvalidSystem, "dangling name '" + n.name + "'");
}

std::optional<StateRef> SessionSystem::lookup(std::string_view name) const {
  for (const auto& n : names_)
    if (n.name == name) return n.state;
  return std::nullopt;
}

StateRef SessionSystem::resolve(std::string_view name) const {
  if (auto s = lookup(name)) return *s;
  throw Error(ErrorKind::UnknownTypeName, "unknown type name '" + std::string(name) + "'");
}

const std::string* SessionSystem::name_of(StateRef s) const {
  for (const auto& n : names_)
    if (n.state == s) return &n.name;
  return nullptr;
}

SessionSystem SessionSystem::extended(std::vector<Node> extra, std::vector<NamedState> extra_names) const {
  std::vector<Node> states = states_;
  states.insert(states.end(), std::make_move_iterator(extra.begin()), std::make_move_iterator(extra.end()));
  std::vector<NamedState> names = names_;
  names.insert(names.end(), extra_names.begin(), extra_names.end());
  return SessionSystem(alphabet_, std::move(states), std::move(names));
}

SystemBuilder::SystemBuilder(std::shared_ptr<const Alphabet> alphabet) : alphabet_(std::move(alphabet)) {
  nodes_.push_back(Node::nil());
  assigned_.push_back(true);
}

StateRef SystemBuilder::reserve() {
  nodes_.push_back(Node::nil());
  assigned_.push_back(false);
  return StateRef{static_cast<std::uint32_t>(nodes_.size() - 1)};
}

StateRef SystemBuilder::add(Node node) {
  StateRef s = reserve();
  set(s, std::move(node));
  return s;
}

void SystemBuilder::set(StateRef s, Node node) {
  if (s.index == 0) throw Error(ErrorKind::InvalidSystem, "the canonical nil state is fixed");
  nodes_.at(s.index) = std::move(node);
  assigned_.at(s.index) = true;
}

void SystemBuilder::name(std::string name, StateRef s) { names_.push_back({std::move(name), s}); }

SessionSystem SystemBuilder::build(bool prune) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (!assigned_[i]) throw Error(ErrorKind::InvalidSystem, "state " + std::to_string(i) + " never defined");

  // Nil aliasing: every Nil node collapses onto index 0.
  auto canon = [&](StateRef s) { return nodes_[s.index].is_nil() ? SessionSystem::kNil : s; };

  std::vector<std::uint32_t> order;
  std::vector<std::int64_t> renumber(nodes_.size(), -1);
  renumber[0] = 0;
  order.push_back(0);
  if (prune) {
    std::deque<StateRef> queue;
    auto visit = [&](StateRef s) {
      s = canon(s);
      if (renumber[s.index] >= 0) return;
      renumber[s.index] = static_cast<std::int64_t>(order.size());
      order.push_back(s.index);
      queue.push_back(s);
    };
    for (const auto& n : names_) visit(n.state);
    while (!queue.empty()) {
      StateRef s = queue.front();
      queue.pop_front();
      for (StateRef t : nodes_[s.index].cont) visit(t);
    }
  } else {
    for (std::uint32_t i = 1; i < nodes_.size(); ++i) {
      if (nodes_[i].is_nil()) continue;
      renumber[i] = static_cast<std::int64_t>(order.size());
      order.push_back(i);
    }
  }

  auto map = [&](StateRef s) { return StateRef{static_cast<std::uint32_t>(renumber[canon(s).index])}; };
  std::vector<Node> states;
  states.reserve(order.size());
  for (std::uint32_t i : order) {
    Node n = nodes_[i];
    for (StateRef& t : n.cont) t = map(t);
    states.push_back(std::move(n));
  }
  std::vector<NamedState> names;
  for (const auto& n : names_) names.push_back({n.name, map(n.state)});
  return SessionSystem(alphabet_, std::move(states), std::move(names));
}

std::vector<Label> dom(const SessionSystem& sys, StateRef s) {
  std::vector<Label> out;
  const Node& n = sys.node(s);
  for (Label x = 0; x < n.cont.size(); ++x)
    if (n.cont[x] != SessionSystem::kNil) out.push_back(x);
  return out;
}

bool is_defined(const SessionSystem& sys, StateRef s) { return !sys.node(s).is_nil(); }

bool is_win(const SessionSystem& sys, StateRef s) {
  const Node& n = sys.node(s);
  if (n.is_nil() || n.polarity != Polarity::Out) return false;
  return std::all_of(n.cont.begin(), n.cont.end(), [](StateRef t) { return t == SessionSystem::kNil; });
}

Node plus(const Alphabet& alphabet, const Node& a, const Node& b) {
  if (a.is_nil() || b.is_nil())
    throw Error(ErrorKind::PolarityMismatch, "'+' is undefined on nil");
  if (a.polarity != b.polarity)
    throw Error(ErrorKind::PolarityMismatch, "'+' of an input and an output branch");
  Node out = a;
  for (Label x = 0; x < alphabet.size(); ++x) {
    if (b.cont[x] == SessionSystem::kNil) continue;
    if (a.cont[x] != SessionSystem::kNil)
      throw Error(ErrorKind::OverlappingLabels, "label '" + alphabet.name(x) + "' occurs in both operands of '+'");
    out.cont[x] = b.cont[x];
  }
  return out;
}

Extension plus(const SessionSystem& sys, StateRef a, StateRef b) {
  Node merged = plus(sys.alphabet(), sys.node(a), sys.node(b));
  StateRef fresh{static_cast<std::uint32_t>(sys.size())};
  return Extension{sys.extended({std::move(merged)}), fresh};
}

bool bisimilar(const SessionSystem& left, StateRef a, const SessionSystem& right, StateRef b) {
  if (!(left.alphabet() == right.alphabet())) return false;
  // Deterministic automata: bisimilar iff no reachable pair disagrees locally.
  std::set<std::pair<std::uint32_t, std::uint32_t>> seen;
  std::vector<std::pair<StateRef, StateRef>> stack{{a, b}};
  while (!stack.empty()) {
    auto [s, t] = stack.back();
    stack.pop_back();
    if (!seen.emplace(s.index, t.index).second) continue;
    const Node& ns = left.node(s);
    const Node& nt = right.node(t);
    if (ns.kind != nt.kind) return false;
    if (ns.is_nil()) continue;
    if (ns.polarity != nt.polarity) return false;
    for (std::size_t x = 0; x < ns.cont.size(); ++x) stack.emplace_back(ns.cont[x], nt.cont[x]);
  }
  return true;
}

bool bisimilar(const SessionSystem& sys, StateRef a, StateRef b) { return bisimilar(sys, a, sys, b); }

std::vector<StateRef> reachable(const SessionSystem& sys, const std::vector<StateRef>& roots) {
  std::vector<bool> seen(sys.size(), false);
  std::vector<StateRef> stack;
  for (StateRef r : roots) {
    if (!seen[r.index]) {
      seen[r.index] = true;
      stack.push_back(r);
    }
  }
  while (!stack.empty()) {
    StateRef s = stack.back();
    stack.pop_back();
    for (StateRef t : sys.node(s).cont) {
      if (!seen[t.index]) {
        seen[t.index] = true;
        stack.push_back(t);
      }
    }
  }
  std::vector<StateRef> out;
  for (std::uint32_t i = 0; i < seen.size(); ++i)
    if (seen[i]) out.push_back(StateRef{i});
  return out;
}

}  // namespace fairck
