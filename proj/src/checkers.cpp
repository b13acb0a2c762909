#include "fairck/checkers.hpp"

#include <algorithm>
#include <unordered_map>

namespace fairck {

using gis::JudgmentId;
using gis::JudgmentSet;
using gis::RuleSystem;

// --- fair termination --------------------------------------------------------

TermInstance instantiate_termination(const SessionSystem& sys, StateRef root) {
  TermInstance in;
  in.root = in.universe.intern(root).first;
  for (JudgmentId j = 0; j < in.universe.size(); ++j) {
    const Node& n = sys.node(in.universe[j]);
    for (StateRef c : n.cont) in.universe.intern(c);
  }
  in.rules.resize(in.universe.size());
  in.corules.resize(in.universe.size());
  std::vector<JudgmentId> prem;
  for (JudgmentId j = 0; j < in.universe.size(); ++j) {
    StateRef s = in.universe[j];
    const Node& n = sys.node(s);
    if (n.is_nil()) {
      in.rules.add(j, "t-nil", {});
      continue;
    }
    prem.clear();
    for (StateRef c : n.cont) prem.push_back(*in.universe.find(c));
    in.rules.add(j, "t-all", prem);
    for (Label x : dom(sys, s))
      in.corules.add(j, "t-any", {*in.universe.find(n.cont[x])}, static_cast<std::int32_t>(x));
  }
  return in;
}

// --- compliance --------------------------------------------------------------

Action sync_action(std::int32_t tag) {
  return Action{(tag & 1) ? Polarity::Out : Polarity::In, static_cast<Label>(tag >> 1)};
}

namespace {

std::int32_t sync_tag(Action client) {
  return static_cast<std::int32_t>(client.label) * 2 + (client.polarity == Polarity::Out ? 1 : 0);
}

// The labels exchanged by a client-server pair in which exactly one side
// sends: the sender's domain.
struct Exchange {
  bool client_sends;
  std::vector<Label> labels;
};

std::optional<Exchange> exchange(const SessionSystem& sys, Config c) {
  const Node& r = sys.node(c.client);
  const Node& t = sys.node(c.server);
  if (r.is_nil() || t.is_nil() || r.polarity == t.polarity) return std::nullopt;
  bool client_sends = r.polarity == Polarity::Out;
  return Exchange{client_sends, dom(sys, client_sends ? c.client : c.server)};
}

}  // namespace

CompInstance instantiate_compliance(const SessionSystem& sys, Config root) {
  CompInstance in;
  in.root = in.universe.intern(root).first;
  // Rule and corule premises coincide: one per label the sender can send.
  for (JudgmentId j = 0; j < in.universe.size(); ++j) {
    Config c = in.universe[j];
    if (auto ex = exchange(sys, c))
      for (Label x : ex->labels)
        in.universe.intern(Config{sys.node(c.client).cont[x], sys.node(c.server).cont[x]});
  }
  in.rules.resize(in.universe.size());
  in.corules.resize(in.universe.size());
  std::vector<JudgmentId> prem;
  for (JudgmentId j = 0; j < in.universe.size(); ++j) {
    Config c = in.universe[j];
    if (is_success(sys, c)) {
      in.rules.add(j, "c-success", {});
      continue;
    }
    auto ex = exchange(sys, c);
    if (!ex || ex->labels.empty()) continue;
    prem.clear();
    for (Label x : ex->labels) {
      JudgmentId p = *in.universe.find(Config{sys.node(c.client).cont[x], sys.node(c.server).cont[x]});
      prem.push_back(p);
      Polarity client_pol = ex->client_sends ? Polarity::Out : Polarity::In;
      in.corules.add(j, "c-sync", {p}, sync_tag(Action{client_pol, x}));
    }
    in.rules.add(j, ex->client_sends ? "c-out-inp" : "c-inp-out", prem);
  }
  return in;
}

// --- convergence -------------------------------------------------------------

ProductGraph product_graph(const SessionSystem& sys, SubPair root) {
  ProductGraph g;
  std::unordered_map<SubPair, std::uint32_t> index;
  g.nodes.push_back(root);
  g.parent_edge.push_back(-1);
  index.emplace(root, 0);
  for (std::uint32_t i = 0; i < g.nodes.size(); ++i) {
    SubPair p = g.nodes[i];
    g.out.emplace_back();
    g.escapes.emplace_back();
    for (const Action& a : trace_next(sys, p.left)) {
      auto s2 = step(sys, p.right, a);
      if (!s2 || *s2 == SessionSystem::kNil) {
        g.escapes[i].push_back(a);
        continue;
      }
      SubPair next{*step(sys, p.left, a), *s2};
      auto [it, fresh] = index.emplace(next, static_cast<std::uint32_t>(g.nodes.size()));
      if (fresh) {
        g.nodes.push_back(next);
        g.parent_edge.push_back(static_cast<std::int64_t>(g.edges.size()));
      }
      g.out[i].push_back(static_cast<std::uint32_t>(g.edges.size()));
      g.edges.push_back({i, a, it->second});
    }
  }
  return g;
}

Convergence convergence(const SessionSystem& sys, SubPair root) {
  Convergence cv;
  if (root.left == SessionSystem::kNil) {
    cv.root_converges = true;
    return cv;
  }
  if (root.right == SessionSystem::kNil) return cv;

  cv.graph = product_graph(sys, root);
  const ProductGraph& g = cv.graph;
  const std::size_t n = g.nodes.size();
  cv.level.assign(n, -1);
  cv.good.assign(n, false);
  cv.premises.resize(n);

  std::vector<std::vector<std::uint32_t>> preds(n);
  for (const auto& e : g.edges) preds[e.to].push_back(e.from);

  // Per node, the successor through the least shared output that lies in the
  // current converging set, if any.
  auto good_successor = [&](std::uint32_t i) -> std::int64_t {
    for (std::uint32_t e : g.out[i]) {
      const auto& edge = g.edges[e];
      if (edge.action.polarity == Polarity::Out && cv.level[edge.to] >= 0) return edge.to;
    }
    return -1;
  };

  for (std::int32_t round = 0;; ++round) {
    std::vector<std::int64_t> succ(n);
    for (std::uint32_t i = 0; i < n; ++i) succ[i] = good_successor(i);
    // Non-Good nodes that reach an escape of a non-Good node without
    // passing through a Good node.
    std::vector<bool> bad(n, false);
    std::vector<std::uint32_t> stack;
    for (std::uint32_t i = 0; i < n; ++i)
      if (succ[i] < 0 && !g.escapes[i].empty()) {
        bad[i] = true;
        stack.push_back(i);
      }
    while (!stack.empty()) {
      std::uint32_t m = stack.back();
      stack.pop_back();
      for (std::uint32_t p : preds[m])
        if (!bad[p] && succ[p] < 0) {
          bad[p] = true;
          stack.push_back(p);
        }
    }
    std::vector<std::uint32_t> joined;
    for (std::uint32_t i = 0; i < n; ++i)
      if (cv.level[i] < 0 && !bad[i]) joined.push_back(i);
    if (joined.empty()) {
      for (std::uint32_t i = 0; i < n; ++i) cv.good[i] = succ[i] >= 0;
      cv.rounds = static_cast<std::uint32_t>(round);
      break;
    }
    for (std::uint32_t i : joined) {
      // First Good nodes on every path from i; i itself when it is Good.
      std::vector<bool> seen(n, false);
      std::vector<std::uint32_t> work{i};
      seen[i] = true;
      std::vector<std::uint32_t>& prem = cv.premises[i];
      while (!work.empty()) {
        std::uint32_t m = work.back();
        work.pop_back();
        if (succ[m] >= 0) {
          prem.push_back(static_cast<std::uint32_t>(succ[m]));
          continue;
        }
        for (std::uint32_t e : g.out[m])
          if (!seen[g.edges[e].to]) {
            seen[g.edges[e].to] = true;
            work.push_back(g.edges[e].to);
          }
      }
      std::sort(prem.begin(), prem.end());
      prem.erase(std::unique(prem.begin(), prem.end()), prem.end());
    }
    for (std::uint32_t i : joined) cv.level[i] = round;
  }
  cv.root_converges = cv.level[0] >= 0;
  return cv;
}

// --- subtyping ---------------------------------------------------------------

namespace {

bool subset(const std::vector<Label>& a, const std::vector<Label>& b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace

SubInstance instantiate_subtyping(const SessionSystem& sys, SubPair root) {
  SubInstance in;
  in.convergence = convergence(sys, root);
  const Convergence& cv = in.convergence;
  // Product nodes are interned first, so product node i is judgment i.
  for (const SubPair& p : cv.graph.nodes) in.universe.intern(p);
  in.root = in.universe.intern(root).first;

  const std::size_t n = in.universe.size();
  in.rules.resize(n);
  in.corules.resize(n);
  in.bound = JudgmentSet(n);
  std::vector<JudgmentId> prem;
  for (JudgmentId j = 0; j < n; ++j) {
    SubPair p = in.universe[j];
    const Node& a = sys.node(p.left);
    const Node& b = sys.node(p.right);
    if (a.is_nil()) {
      in.rules.add(j, "s-nil", {});
      in.bound.insert(j);
      continue;
    }
    std::vector<Label> da = dom(sys, p.left);
    if (da.empty()) {
      if (!b.is_nil()) {
        in.rules.add(j, "s-end", {});
        in.bound.insert(j);
      }
      continue;
    }
    if (b.is_nil() || a.polarity != b.polarity) continue;
    std::vector<Label> db = dom(sys, p.right);
    const bool input = a.polarity == Polarity::In;
    const std::vector<Label>& over = input ? da : db;
    if (over.empty() || !(input ? subset(da, db) : subset(db, da))) continue;
    prem.clear();
    for (Label x : over) prem.push_back(*in.universe.find(SubPair{a.cont[x], b.cont[x]}));
    in.rules.add(j, input ? "s-inp" : "s-out", prem);
  }
  for (JudgmentId j = 0; j < cv.level.size(); ++j) {
    if (cv.level[j] < 0) continue;
    in.bound.insert(j);
    in.corules.add(j, "s-converge",
                   std::span<const JudgmentId>(cv.premises[j].data(), cv.premises[j].size()));
  }
  if (cv.root_converges && cv.graph.nodes.empty()) {
    // nil on the left: no product, s-converge holds vacuously.
    in.bound.insert(in.root);
    in.corules.add(in.root, "s-converge", {});
  }
  return in;
}

bool generalized_inclusions_hold(const RuleSystem& rules, const RuleSystem& corules, const JudgmentSet& result) {
  return result.subset_of(gis::gfp(rules).members) &&
         result.subset_of(gis::lfp(RuleSystem::merge(corules, rules)).members);
}

// --- verdicts ----------------------------------------------------------------

bool fair_termination(const SessionSystem& sys, StateRef s) {
  TermInstance in = instantiate_termination(sys, s);
  return gis::gen(in.rules, in.corules).result.members.contains(in.root);
}

bool compliance(const SessionSystem& sys, Config c) {
  CompInstance in = instantiate_compliance(sys, c);
  return gis::gfp(in.rules).members.contains(in.root);
}

bool fair_compliance(const SessionSystem& sys, Config c) {
  CompInstance in = instantiate_compliance(sys, c);
  return gis::gen(in.rules, in.corules).result.members.contains(in.root);
}

bool subtyping(const SessionSystem& sys, StateRef t, StateRef s) {
  SubInstance in = instantiate_subtyping(sys, SubPair{t, s});
  return gis::gfp(in.rules).members.contains(in.root);
}

bool converges(const SessionSystem& sys, StateRef t, StateRef s) {
  return convergence(sys, SubPair{t, s}).root_converges;
}

bool fair_subtyping(const SessionSystem& sys, StateRef t, StateRef s) {
  SubInstance in = instantiate_subtyping(sys, SubPair{t, s});
  return gis::gen_within(in.rules, in.bound).members.contains(in.root);
}

}  // namespace fairck
