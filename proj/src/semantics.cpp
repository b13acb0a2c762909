#include "fairck/semantics.hpp"

#include <algorithm>
#include <unordered_map>

#include "fairck/syntax.hpp"

namespace fairck {

std::string to_string(const Alphabet& alphabet, Action a) {
  return std::string(1, symbol(a.polarity)) + alphabet.name(a.label);
}

std::string to_string(const Alphabet& alphabet, const Trace& t) {
  if (t.empty()) return "ε";
  std::string out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (i) out += '.';
    out += to_string(alphabet, t[i]);
  }
  return out;
}

std::optional<StateRef> step(const SessionSystem& sys, StateRef s, Action a) {
  const Node& n = sys.node(s);
  if (n.is_nil() || n.polarity != a.polarity) return std::nullopt;
  StateRef t = n.cont[a.label];
  if (a.polarity == Polarity::Out && t == SessionSystem::kNil) return std::nullopt;
  return t;
}

std::optional<StateRef> residual(const SessionSystem& sys, StateRef s, const Trace& t) {
  std::optional<StateRef> cur = s;
  for (const Action& a : t) {
    cur = step(sys, *cur, a);
    if (!cur) return std::nullopt;
  }
  return cur;
}

std::vector<Action> trace_next(const SessionSystem& sys, StateRef s) {
  std::vector<Action> out;
  const Node& n = sys.node(s);
  if (n.is_nil()) return out;
  for (Label x = 0; x < n.cont.size(); ++x)
    if (n.cont[x] != SessionSystem::kNil) out.push_back(Action{n.polarity, x});
  return out;
}

bool is_trace(const SessionSystem& sys, StateRef s, const Trace& t) {
  auto r = residual(sys, s, t);
  return r && *r != SessionSystem::kNil;
}

bool is_maximal_trace(const SessionSystem& sys, StateRef s, const Trace& t) {
  auto r = residual(sys, s, t);
  return r && *r != SessionSystem::kNil && trace_next(sys, *r).empty();
}

namespace {

Trace path_to(const std::vector<std::pair<std::int64_t, Action>>& parent, std::size_t node) {
  Trace out;
  for (std::int64_t cur = static_cast<std::int64_t>(node); parent[cur].first >= 0; cur = parent[cur].first)
    out.push_back(parent[cur].second);
  std::reverse(out.begin(), out.end());
  return out;
}

std::vector<std::string> render(const Alphabet& a, const Trace& t) {
  std::vector<std::string> out;
  for (const Action& x : t) out.push_back(to_string(a, x));
  return out;
}

}  // namespace

InclusionResult trace_inclusion(const SessionSystem& sys, StateRef t, StateRef s) {
  if (t == SessionSystem::kNil) return {};
  if (s == SessionSystem::kNil) return {false, {}};

  using Pair = std::pair<std::uint32_t, std::uint32_t>;
  struct PairHash {
    std::size_t operator()(const Pair& p) const noexcept { return (std::size_t(p.first) << 32) ^ p.second; }
  };
  std::unordered_map<Pair, std::size_t, PairHash> index;
  std::vector<Pair> nodes;
  std::vector<std::pair<std::int64_t, Action>> parent;
  nodes.push_back({t.index, s.index});
  parent.push_back({-1, Action{}});
  index.emplace(nodes[0], 0);

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    StateRef a{nodes[i].first}, b{nodes[i].second};
    for (const Action& act : trace_next(sys, a)) {
      auto bs = step(sys, b, act);
      if (!bs || *bs == SessionSystem::kNil) {
        Trace cex = path_to(parent, i);
        cex.push_back(act);
        return {false, std::move(cex)};
      }
    }
    for (const Action& act : trace_next(sys, a)) {
      Pair next{step(sys, a, act)->index, step(sys, b, act)->index};
      if (index.emplace(next, nodes.size()).second) {
        nodes.push_back(next);
        parent.push_back({static_cast<std::int64_t>(i), act});
      }
    }
  }
  return {};
}

std::vector<Reduction> reduce(const SessionSystem& sys, Config c) {
  std::vector<Reduction> out;
  const Node& r = sys.node(c.client);
  const Node& t = sys.node(c.server);
  if (r.is_nil() || t.is_nil() || r.polarity == t.polarity) return out;
  for (Label x = 0; x < sys.alphabet().size(); ++x) {
    Action a{t.polarity, x};
    auto ts = step(sys, c.server, a);
    auto rs = step(sys, c.client, co_action(a));
    if (ts && rs) out.push_back({a, Config{*rs, *ts}});
  }
  return out;
}

ConfigGraph config_graph(const SessionSystem& sys, Config root) {
  ConfigGraph g;
  std::unordered_map<Config, std::uint32_t> index;
  g.nodes.push_back(root);
  g.out.emplace_back();
  g.parent_edge.push_back(-1);
  index.emplace(root, 0);
  for (std::uint32_t i = 0; i < g.nodes.size(); ++i) {
    for (const Reduction& red : reduce(sys, g.nodes[i])) {
      auto [it, fresh] = index.emplace(red.target, static_cast<std::uint32_t>(g.nodes.size()));
      if (fresh) {
        g.nodes.push_back(red.target);
        g.out.emplace_back();
        g.parent_edge.push_back(static_cast<std::int64_t>(g.edges.size()));
      }
      g.out[i].push_back(static_cast<std::uint32_t>(g.edges.size()));
      g.edges.push_back({i, red.action, it->second});
    }
  }
  return g;
}

bool is_success(const SessionSystem& sys, Config c) {
  return is_win(sys, c.client) && is_defined(sys, c.server);
}

std::string describe(const SessionSystem& sys, Config c) {
  return "<" + syntax::describe(sys, c.client) + ", " + syntax::describe(sys, c.server) + ">";
}

namespace {

Trace graph_path(const ConfigGraph& g, std::uint32_t node) {
  Trace out;
  for (std::int64_t e = g.parent_edge[node]; e >= 0; e = g.parent_edge[g.edges[e].from])
    out.push_back(g.edges[e].action);
  std::reverse(out.begin(), out.end());
  return out;
}

// Nodes of `g` that can reach some node satisfying `goal`.
template <class Goal>
std::vector<bool> can_reach(const ConfigGraph& g, Goal goal) {
  std::vector<std::vector<std::uint32_t>> preds(g.nodes.size());
  for (const auto& e : g.edges) preds[e.to].push_back(e.from);
  std::vector<bool> ok(g.nodes.size(), false);
  std::vector<std::uint32_t> stack;
  for (std::uint32_t i = 0; i < g.nodes.size(); ++i)
    if (goal(g.nodes[i])) {
      ok[i] = true;
      stack.push_back(i);
    }
  while (!stack.empty()) {
    std::uint32_t n = stack.back();
    stack.pop_back();
    for (std::uint32_t p : preds[n])
      if (!ok[p]) {
        ok[p] = true;
        stack.push_back(p);
      }
  }
  return ok;
}

}  // namespace

Verdict oracle_fair_termination(const SessionSystem& sys, StateRef s, bool with_witness) {
  if (s == SessionSystem::kNil) return {true, std::nullopt};
  // Trace graph: states reachable through trace-extending actions.
  std::vector<StateRef> nodes{s};
  std::unordered_map<std::uint32_t, std::uint32_t> index{{s.index, 0}};
  std::vector<std::pair<std::int64_t, Action>> parent{{-1, Action{}}};
  std::vector<std::vector<std::uint32_t>> preds(1);
  for (std::uint32_t i = 0; i < nodes.size(); ++i) {
    for (const Action& a : trace_next(sys, nodes[i])) {
      StateRef t = *step(sys, nodes[i], a);
      auto [it, fresh] = index.emplace(t.index, static_cast<std::uint32_t>(nodes.size()));
      if (fresh) {
        nodes.push_back(t);
        parent.push_back({i, a});
        preds.emplace_back();
      }
      preds[it->second].push_back(i);
    }
  }
  std::vector<bool> ok(nodes.size(), false);
  std::vector<std::uint32_t> stack;
  for (std::uint32_t i = 0; i < nodes.size(); ++i)
    if (trace_next(sys, nodes[i]).empty()) {
      ok[i] = true;
      stack.push_back(i);
    }
  while (!stack.empty()) {
    std::uint32_t n = stack.back();
    stack.pop_back();
    for (std::uint32_t p : preds[n])
      if (!ok[p]) {
        ok[p] = true;
        stack.push_back(p);
      }
  }
  for (std::uint32_t i = 0; i < nodes.size(); ++i) {
    if (ok[i]) continue;
    if (!with_witness) return {false, std::nullopt};
    Trace t = path_to(parent, i);
    return {false, TracePath{render(sys.alphabet(), t), syntax::describe(sys, nodes[i]),
                             "no maximal trace extends this one"}};
  }
  return {true, std::nullopt};
}

Verdict oracle_compliance(const SessionSystem& sys, Config c, bool with_witness) {
  ConfigGraph g = config_graph(sys, c);
  for (std::uint32_t i = 0; i < g.nodes.size(); ++i) {
    if (!g.out[i].empty() || is_success(sys, g.nodes[i])) continue;
    if (!with_witness) return {false, std::nullopt};
    return {false, TracePath{render(sys.alphabet(), graph_path(g, i)), describe(sys, g.nodes[i]),
                             "stuck session where the client is not satisfied or the server failed"}};
  }
  return {true, std::nullopt};
}

Verdict oracle_fair_compliance(const SessionSystem& sys, Config c, bool with_witness) {
  ConfigGraph g = config_graph(sys, c);
  std::vector<bool> ok = can_reach(g, [&](Config n) { return is_success(sys, n); });
  for (std::uint32_t i = 0; i < g.nodes.size(); ++i) {
    if (ok[i]) continue;
    if (!with_witness) return {false, std::nullopt};
    return {false, TracePath{render(sys.alphabet(), graph_path(g, i)), describe(sys, g.nodes[i]),
                             "no successful session is reachable from here"}};
  }
  return {true, std::nullopt};
}

}  // namespace fairck
