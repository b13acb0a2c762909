#include "fairck/witness.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "fairck/syntax.hpp"

namespace fairck {

using gis::JudgmentId;
using gis::JudgmentSet;
using gis::RuleSystem;

namespace {

std::string term_judgment(const SessionSystem& sys, StateRef s) { return "✓ " + syntax::describe(sys, s); }

std::string comp_judgment(const SessionSystem& sys, Config c) {
  return syntax::describe(sys, c.client) + " ⊣ " + syntax::describe(sys, c.server);
}

std::string sub_judgment(const SessionSystem& sys, SubPair p) {
  return syntax::describe(sys, p.left) + " ⊑ " + syntax::describe(sys, p.right);
}

std::string rule_name(const SessionSystem& sys, std::string_view name, std::int32_t tag) {
  std::string out(name);
  if (name == "t-any") out += "(" + sys.alphabet().name(static_cast<Label>(tag)) + ")";
  if (name == "c-sync") out += "(" + to_string(sys.alphabet(), sync_action(tag)) + ")";
  return out;
}

std::vector<std::string> render(const Alphabet& a, const Trace& t) {
  std::vector<std::string> out;
  for (const Action& x : t) out.push_back(to_string(a, x));
  return out;
}

template <class Render>
DerivationNode convert(const SessionSystem& sys, const gis::Derivation& d, const Render& judgment) {
  DerivationNode n{d.judgment, judgment(d.judgment), rule_name(sys, d.rule, d.tag), {}};
  for (const auto& p : d.premises) n.premises.push_back(convert(sys, p, judgment));
  return n;
}

// Evidence for a judgment in `members`: the root rule instance and, when
// corules are given, a well-founded derivation in rules ∪ corules.
template <class Render>
DerivationWitness derivation_witness(const SessionSystem& sys, const RuleSystem& rules, const RuleSystem* corules,
                                     const JudgmentSet& members, JudgmentId root, const Render& judgment) {
  DerivationWitness w;
  if (corules) {
    RuleSystem merged = RuleSystem::merge(*corules, rules);
    if (auto d = gis::derivation(merged, gis::lfp(merged), root)) w.bounding = convert(sys, *d, judgment);
  }
  if (auto k = gis::supporting_rule(rules, members, root)) {
    gis::RuleView r = rules.rule(root, *k);
    RuleApplication app{judgment(root), rule_name(sys, r.name, r.tag), {}};
    for (JudgmentId p : r.premises) app.premises.push_back(judgment(p));
    w.root = std::move(app);
  }
  return w;
}

Trace config_path(const ConfigGraph& g, std::uint32_t node) {
  Trace out;
  for (std::int64_t e = g.parent_edge[node]; e >= 0; e = g.parent_edge[g.edges[e].from])
    out.push_back(g.edges[e].action);
  std::reverse(out.begin(), out.end());
  return out;
}

Trace product_path(const ProductGraph& g, std::uint32_t node) {
  Trace out;
  for (std::int64_t e = g.parent_edge[node]; e >= 0; e = g.parent_edge[g.edges[e].from])
    out.push_back(g.edges[e].action);
  std::reverse(out.begin(), out.end());
  return out;
}

std::string label_set(const Alphabet& a, const std::vector<Label>& xs) {
  std::string out = "{";
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + a.name(xs[i]);
  return out + "}";
}

// Why no subtyping rule concludes the pair.
std::string subtyping_failure(const SessionSystem& sys, SubPair p) {
  const Node& a = sys.node(p.left);
  const Node& b = sys.node(p.right);
  if (b.is_nil()) return "the supertype is nil";
  if (a.polarity != b.polarity) return "the two types have opposite polarities";
  std::vector<Label> da = dom(sys, p.left), db = dom(sys, p.right);
  std::vector<Label> diff;
  if (a.polarity == Polarity::In) {
    std::set_difference(da.begin(), da.end(), db.begin(), db.end(), std::back_inserter(diff));
    return "the subtype accepts " + label_set(sys.alphabet(), diff) + ", which the supertype does not";
  }
  if (db.empty()) return "the supertype sends nothing";
  std::set_difference(db.begin(), db.end(), da.begin(), da.end(), std::back_inserter(diff));
  return "the supertype may send " + label_set(sys.alphabet(), diff) + ", which the subtype never sends";
}

// From a non-converging product node, a shortest path through nodes without
// a converging shared output that ends in an action only the left side has.
Trace escape_from(const Convergence& cv, std::uint32_t start) {
  const ProductGraph& g = cv.graph;
  std::vector<std::int64_t> parent(g.nodes.size(), -2);
  std::vector<std::uint32_t> queue{start};
  parent[start] = -1;
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    std::uint32_t m = queue[qi];
    if (!g.escapes[m].empty()) {
      Trace t;
      for (std::int64_t e = parent[m]; e >= 0; e = parent[g.edges[e].from]) t.push_back(g.edges[e].action);
      std::reverse(t.begin(), t.end());
      t.push_back(g.escapes[m].front());
      return t;
    }
    for (std::uint32_t e : g.out[m]) {
      std::uint32_t to = g.edges[e].to;
      if (parent[to] != -2 || cv.good[to]) continue;
      parent[to] = e;
      queue.push_back(to);
    }
  }
  return {};
}

DivergenceWitness divergence(const SessionSystem& sys, const Convergence& cv, std::uint32_t node) {
  DivergenceWitness w;
  SubPair p = cv.graph.nodes[node];
  w.left = p.left;
  w.right = p.right;
  w.node = sub_judgment(sys, p);
  w.prefix = render(sys.alphabet(), product_path(cv.graph, node));
  w.escape = render(sys.alphabet(), escape_from(cv, node));
  w.note = "no pair along the escape has a shared output into a converging pair, and the supertype lacks its last action";
  return w;
}

}  // namespace

Verdict explain_fair_termination(const SessionSystem& sys, StateRef s) {
  TermInstance in = instantiate_termination(sys, s);
  gis::Generalized g = gis::gen(in.rules, in.corules);
  auto judgment = [&](JudgmentId j) { return term_judgment(sys, in.universe[j]); };
  if (g.result.members.contains(in.root))
    return {true, derivation_witness(sys, in.rules, &in.corules, g.result.members, in.root, judgment)};

  // Shortest trace to a residual with no well-founded t-any path to termination.
  std::unordered_map<std::uint32_t, std::pair<std::int64_t, Action>> parent{{s.index, {-1, Action{}}}};
  std::vector<StateRef> queue{s};
  for (std::size_t qi = 0; qi < queue.size(); ++qi) {
    StateRef u = queue[qi];
    if (!g.bound.members.contains(*in.universe.find(u))) {
      Trace t;
      for (StateRef cur = u; parent[cur.index].first >= 0;) {
        t.push_back(parent[cur.index].second);
        cur = StateRef{static_cast<std::uint32_t>(parent[cur.index].first)};
      }
      std::reverse(t.begin(), t.end());
      return {false, TracePath{render(sys.alphabet(), t), syntax::describe(sys, u),
                               "no maximal trace extends this one"}};
    }
    for (const Action& a : trace_next(sys, u)) {
      StateRef v = *step(sys, u, a);
      if (parent.emplace(v.index, std::pair<std::int64_t, Action>{u.index, a}).second) queue.push_back(v);
    }
  }
  return {false, std::nullopt};
}

Verdict explain_compliance(const SessionSystem& sys, Config c) {
  CompInstance in = instantiate_compliance(sys, c);
  gis::Fixpoint gf = gis::gfp(in.rules);
  auto judgment = [&](JudgmentId j) { return comp_judgment(sys, in.universe[j]); };
  if (gf.members.contains(in.root))
    return {true, derivation_witness(sys, in.rules, nullptr, gf.members, in.root, judgment)};
  ConfigGraph g = config_graph(sys, c);
  for (std::uint32_t i = 0; i < g.nodes.size(); ++i) {
    if (in.rules.rule_count(*in.universe.find(g.nodes[i])) > 0) continue;
    return {false, TracePath{render(sys.alphabet(), config_path(g, i)), describe(sys, g.nodes[i]),
                             "stuck session where the client is not satisfied or the server failed"}};
  }
  return {false, std::nullopt};
}

Verdict explain_fair_compliance(const SessionSystem& sys, Config c) {
  CompInstance in = instantiate_compliance(sys, c);
  gis::Generalized gen = gis::gen(in.rules, in.corules);
  auto judgment = [&](JudgmentId j) { return comp_judgment(sys, in.universe[j]); };
  if (gen.result.members.contains(in.root))
    return {true, derivation_witness(sys, in.rules, &in.corules, gen.result.members, in.root, judgment)};
  ConfigGraph g = config_graph(sys, c);
  for (std::uint32_t i = 0; i < g.nodes.size(); ++i) {
    if (gen.bound.members.contains(*in.universe.find(g.nodes[i]))) continue;
    return {false, TracePath{render(sys.alphabet(), config_path(g, i)), describe(sys, g.nodes[i]),
                             "no successful session is reachable from here"}};
  }
  return {false, std::nullopt};
}

namespace {

// Shortest path to a pair no subtyping rule concludes; the rules' premises
// are exactly the product successors of the pairs they conclude.
std::optional<TracePath> subtyping_refutation(const SessionSystem& sys, const SubInstance& in) {
  if (in.rules.rule_count(in.root) == 0)
    return TracePath{{}, sub_judgment(sys, in.universe[in.root]), subtyping_failure(sys, in.universe[in.root])};
  const ProductGraph& g = in.convergence.graph;
  for (std::uint32_t i = 0; i < g.nodes.size(); ++i) {
    if (in.rules.rule_count(i) > 0) continue;
    return TracePath{render(sys.alphabet(), product_path(g, i)), sub_judgment(sys, g.nodes[i]),
                     subtyping_failure(sys, g.nodes[i])};
  }
  return std::nullopt;
}

}  // namespace

Verdict explain_subtyping(const SessionSystem& sys, StateRef t, StateRef s) {
  SubInstance in = instantiate_subtyping(sys, SubPair{t, s});
  gis::Fixpoint gf = gis::gfp(in.rules);
  auto judgment = [&](JudgmentId j) { return sub_judgment(sys, in.universe[j]); };
  if (gf.members.contains(in.root))
    return {true, derivation_witness(sys, in.rules, nullptr, gf.members, in.root, judgment)};
  if (auto w = subtyping_refutation(sys, in)) return {false, *w};
  return {false, std::nullopt};
}

Verdict explain_converges(const SessionSystem& sys, StateRef t, StateRef s) {
  SubInstance in = instantiate_subtyping(sys, SubPair{t, s});
  auto judgment = [&](JudgmentId j) { return sub_judgment(sys, in.universe[j]); };
  if (in.convergence.root_converges) {
    RuleSystem merged = RuleSystem::merge(in.corules, RuleSystem(in.universe.size()));
    DerivationWitness w;
    if (auto d = gis::derivation(merged, gis::lfp(merged), in.root)) w.bounding = convert(sys, *d, judgment);
    return {true, w};
  }
  if (in.convergence.graph.nodes.empty())
    return {false, TracePath{{}, sub_judgment(sys, SubPair{t, s}), "the supertype is nil"}};
  return {false, divergence(sys, in.convergence, 0)};
}

Verdict explain_fair_subtyping(const SessionSystem& sys, StateRef t, StateRef s) {
  SubInstance in = instantiate_subtyping(sys, SubPair{t, s});
  gis::Fixpoint within = gis::gen_within(in.rules, in.bound);
  auto judgment = [&](JudgmentId j) { return sub_judgment(sys, in.universe[j]); };
  if (within.members.contains(in.root))
    return {true, derivation_witness(sys, in.rules, &in.corules, within.members, in.root, judgment)};
  if (!gis::gfp(in.rules).members.contains(in.root)) {
    if (auto w = subtyping_refutation(sys, in)) return {false, *w};
    return {false, std::nullopt};
  }
  // Subtyping holds, so every product node is reached through rule premises
  // and the first non-converging one in breadth-first order is the culprit.
  const Convergence& cv = in.convergence;
  for (std::uint32_t i = 0; i < cv.graph.nodes.size(); ++i)
    if (cv.level[i] < 0) return {false, divergence(sys, cv, i)};
  return {false, std::nullopt};
}

// --- strategy clients ------------------------------------------------------

namespace {

class ClientEnumerator {
 public:
  ClientEnumerator(const SessionSystem& sys, std::size_t size, const std::function<bool(const ClientNodes&)>& visit)
      : sys_(sys), size_(size), visit_(visit), alpha_(sys.alphabet().size()) {}

  bool run(StateRef t) {
    if (size_ == 0) return true;
    follows_.push_back(t);
    nodes_.push_back(Node::nil());
    return expand(0);
  }

 private:
  // Chooses the shape of node i, then fills its successor slots.
  bool expand(std::size_t i) {
    if (i == nodes_.size()) return nodes_.size() != size_ || visit_(nodes_);
    StateRef u = follows_[i];
    nodes_[i] = Node::branch(Polarity::Out, std::vector<StateRef>(alpha_, SessionSystem::kNil));
    if (!expand(i + 1)) return false;
    std::vector<Label> d = dom(sys_, u);
    if (d.empty()) return true;
    if (sys_.node(u).polarity == Polarity::In) {
      for (std::uint32_t mask = 1; mask < (1u << d.size()); ++mask) {
        std::vector<Label> xs;
        for (std::size_t k = 0; k < d.size(); ++k)
          if (mask & (1u << k)) xs.push_back(d[k]);
        if (!fill(i, Polarity::Out, xs, 0)) return false;
      }
      return true;
    }
    return fill(i, Polarity::In, d, 0);
  }

  bool fill(std::size_t i, Polarity p, const std::vector<Label>& xs, std::size_t k) {
    if (k == 0) nodes_[i] = Node::branch(p, std::vector<StateRef>(alpha_, SessionSystem::kNil));
    if (k == xs.size()) return expand(i + 1);
    StateRef v = sys_.node(follows_[i]).cont[xs[k]];
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
      if (follows_[j] != v) continue;
      nodes_[i].cont[xs[k]] = StateRef{static_cast<std::uint32_t>(j + 1)};
      if (!fill(i, p, xs, k + 1)) return false;
    }
    if (nodes_.size() < size_) {
      follows_.push_back(v);
      nodes_.push_back(Node::nil());
      nodes_[i].cont[xs[k]] = StateRef{static_cast<std::uint32_t>(nodes_.size())};
      bool go = fill(i, p, xs, k + 1);
      follows_.pop_back();
      nodes_.pop_back();
      if (!go) return false;
    }
    nodes_[i].cont[xs[k]] = SessionSystem::kNil;
    return true;
  }

  const SessionSystem& sys_;
  std::size_t size_;
  const std::function<bool(const ClientNodes&)>& visit_;
  std::size_t alpha_;
  std::vector<StateRef> follows_;
  ClientNodes nodes_;
};

}  // namespace

bool enumerate_strategy_clients(const SessionSystem& sys, StateRef t, std::size_t size,
                                const std::function<bool(const ClientNodes&)>& visit) {
  if (t == SessionSystem::kNil) return true;
  return ClientEnumerator(sys, size, visit).run(t);
}

Extension attach_client(const SessionSystem& sys, const ClientNodes& client) {
  const auto base = static_cast<std::uint32_t>(sys.size()) - 1;
  std::vector<Node> extra;
  extra.reserve(client.size());
  for (Node n : client) {
    for (StateRef& r : n.cont)
      if (r != SessionSystem::kNil) r.index += base;
    extra.push_back(std::move(n));
  }
  return Extension{sys.extended(std::move(extra)), StateRef{base + 1}};
}

ClientSpec synth_discriminating_client(const SessionSystem& sys, StateRef t, StateRef s,
                                       const SynthOptions& options) {
  ClientSpec spec;
  if (!subtyping(sys, t, s) || fair_subtyping(sys, t, s)) {
    spec.status = ClientSpec::Status::Inapplicable;
    spec.note = fair_subtyping(sys, t, s) ? "fair subtyping holds, so no client tells the two types apart"
                                          : "subtyping fails; a plain counterexample applies";
    return spec;
  }
  auto discriminates = [&](const ClientNodes& c) {
    Extension ext = attach_client(sys, c);
    return fair_compliance(ext.system, Config{ext.state, t}) && !fair_compliance(ext.system, Config{ext.state, s});
  };

  std::size_t examined = 0;
  for (std::size_t size = 1; size <= options.budget && examined < options.max_candidates; ++size) {
    std::vector<ClientNodes> batch;
    std::size_t produced = 0;
    enumerate_strategy_clients(sys, t, size, [&](const ClientNodes& c) {
      batch.push_back(c);
      ++produced;
      return examined + produced < options.max_candidates;
    });
    const auto n = static_cast<std::int64_t>(batch.size());
    std::int64_t first = std::numeric_limits<std::int64_t>::max();
    if (options.parallel) {
#pragma omp parallel for schedule(dynamic) reduction(min : first)
      for (std::int64_t i = 0; i < n; ++i)
        if (i < first && discriminates(batch[i])) first = std::min(first, i);
    } else {
      for (std::int64_t i = 0; i < n; ++i)
        if (discriminates(batch[i])) {
          first = i;
          break;
        }
    }
    if (first != std::numeric_limits<std::int64_t>::max()) {
      examined += static_cast<std::size_t>(first) + 1;
      Extension ext = attach_client(sys, batch[first]);
      // Re-verify independently of the search loop.
      if (!fair_compliance(ext.system, Config{ext.state, t}) || fair_compliance(ext.system, Config{ext.state, s}))
        throw Error(ErrorKind::InvalidSystem, "synthesized client failed re-verification");
      spec.status = ClientSpec::Status::Found;
      spec.system = std::make_shared<const SessionSystem>(ext.system);
      spec.root = ext.state;
      spec.source = syntax::print(ext.system, ext.state, "Client");
      spec.candidates = examined;
      spec.note = "fairly compliant with " + syntax::describe(sys, t) + " but not with " + syntax::describe(sys, s);
      return spec;
    }
    examined += batch.size();
  }
  spec.status = ClientSpec::Status::NotFound;
  spec.candidates = examined;
  spec.note = "no strategy client within the search limits separates the two types";
  return spec;
}

}  // namespace fairck
