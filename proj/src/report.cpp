#include "fairck/report.hpp"

#include <cmath>
#include <sstream>

namespace fairck {

using nlohmann::ordered_json;

namespace {

ordered_json node_json(const DerivationNode& d) {
  ordered_json premises = ordered_json::array();
  for (const auto& p : d.premises) premises.push_back(node_json(p));
  return {{"judgment", d.judgment}, {"rule", d.rule}, {"premises", std::move(premises)}};
}

ordered_json strings(const std::vector<std::string>& v) {
  ordered_json out = ordered_json::array();
  for (const auto& s : v) out.push_back(s);
  return out;
}

std::string dotted(const std::vector<std::string>& steps) {
  if (steps.empty()) return "ε";
  std::string out;
  for (const auto& s : steps) out += (out.empty() ? "" : ".") + s;
  return out;
}

const char* status_name(ClientSpec::Status s) {
  switch (s) {
    case ClientSpec::Status::Found: return "found";
    case ClientSpec::Status::NotFound: return "not_found";
    case ClientSpec::Status::Inapplicable: return "inapplicable";
  }
  return "";
}

void tree_text(std::ostringstream& os, const DerivationNode& d, int depth) {
  os << std::string(2 * depth + 2, ' ') << d.judgment << "  [" << d.rule << "]\n";
  for (const auto& p : d.premises) tree_text(os, p, depth + 1);
}

struct JsonVisitor {
  ordered_json operator()(const DerivationWitness& w) const {
    ordered_json root = nullptr;
    if (w.root)
      root = {{"judgment", w.root->judgment}, {"rule", w.root->rule}, {"premises", strings(w.root->premises)}};
    return {{"kind", "derivation"},
            {"root", std::move(root)},
            {"bounding", w.bounding ? node_json(*w.bounding) : ordered_json(nullptr)}};
  }
  ordered_json operator()(const TracePath& w) const {
    return {{"kind", "trace"}, {"steps", strings(w.steps)}, {"terminal", w.terminal}, {"reason", w.reason}};
  }
  ordered_json operator()(const DivergenceWitness& w) const {
    return {{"kind", "divergence"},   {"node", w.node},   {"prefix", strings(w.prefix)},
            {"escape", strings(w.escape)}, {"note", w.note}};
  }
  ordered_json operator()(const ClientSpec& w) const {
    return {{"kind", "client"},
            {"status", status_name(w.status)},
            {"source", w.status == ClientSpec::Status::Found ? ordered_json(w.source) : ordered_json(nullptr)},
            {"candidates", w.candidates},
            {"note", w.note}};
  }
};

struct TextVisitor {
  std::string operator()(const DerivationWitness& w) const {
    std::ostringstream os;
    if (w.root) {
      os << "  " << w.root->judgment << " by " << w.root->rule;
      if (!w.root->premises.empty()) {
        os << " from";
        for (std::size_t i = 0; i < w.root->premises.size(); ++i)
          os << (i ? ", " : " ") << w.root->premises[i];
      }
      os << "\n";
    }
    if (w.bounding) {
      os << "  bounded by:\n";
      tree_text(os, *w.bounding, 1);
    }
    return os.str();
  }
  std::string operator()(const TracePath& w) const {
    return "  after " + dotted(w.steps) + ": " + w.terminal + "\n  " + w.reason + "\n";
  }
  std::string operator()(const DivergenceWitness& w) const {
    return "  diverges at " + w.node + " after " + dotted(w.prefix) + "\n  escape: " + dotted(w.escape) +
           "\n  " + w.note + "\n";
  }
  std::string operator()(const ClientSpec& w) const {
    std::ostringstream os;
    os << "  discriminating client: " << status_name(w.status) << " (" << w.candidates << " candidates)\n";
    os << "  " << w.note << "\n";
    if (w.status == ClientSpec::Status::Found) {
      std::istringstream lines(w.source);
      for (std::string line; std::getline(lines, line);) os << "    " << line << "\n";
    }
    return os.str();
  }
};

}  // namespace

ordered_json witness_json(const Witness& w) { return std::visit(JsonVisitor{}, w); }
std::string witness_text(const Witness& w) { return std::visit(TextVisitor{}, w); }

void attach(Report& r, const Witness& w) {
  r.witness = witness_json(w);
  r.detail = witness_text(w);
}

ordered_json to_json(const Report& r) {
  ordered_json elapsed = 0;
  if (r.elapsed_ms != 0) elapsed = std::round(r.elapsed_ms * 1000) / 1000;
  return {{"version", kVersion}, {"command", r.command}, {"judgment", r.judgment}, {"mode", r.mode},
          {"holds", r.holds},    {"witness", r.witness},  {"elapsed_ms", elapsed}};
}

std::string to_text(const Report& r, bool color, bool timing) {
  std::ostringstream os;
  const char* verdict = r.holds ? "holds" : "fails";
  os << r.judgment << " (" << r.mode << "): ";
  if (color)
    os << (r.holds ? "\033[32m" : "\033[31m") << verdict << "\033[0m";
  else
    os << verdict;
  if (timing) os << " in " << r.elapsed_ms << " ms";
  os << "\n" << r.detail;
  return os.str();
}

}  // namespace fairck
