#include "fairck/syntax.hpp"

#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>
#include <utility>

namespace fairck::syntax {
namespace {

enum class Tok { Ident, LBrace, RBrace, Comma, Eq, Plus, Dot, LParen, RParen, Bang, Query, EndIn, EndOut, Eof };

struct Token {
  Tok kind;
  std::string text;
  Position pos;
};

std::string_view describe_tok(Tok t) {
  switch (t) {
    case Tok::Ident: return "identifier";
    case Tok::LBrace: return "'{'";
    case Tok::RBrace: return "'}'";
    case Tok::Comma: return "','";
    case Tok::Eq: return "'='";
    case Tok::Plus: return "'+'";
    case Tok::Dot: return "'.'";
    case Tok::LParen: return "'('";
    case Tok::RParen: return "')'";
    case Tok::Bang: return "'!'";
    case Tok::Query: return "'?'";
    case Tok::EndIn: return "'end?'";
    case Tok::EndOut: return "'end!'";
    case Tok::Eof: return "end of input";
  }
  return "token";
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }

[[noreturn]] void syntax_error(Position p, const std::string& what) {
  throw Error(ErrorKind::Syntax,
              std::to_string(p.line) + ":" + std::to_string(p.column) + ": syntax error: " + what, p.line,
              p.column);
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < text.size() && text[i + 1] == '/') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Position pos{line, col};
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      std::string word(text.substr(i, j - i));
      if (word == "end" && j < text.size() && (text[j] == '!' || text[j] == '?')) {
        out.push_back({text[j] == '!' ? Tok::EndOut : Tok::EndIn, word + text[j], pos});
        advance(j - i + 1);
        continue;
      }
      out.push_back({Tok::Ident, word, pos});
      advance(j - i);
      continue;
    }
    Tok kind;
    switch (c) {
      case '{': kind = Tok::LBrace; break;
      case '}': kind = Tok::RBrace; break;
      case ',': kind = Tok::Comma; break;
      case '=': kind = Tok::Eq; break;
      case '+': kind = Tok::Plus; break;
      case '.': kind = Tok::Dot; break;
      case '(': kind = Tok::LParen; break;
      case ')': kind = Tok::RParen; break;
      case '!': kind = Tok::Bang; break;
      case '?': kind = Tok::Query; break;
      default: syntax_error(pos, std::string("unexpected character '") + c + "'");
    }
    out.push_back({kind, std::string(1, c), pos});
    advance(1);
  }
  out.push_back({Tok::Eof, "", Position{line, col}});
  return out;
}

const std::set<std::string, std::less<>> kReserved = {"alphabet", "type", "nil", "end"};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  SourceFile file() {
    SourceFile out;
    if (!(peek().kind == Tok::Ident && peek().text == "alphabet"))
      syntax_error(peek().pos, "expected 'alphabet' declaration first");
    next();
    expect(Tok::LBrace);
    std::vector<std::string> labels;
    std::set<std::string> seen;
    do {
      const Token& t = expect(Tok::Ident);
      if (!seen.insert(t.text).second)
        throw Error(ErrorKind::DuplicateAlphabetLabel,
                    at(t.pos) + "duplicate alphabet label '" + t.text + "'", t.pos.line, t.pos.column);
      labels.push_back(t.text);
    } while (accept(Tok::Comma));
    expect(Tok::RBrace);
    out.alphabet = std::make_shared<const Alphabet>(std::move(labels));
    alphabet_ = out.alphabet.get();

    std::set<std::string> names;
    while (peek().kind != Tok::Eof) {
      if (!(peek().kind == Tok::Ident && peek().text == "type")) syntax_error(peek().pos, "expected 'type'");
      next();
      const Token& name = expect(Tok::Ident);
      if (kReserved.contains(name.text)) syntax_error(name.pos, "'" + name.text + "' is reserved");
      if (!names.insert(name.text).second)
        throw Error(ErrorKind::DuplicateTypeName, at(name.pos) + "type '" + name.text + "' defined twice",
                    name.pos.line, name.pos.column);
      expect(Tok::Eq);
      out.types.push_back({name.text, name.pos, term()});
    }
    return out;
  }

 private:
  static std::string at(Position p) { return std::to_string(p.line) + ":" + std::to_string(p.column) + ": "; }

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
  bool accept(Tok k) {
    if (peek().kind != k) return false;
    next();
    return true;
  }
  const Token& expect(Tok k) {
    if (peek().kind != k)
      syntax_error(peek().pos, "expected " + std::string(describe_tok(k)) + ", found " +
                                   (peek().kind == Tok::Ident ? "'" + peek().text + "'"
                                                              : std::string(describe_tok(peek().kind))));
    return next();
  }

  Term term() {
    Position start = peek().pos;
    Term first = seq();
    if (peek().kind != Tok::Plus) return first;
    Term sum;
    sum.kind = Term::Kind::Sum;
    sum.pos = start;
    sum.operands.push_back(std::move(first));
    while (accept(Tok::Plus)) sum.operands.push_back(seq());
    return sum;
  }

  Term seq() {
    const Token& t = peek();
    Term out;
    out.pos = t.pos;
    switch (t.kind) {
      case Tok::EndIn: next(); out.kind = Term::Kind::EndIn; return out;
      case Tok::EndOut: next(); out.kind = Term::Kind::EndOut; return out;
      case Tok::LParen: {
        next();
        Term inner = term();
        expect(Tok::RParen);
        return inner;
      }
      case Tok::Bang:
      case Tok::Query: {
        next();
        out.kind = Term::Kind::Prefix;
        out.polarity = t.kind == Tok::Bang ? Polarity::Out : Polarity::In;
        out.labels = labelset();
        expect(Tok::Dot);
        out.operands.push_back(seq());
        return out;
      }
      case Tok::Ident:
        if (t.text == "nil") {
          next();
          out.kind = Term::Kind::Nil;
          return out;
        }
        if (t.text == "end") syntax_error(t.pos, "expected 'end!' or 'end?' (termination needs a polarity)");
        if (kReserved.contains(t.text)) syntax_error(t.pos, "unexpected keyword '" + t.text + "'");
        next();
        out.kind = Term::Kind::Ref;
        out.name = t.text;
        return out;
      default:
        syntax_error(t.pos, "expected a session type, found " + std::string(describe_tok(t.kind)));
    }
  }

  Label label() {
    const Token& t = expect(Tok::Ident);
    auto x = alphabet_->find(t.text);
    if (!x)
      throw Error(ErrorKind::UnknownLabel, at(t.pos) + "label '" + t.text + "' is not in the alphabet", t.pos.line,
                  t.pos.column);
    return *x;
  }

  std::vector<Label> labelset() {
    std::vector<Label> out;
    if (!accept(Tok::LBrace)) {
      out.push_back(label());
      return out;
    }
    Position p = peek().pos;
    do {
      Label x = label();
      for (Label y : out)
        if (y == x)
          throw Error(ErrorKind::OverlappingLabels, at(p) + "label '" + alphabet_->name(x) + "' repeated in label set",
                      p.line, p.column);
      out.push_back(x);
    } while (accept(Tok::Comma));
    expect(Tok::RBrace);
    return out;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Alphabet* alphabet_ = nullptr;
};

class Elaborator {
 public:
  explicit Elaborator(const SourceFile& file) : file_(file), builder_(file.alphabet) {
    for (std::size_t i = 0; i < file.types.size(); ++i) {
      index_.emplace(file.types[i].name, i);
      states_.push_back(builder_.reserve());
    }
    status_.assign(file.types.size(), Status::Fresh);
  }

  SessionSystem run() {
    for (const auto& def : file_.types) check_refs(def.body);
    for (std::size_t i = 0; i < file_.types.size(); ++i) head(i);
    for (std::size_t i = 0; i < file_.types.size(); ++i) builder_.name(file_.types[i].name, states_[i]);
    return builder_.build(/*prune=*/true);
  }

 private:
  enum class Status { Fresh, InProgress, Done };

  static std::string at(Position p) { return std::to_string(p.line) + ":" + std::to_string(p.column) + ": "; }

  void check_refs(const Term& t) {
    if (t.kind == Term::Kind::Ref && !index_.contains(t.name))
      throw Error(ErrorKind::UndefinedTypeName, at(t.pos) + "undefined type name '" + t.name + "'", t.pos.line,
                  t.pos.column);
    for (const auto& op : t.operands) check_refs(op);
  }

  // The top-level node of definition i; recursion through Refs and Sum
  // operands without an intervening prefix is unguarded.
  const Node& head(std::size_t i) {
    const TypeDef& def = file_.types[i];
    if (status_[i] == Status::InProgress)
      throw Error(ErrorKind::UnguardedRecursion, at(def.pos) + "unguarded recursion in type '" + def.name + "'",
                  def.pos.line, def.pos.column);
    if (status_[i] == Status::Fresh) {
      status_[i] = Status::InProgress;
      builder_.set(states_[i], node_of(def.body));
      status_[i] = Status::Done;
    }
    return builder_.node(states_[i]);
  }

  Node node_of(const Term& t) {
    const std::size_t n = file_.alphabet->size();
    switch (t.kind) {
      case Term::Kind::Nil: return Node::nil();
      case Term::Kind::EndIn: return Node::branch(Polarity::In, std::vector<StateRef>(n, SessionSystem::kNil));
      case Term::Kind::EndOut: return Node::branch(Polarity::Out, std::vector<StateRef>(n, SessionSystem::kNil));
      case Term::Kind::Ref: return head(index_.at(t.name));
      case Term::Kind::Prefix: {
        std::vector<StateRef> cont(n, SessionSystem::kNil);
        StateRef body = state_of(t.operands.front());
        for (Label x : t.labels) cont[x] = body;
        return Node::branch(t.polarity, std::move(cont));
      }
      case Term::Kind::Sum: {
        Node acc = node_of(t.operands.front());
        for (std::size_t k = 1; k < t.operands.size(); ++k) {
          Node rhs = node_of(t.operands[k]);
          try {
            acc = plus(*file_.alphabet, acc, rhs);
          } catch (const Error& e) {
            const Position p = t.operands[k].pos;
            throw Error(e.kind(), at(p) + e.what(), p.line, p.column);
          }
        }
        return acc;
      }
    }
    return Node::nil();
  }

  StateRef state_of(const Term& t) {
    if (t.kind == Term::Kind::Ref) return states_[index_.at(t.name)];
    if (t.kind == Term::Kind::Nil) return SessionSystem::kNil;
    StateRef s = builder_.reserve();
    builder_.set(s, node_of(t));
    return s;
  }

  const SourceFile& file_;
  SystemBuilder builder_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<StateRef> states_;
  std::vector<Status> status_;
};

// --- printing ----------------------------------------------------------------

class Printer {
 public:
  // `alias` names an otherwise unnamed root.
  Printer(const SessionSystem& sys, std::vector<StateRef> extra_roots,
          std::optional<std::pair<StateRef, std::string>> alias = std::nullopt)
      : sys_(sys) {
    if (alias && !sys.name_of(alias->first)) named_.emplace(alias->first.index, alias->second);
    for (const auto& n : sys.names())
      if (!named_.contains(n.state.index)) named_.emplace(n.state.index, n.name);
    std::set<std::string> taken;
    for (const auto& n : sys.names()) taken.insert(n.name);
    if (alias) taken.insert(alias->second);
    taken_ = std::move(taken);
    roots_ = std::move(extra_roots);
    for (const auto& n : sys.names()) roots_.push_back(n.state);
    break_cycles();
  }

  std::string term(StateRef s) const { return render(s, true); }

  const std::string* name(StateRef s) const {
    auto it = named_.find(s.index);
    return it == named_.end() ? nullptr : &it->second;
  }

  // Generated names, in index order.
  const std::map<std::uint32_t, std::string>& generated() const { return generated_; }

  // Named states whose definitions the term of `root` needs, transitively.
  std::set<std::uint32_t> needed(StateRef root) const {
    std::set<std::uint32_t> out;
    std::vector<StateRef> todo{root};
    while (!todo.empty()) {
      StateRef s = todo.back();
      todo.pop_back();
      collect(s, true, out, todo);
    }
    return out;
  }

 private:
  bool is_end(const Node& n) const {
    for (StateRef t : n.cont)
      if (t != SessionSystem::kNil) return false;
    return true;
  }

  bool inlined(StateRef s) const {
    const Node& n = sys_.node(s);
    return n.is_nil() || is_end(n) || !named_.contains(s.index);
  }

  void break_cycles() {
    // Every cycle of inlined states needs a name to keep the output finite.
    bool changed = true;
    while (changed) {
      changed = false;
      std::vector<StateRef> starts = roots_;
      for (const auto& [idx, _] : named_) starts.push_back(StateRef{idx});
      for (StateRef r : starts) {
        std::vector<std::uint8_t> on_stack(sys_.size(), 0);
        if (auto culprit = find_cycle(r, on_stack, true)) {
          std::string base = "_s" + std::to_string(culprit->index);
          while (taken_.contains(base)) base += "'";
          taken_.insert(base);
          named_.emplace(culprit->index, base);
          generated_.emplace(culprit->index, base);
          changed = true;
          break;
        }
      }
    }
  }

  std::optional<StateRef> find_cycle(StateRef s, std::vector<std::uint8_t>& on_stack, bool top) const {
    if (!top && !inlined(s)) return std::nullopt;
    // 1 = on the DFS stack, 2 = fully explored
    if (on_stack[s.index] == 1) return s;
    if (on_stack[s.index] == 2) return std::nullopt;
    on_stack[s.index] = 1;
    for (StateRef t : sys_.node(s).cont) {
      if (t == SessionSystem::kNil) continue;
      if (auto c = find_cycle(t, on_stack, false)) return c;
    }
    on_stack[s.index] = 2;
    return std::nullopt;
  }

  void collect(StateRef s, bool top, std::set<std::uint32_t>& out, std::vector<StateRef>& todo) const {
    const Node& n = sys_.node(s);
    if (n.is_nil()) return;
    if (!top && !inlined(s)) {
      if (out.insert(s.index).second) todo.push_back(s);
      return;
    }
    for (StateRef t : n.cont)
      if (t != SessionSystem::kNil) collect(t, false, out, todo);
  }

  std::string render(StateRef s, bool top) const {
    const Node& n = sys_.node(s);
    if (n.is_nil()) return "nil";
    if (!top && !inlined(s)) return named_.at(s.index);
    if (is_end(n)) return n.polarity == Polarity::Out ? "end!" : "end?";

    // Group labels by continuation, in order of first occurrence.
    std::vector<std::pair<StateRef, std::vector<Label>>> groups;
    for (Label x = 0; x < n.cont.size(); ++x) {
      StateRef t = n.cont[x];
      if (t == SessionSystem::kNil) continue;
      auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == t; });
      if (it == groups.end())
        groups.push_back({t, {x}});
      else
        it->second.push_back(x);
    }
    std::string out;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (g) out += " + ";
      out += symbol(n.polarity);
      const auto& labels = groups[g].second;
      if (labels.size() == 1) {
        out += sys_.alphabet().name(labels[0]);
      } else {
        out += '{';
        for (std::size_t k = 0; k < labels.size(); ++k) {
          if (k) out += ',';
          out += sys_.alphabet().name(labels[k]);
        }
        out += '}';
      }
      out += '.';
      std::string body = render(groups[g].first, false);
      if (is_sum(groups[g].first))
        out += "(" + body + ")";
      else
        out += body;
    }
    return out;
  }

  bool is_sum(StateRef s) const {
    if (!inlined(s)) return false;
    const Node& n = sys_.node(s);
    if (n.is_nil()) return false;
    StateRef first = SessionSystem::kNil;
    for (StateRef t : n.cont) {
      if (t == SessionSystem::kNil) continue;
      if (first == SessionSystem::kNil)
        first = t;
      else if (t != first)
        return true;
    }
    return false;
  }

  const SessionSystem& sys_;
  std::map<std::uint32_t, std::string> named_;
  std::map<std::uint32_t, std::string> generated_;
  std::set<std::string> taken_;
  std::vector<StateRef> roots_;
};

std::string alphabet_line(const Alphabet& a) {
  std::string out = "alphabet {";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) out += ", ";
    out += a.name(static_cast<Label>(i));
  }
  return out + "}\n";
}

}  // namespace

SourceFile parse(std::string_view text) { return Parser(lex(text)).file(); }

SessionSystem elaborate(const SourceFile& file, std::vector<std::string>* warnings) {
  if (warnings && file.alphabet->size() < 2)
    warnings->push_back("alphabet has a single label; branching protocols cannot be expressed");
  return Elaborator(file).run();
}

SessionSystem load(std::string_view text, std::vector<std::string>* warnings) {
  return elaborate(parse(text), warnings);
}

SessionSystem load_file(const std::string& path, std::vector<std::string>* warnings) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load(buf.str(), warnings);
}

std::string print_term(const SessionSystem& sys, StateRef s) { return Printer(sys, {s}).term(s); }

std::string describe(const SessionSystem& sys, StateRef s) {
  if (const std::string* n = sys.name_of(s)) return *n;
  return print_term(sys, s);
}

std::string print(const SessionSystem& sys, StateRef root, std::string_view root_name) {
  // Root gets a fresh alias so that declared names stay untouched.
  std::string alias(root_name);
  while (sys.lookup(alias)) alias += "'";
  Printer p(sys, {root}, std::pair{root, alias});
  std::string out = alphabet_line(sys.alphabet());
  out += "type " + alias + " = " + p.term(root) + "\n";
  std::set<std::uint32_t> needed = p.needed(root);
  std::set<std::uint32_t> done;
  if (!sys.name_of(root)) done.insert(root.index);
  for (const auto& n : sys.names())
    if (needed.contains(n.state.index) && done.insert(n.state.index).second)
      out += "type " + n.name + " = " + p.term(n.state) + "\n";
  for (const auto& [idx, name] : p.generated())
    if (needed.contains(idx) && done.insert(idx).second) out += "type " + name + " = " + p.term(StateRef{idx}) + "\n";
  return out;
}

std::string print_system(const SessionSystem& sys) {
  Printer p(sys, {});
  std::string out = alphabet_line(sys.alphabet());
  for (const auto& n : sys.names()) out += "type " + n.name + " = " + p.term(n.state) + "\n";
  for (const auto& [idx, name] : p.generated()) out += "type " + name + " = " + p.term(StateRef{idx}) + "\n";
  return out;
}

}  // namespace fairck::syntax
