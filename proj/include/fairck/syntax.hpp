#pragma once

// The `.st` session-type DSL.
//
//   file          := alphabet_decl typedef*
//   alphabet_decl := "alphabet" "{" label ("," label)* "}"
//   typedef       := "type" NAME "=" term
//   term          := seq ("+" seq)*
//   seq           := "nil" | "end!" | "end?" | NAME
//                  | POL labelset "." seq | "(" term ")"
//   labelset      := label | "{" label ("," label)* "}"
//   POL           := "!" | "?"
//
// Line comments start with "//".

#include <string>
#include <string_view>
#include <vector>

#include "fairck/core.hpp"

namespace fairck::syntax {

struct Position {
  int line = 0;
  int column = 0;
};

struct Term {
  enum class Kind { Nil, EndIn, EndOut, Ref, Prefix, Sum };

  Kind kind = Kind::Nil;
  Position pos;
  std::string name;           // Ref
  Polarity polarity{};        // Prefix
  std::vector<Label> labels;  // Prefix, non-empty, in source order
  std::vector<Term> operands; // Prefix: exactly the body; Sum: two or more
};

struct TypeDef {
  std::string name;
  Position pos;
  Term body;
};

struct SourceFile {
  std::shared_ptr<const Alphabet> alphabet;
  std::vector<TypeDef> types;
};

SourceFile parse(std::string_view text);

/// Resolves the equations into a pruned, normalized system. Warnings (for
/// example a single-label alphabet) are appended to `warnings` when given.
SessionSystem elaborate(const SourceFile& file, std::vector<std::string>* warnings = nullptr);

/// parse + elaborate.
SessionSystem load(std::string_view text, std::vector<std::string>* warnings = nullptr);
/// Reads a file from disk; I/O failures throw Error(Io).
SessionSystem load_file(const std::string& path, std::vector<std::string>* warnings = nullptr);

/// The term denoting `s`, using declared names (and generated `_sN` names
/// for unnamed cycles) for everything except `s` itself.
std::string print_term(const SessionSystem& sys, StateRef s);

/// A short label for `s`: its declared name when it has one, else its term.
std::string describe(const SessionSystem& sys, StateRef s);

/// A complete, reparseable file whose first definition names `root`,
/// followed by the definitions it refers to.
std::string print(const SessionSystem& sys, StateRef root, std::string_view root_name = "Root");

/// The normalized file: one `type` line per named root (plus generated
/// definitions for unnamed recursive states, which elaboration never emits).
std::string print_system(const SessionSystem& sys);

}  // namespace fairck::syntax
