#pragma once

// Reports of the command-line tool: a fixed JSON layout and a plain-text
// rendering of the same content.

#include <string>

#include "fairck/verdict.hpp"
#include "json.hpp"

namespace fairck {

inline constexpr const char* kVersion = "0.1.0";

struct Report {
  std::string command;   // the arguments, echoed
  std::string judgment;  // e.g. "R2 ⊣ S2"
  std::string mode;      // "safety" or "fair"
  bool holds = false;
  nlohmann::ordered_json witness;  // null when not requested
  std::string detail;              // text rendering of the witness
  double elapsed_ms = 0;
};

nlohmann::ordered_json witness_json(const Witness& w);
std::string witness_text(const Witness& w);

/// Sets both renderings of the witness.
void attach(Report& r, const Witness& w);

nlohmann::ordered_json to_json(const Report& r);
std::string to_text(const Report& r, bool color, bool timing);

}  // namespace fairck
