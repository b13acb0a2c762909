#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fairck::cli {

/// Runs one invocation; `args` excludes the program name. Returns the exit
/// code: 0 holds, 1 fails, 2 usage, input or internal error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, bool color = false);

/// FAIRCK_COLOR: "always", "never" or "auto" (colour iff stdout is a tty).
bool color_from_env(std::ostream& err);

}  // namespace fairck::cli
