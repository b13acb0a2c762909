#pragma once

#include <string>

#include "fairck/syntax.hpp"

namespace fairck::test {

inline const SessionSystem& corpus() {
  static const SessionSystem sys = syntax::load_file(std::string(FAIRCK_SAMPLES_DIR) + "/corpus.st");
  return sys;
}

inline StateRef ref(const SessionSystem& sys, const char* name) { return sys.resolve(name); }

}  // namespace fairck::test
