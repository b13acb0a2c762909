#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fairck::cli::run(args, std::cout, std::cerr, fairck::cli::color_from_env(std::cerr));
}
