#define DOCTEST_CONFIG_IMPLEMENT
#include <omp.h>

#include <algorithm>

#include "doctest.h"

int main(int argc, char** argv) {
  // The parallel paths are compared with the serial ones; make sure they run
  // with several threads even on a single core.
  omp_set_num_threads(std::max(4, omp_get_max_threads()));
  return doctest::Context(argc, argv).run();
}
