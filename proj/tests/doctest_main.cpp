#define DOCTEST_CONFIG_IMPLEMENT
#include "doctest.h"
#include "pdde/numeric.hpp"

int main(int argc, char** argv) {
  pdde::set_precision_bits(256);
  return doctest::Context(argc, argv).run();
}
