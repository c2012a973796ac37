// Slow: pairs of collisions with and without dealiasing
#include <cmath>

#include "bbmlab/collision.hpp"
#include "doctest.h"

using namespace bbm;

TEST_CASE("dealiasing does not move the collision exponents") {
  std::vector<double> c2{1.2, 1.3};
  ExperimentConfig base;
  auto off = scaling_study(2.0, c2, base, 1);
  base.dealias = true;
  auto on = scaling_study(2.0, c2, base, 1);
  for (size_t i = 0; i < c2.size(); ++i) {
    CHECK(on.runs[i].drift_N < 1e-7);
    CHECK(std::abs(on.runs[i].delta_c1 / off.runs[i].delta_c1 - 1.0) < 1e-2);
    CHECK(std::abs(on.runs[i].delta_c2 / off.runs[i].delta_c2 - 1.0) < 1e-2);
  }
  // two-point exponents; a 1% change in each value moves them by < 0.05
  CHECK(std::abs(on.residue.exponent - off.residue.exponent) < 0.05);
  CHECK(std::abs(on.dc1.exponent - off.dc1.exponent) < 0.05);
  CHECK(std::abs(on.dc2.exponent - off.dc2.exponent) < 0.05);
}
