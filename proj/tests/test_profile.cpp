#include <cmath>

#include "bbmlab/profile.hpp"
#include "bbmlab/soliton.hpp"
#include "doctest.h"

using namespace bbm;

TEST_CASE("antiderivative of Q has the exact tail") {
  Grid g = Grid::line();
  auto p = antiderivative(q_profile(g));
  CHECK(p.plus_inf() == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(p.minus_inf() == doctest::Approx(0.0));
  auto s = p.samples();
  double e = 0.0;
  for (int j = 0; j < g.n; ++j) e = std::max(e, std::abs(s.v[j] - 3.0 * (1.0 + std::tanh(g.x(j) / 2.0))));
  CHECK(e < 1e-10);
}

TEST_CASE("profile algebra keeps tails exact") {
  Grid g = Grid::line();
  Profile phi(GridFunction(g), 0.0, 1.0);
  // phi^2 = 1 - (2/3)... tanh^2 = 1 - sech^2 = 1 - (2/3) Q
  auto sq = (phi * phi).samples();
  auto want = GridFunction::sample(g, [](double x) { return std::tanh(x / 2) * std::tanh(x / 2); });
  CHECK((sq - want).max_abs() < 1e-13);
  // phi' = Q / 3
  auto d = phi.deriv().samples();
  CHECK((d - q_profile(g) * (1.0 / 3.0)).max_abs() < 1e-10);
}

TEST_CASE("apply_L termwise") {
  Grid g = Grid::line();
  auto one = apply_L(Profile::constant(g, 1.0)).samples();
  CHECK((one - (GridFunction::sample(g, [](double) { return 1.0; }) - q_profile(g) * 2.0)).max_abs() < 1e-12);
}

TEST_CASE("antiderivative from zero of an even function is odd") {
  Grid g = Grid::line();
  auto p = antiderivative_from_zero(q_profile(g));
  CHECK(parity_defect(p.samples(), -1) < 1e-10);
  CHECK(p.c1 == doctest::Approx(3.0));
}
