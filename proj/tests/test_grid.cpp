#include <cmath>
#include <numbers>

#include "bbmlab/grid.hpp"
#include "doctest.h"

using namespace bbm;

namespace {
double gauss(double x) { return std::exp(-x * x); }
}  // namespace

TEST_CASE("grid construction rules") {
  CHECK_THROWS_AS(Grid::periodic(10.0, 1000), GridError);
  CHECK_THROWS_AS(Grid::line(10.0, 15), GridError);
  CHECK_THROWS_AS(Grid::line(-1.0, 64), GridError);
  Grid g = Grid::line(10.0, 64);
  CHECK(g.x(0) == doctest::Approx(-10.0));
  CHECK(g.x(g.zero_index()) == doctest::Approx(0.0));
}

TEST_CASE("integrate reproduces the Gaussian integral") {
  auto f = GridFunction::sample(Grid::line(30.0, 1024), gauss);
  CHECK(std::abs(integrate(f) - std::sqrt(std::numbers::pi)) < 1e-13);
}

TEST_CASE("spectral derivative of a periodic mode is exact") {
  Grid g = Grid::periodic(std::numbers::pi, 64);
  auto f = GridFunction::sample(g, [](double x) { return std::sin(3.0 * x); });
  auto d1 = derivative(f, 1), d2 = derivative(f, 2), d3 = derivative(f, 3);
  double e = 0.0;
  for (int j = 0; j < g.n; ++j) {
    double x = g.x(j);
    e = std::max({e, std::abs(d1.v[j] - 3.0 * std::cos(3.0 * x)), std::abs(d2.v[j] + 9.0 * std::sin(3.0 * x)),
                  std::abs(d3.v[j] + 27.0 * std::cos(3.0 * x))});
  }
  CHECK(e < 1e-10);
}

TEST_CASE("H1 norms of the Gaussian") {
  Grid g = Grid::line(30.0, 2048);
  auto f = GridFunction::sample(g, gauss);
  // int f^2 = int f'^2 = sqrt(pi/2)
  const double m = std::sqrt(std::numbers::pi / 2.0);
  CHECK(std::abs(norm_l2(f) - std::sqrt(m)) < 1e-12);
  CHECK(std::abs(norm_h1(f) - std::sqrt(2.0 * m)) < 1e-12);
  NormWeights w;
  w.c2 = 1.25;
  CHECK(std::abs(norm_h1_c2(f, w) - std::sqrt(m + 0.25 * m)) < 1e-12);
  // half of an even function on each side
  CHECK(std::abs(norm_l2_halfline(f, 0.0, Side::left) - std::sqrt(m / 2.0)) < 1e-10);
  CHECK(std::abs(norm_l2_halfline(f, 0.0, Side::right) - std::sqrt(m / 2.0)) < 1e-10);
  CHECK(norm_l2_halfline(f, 8.0, Side::right) < 1e-12);
}

TEST_CASE("parity defect and reflection") {
  Grid g = Grid::line(20.0, 256);
  auto even = GridFunction::sample(g, gauss);
  auto odd = GridFunction::sample(g, [](double x) { return x * gauss(x); });
  CHECK(parity_defect(even, +1) < 1e-14);
  CHECK(parity_defect(odd, -1) < 1e-14);
  CHECK(parity_defect(odd, +1) > 0.5);
  auto r = odd.reflected();
  for (int j = 1; j < g.n; ++j) CHECK(r.v[j] == doctest::Approx(-odd.v[j]));
}

TEST_CASE("grid function arithmetic checks grids") {
  GridFunction a(Grid::line(10.0, 64)), b(Grid::line(10.0, 128));
  CHECK_THROWS(a + b);
  auto c = GridFunction::sample(Grid::line(10.0, 64), gauss);
  CHECK((c * 2.0 - c).max_abs() == doctest::Approx(c.max_abs()));
}

TEST_CASE("csv dump has a header and CRLF rows") {
  auto f = GridFunction::sample(Grid::line(1.0, 16), gauss);
  auto s = to_csv(f);
  CHECK(s.rfind("x,value\r\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 17);
}
