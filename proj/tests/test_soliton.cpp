#include <cmath>

#include "bbmlab/soliton.hpp"
#include "doctest.h"

using namespace bbm;

TEST_CASE("pointwise Q identities") {
  CHECK(q_at(0.0) == doctest::Approx(1.5));
  for (double x : {-7.0, -1.3, 0.0, 0.4, 2.0, 9.0}) {
    CHECK(std::abs(qpp_at(x) - (q_at(x) - q_at(x) * q_at(x))) < 1e-14);
    CHECK(std::abs(phi_at(x) + qp_at(x) / q_at(x)) < 1e-12);
  }
  CHECK(phic_at(1.6, 0.0) == doctest::Approx(1.5 * 0.6));
}

TEST_CASE("phi_c solves the traveling-wave equation") {
  // c phi'' = (c - 1) phi - phi^2
  Grid g = Grid::line(80.0, 4096);
  for (double c : {1.1, 2.0, 3.5}) {
    auto p = phi_c(c, g);
    auto r = derivative(p, 2) * c - p * (c - 1.0) + p * p;
    CHECK(r.max_abs() < 1e-9);
  }
}

TEST_CASE("energy and mass of phi_2") {
  auto em = energy_mass(phi_c(2.0, Grid::line(60.0, 4096)));
  CHECK(em.E == doctest::Approx(7.63675).epsilon(1e-6));
  CHECK(em.N == doctest::Approx(4.66690).epsilon(1e-6));
  auto z = energy_mass(GridFunction(Grid::line(10.0, 64)));
  CHECK(z.E == 0.0);
  CHECK(z.N == 0.0);
}

TEST_CASE("dE/dc = c dN/dc along the family") {
  Grid g = Grid::line(120.0, 8192);
  for (double c : {1.2, 2.0}) {
    const double h = 1e-4;
    auto p = energy_mass(phi_c(c + h, g)), m = energy_mass(phi_c(c - h, g));
    CHECK(std::abs((p.E - m.E) - c * (p.N - m.N)) / std::abs(p.E - m.E) < 1e-6);
  }
}

TEST_CASE("speed parameters") {
  auto p = SpeedParams::from_speeds(2.0, 1.1);
  CHECK(p.lambda == doctest::Approx(0.5));
  CHECK(p.sigma == doctest::Approx(0.1 / 0.55));
  auto q = SpeedParams::from_lambda_sigma(p.lambda, p.sigma);
  CHECK(q.c1 == doctest::Approx(2.0));
  CHECK(q.c2 == doctest::Approx(1.1));
  CHECK_THROWS_AS(SpeedParams::from_speeds(0.9, 0.5), ParamError);
  CHECK_THROWS_AS(SpeedParams::from_lambda_sigma(1.0, 0.1), ParamError);
}

TEST_CASE("frame maps invert each other") {
  FrameMap f(0.4);
  const double t = 3.7, x = -2.2;
  CHECK(f.t_of(f.tprime(t)) == doctest::Approx(t));
  CHECK(f.x_of(f.tprime(t), f.xprime(t, x)) == doctest::Approx(x));
  CHECK(f.u_to_z() * f.z_to_u() == doctest::Approx(1.0));
  CHECK(f.shift_to_physical(1.0) == doctest::Approx(1.0 / std::sqrt(0.4)));
}

TEST_CASE("Q tilde at sigma = 1 is theta Q") {
  auto p = SpeedParams::from_lambda_sigma(0.5, 1.0);
  for (double x : {-3.0, 0.0, 1.5}) CHECK(qtilde_at(p, x) == doctest::Approx(p.theta * q_at(x)));
}

TEST_CASE("identity suite on the default grid") {
  auto checks = identity_suite(Grid::line(), 1e-7);
  CHECK(checks.size() >= 12);
  for (auto& c : checks) CHECK_MESSAGE(c.pass(), c.name);
}

TEST_CASE("identity suite fails on a coarse grid") {
  auto checks = identity_suite(Grid::line(60.0, 64), 1e-7);
  int failed = 0;
  for (auto& c : checks) failed += !c.pass();
  CHECK(failed > 0);
}
