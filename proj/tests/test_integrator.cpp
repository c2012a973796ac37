#include <cmath>

#include "bbmlab/integrator.hpp"
#include "doctest.h"

using namespace bbm;

TEST_CASE("rhs of zero and of a soliton") {
  Grid g = Grid::periodic(100.0, 2048);
  IntegratorConfig cfg;
  BBMSolver s(g, cfg);
  CHECK(s.rhs(GridFunction(g)).max_abs() == 0.0);
  for (double c : {1.3, 2.0}) {
    auto u = phi_c(c, g, 5.0);
    auto want = derivative(u, 1) * -c;
    CHECK((s.rhs(u) - want).max_abs() < 1e-8);
  }
}

TEST_CASE("linear dispersion relation") {
  Grid g = Grid::periodic(M_PI * 8.0, 256);
  BBMSolver s(g, IntegratorConfig{});
  const double eps = 1e-7, k = 0.75;
  auto u = GridFunction::sample(g, [&](double x) { return eps * std::cos(k * x); });
  auto r = s.rhs(u);
  double e = 0.0;
  for (int j = 0; j < g.n; ++j) e = std::max(e, std::abs(r.v[j] - eps * k / (1 + k * k) * std::sin(k * g.x(j))));
  CHECK(e < 1e-12);
}

TEST_CASE("single soliton over 20 time units") {
  IntegratorConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 20.0;
  auto r = propagate_soliton(2.0, -20.0, Grid::periodic(100.0, 2048), cfg);
  CHECK(r.error_h1 < 1e-5);
  CHECK(r.drift_N < 1e-8);
  CHECK(r.drift_E < 1e-8);
}

TEST_CASE("fourth order in dt, lab and moving frame") {
  for (double V : {0.0, 2.0}) {
    std::vector<double> e;
    for (double dt : {0.2, 0.1, 0.05}) {
      IntegratorConfig cfg;
      cfg.dt = dt;
      cfg.t_end = 20.0;
      cfg.frame_speed = V;
      e.push_back(propagate_soliton(2.0, -20.0, Grid::periodic(100.0, 2048), cfg).error_h1);
    }
    for (double o : convergence_orders(e)) CHECK(std::abs(o - 4.0) < 0.8);
  }
}

TEST_CASE("zero stays zero and conserved quantities add") {
  Grid g = Grid::periodic(200.0, 4096);
  IntegratorConfig cfg;
  cfg.dt = 0.05;
  cfg.t_end = 1.0;
  BBMSolver s(g, cfg);
  EvolutionState st{GridFunction(g), 0.0, cfg.dt, 0};
  s.evolve(st);
  CHECK(st.u.max_abs() == 0.0);
  CHECK(st.step_count == 20);

  auto a = phi_c(2.0, g, -100.0), b = phi_c(1.2, g, 100.0);
  auto ea = conserved(a), eb = conserved(b), ab = conserved(a + b);
  CHECK(std::abs(ab.E - ea.E - eb.E) < 1e-8);
  CHECK(std::abs(ab.N - ea.N - eb.N) < 1e-8);
}

TEST_CASE("x -> -x, t -> -t symmetry on an interacting pair") {
  Grid g = Grid::periodic(100.0, 2048);
  IntegratorConfig cfg;
  cfg.dt = 0.02;
  cfg.t_end = 12.0;
  BBMSolver s(g, cfg);
  auto u0 = phi_c(2.0, g, -12.0) + phi_c(1.3, g, 0.0);
  EvolutionState st{u0, 0.0, cfg.dt, 0};
  s.evolve(st);
  EvolutionState back{st.u.reflected(), 0.0, cfg.dt, 0};
  s.evolve(back);
  CHECK(norm_h1(back.u.reflected() - u0) / norm_h1(u0) < 1e-7);
}

TEST_CASE("dealiasing changes little on resolved data") {
  Grid g = Grid::periodic(100.0, 2048);
  IntegratorConfig a, b;
  a.dt = b.dt = 0.01;
  a.t_end = b.t_end = 5.0;
  b.dealias = true;
  auto ra = propagate_soliton(2.0, 0.0, g, a), rb = propagate_soliton(2.0, 0.0, g, b);
  CHECK(std::abs(ra.error_h1 - rb.error_h1) < 1e-8);
}

TEST_CASE("non-finite states and bad configs are reported") {
  Grid g = Grid::periodic(10.0, 64);
  IntegratorConfig cfg;
  cfg.dt = 0.1;
  BBMSolver s(g, cfg);
  GridFunction u(g);
  u.v[3] = NAN;
  EvolutionState st{u, 0.0, cfg.dt, 0};
  CHECK_THROWS_AS(s.step(st), NonFinite);
  IntegratorConfig bad;
  bad.dt = 0.0;
  CHECK_THROWS(BBMSolver(g, bad));
  CHECK_THROWS_AS(BBMSolver(Grid::line(10.0, 64), cfg), GridError);
}
