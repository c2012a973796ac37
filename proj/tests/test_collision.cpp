#include <cmath>
#include <random>

#include "bbmlab/collision.hpp"
#include "bbmlab/integrator.hpp"
#include "doctest.h"

using namespace bbm;

TEST_CASE("fit of an exact soliton") {
  Grid g = Grid::periodic(100.0, 2048);
  auto u = soliton_on(g, 2.0, 7.0);
  auto f = fit_soliton(u, 0.0, FitGuess{6.0, 0.0}, 30.0);
  CHECK(std::abs(f.speed - 2.0) < 1e-9);
  CHECK(std::abs(f.center - 7.0) < 1e-9);
  CHECK(f.amplitude == doctest::Approx(1.5).epsilon(1e-3));
  CHECK(std::abs(f.peak_speed - 2.0) < 1e-2);
}

TEST_CASE("fit with noise and with a frame offset") {
  Grid g = Grid::periodic(100.0, 2048);
  std::mt19937 rng(12345);
  std::normal_distribution<double> nd(0.0, 1e-3);
  auto u = soliton_on(g, 2.0, 7.0, 40.0);  // lab x = grid x + 40
  for (double& v : u.v) v += nd(rng);
  auto f = fit_soliton(u, 40.0, FitGuess{7.5, 2.0}, 30.0);
  CHECK(std::abs(f.speed - 2.0) < 5e-3);
  CHECK(std::abs(f.center - 7.0) < 5e-2);
}

TEST_CASE("two waves, orthogonality and window doubling") {
  Grid g = Grid::periodic(400.0, 4096);
  auto u = soliton_on(g, 2.0, 150.0) + soliton_on(g, 1.2, 0.0);
  // a small smooth disturbance behind the small wave
  u += GridFunction::sample(g, [](double x) { return 1e-4 * std::sin(0.4 * x) * std::exp(-std::pow((x + 60) / 20, 2)); });
  auto [a, b] = fit_solitons(u, 0.0, 0.0, FitGuess{150.0, 2.0}, FitGuess{0.0, 1.2}, 30.0);
  auto [a2, b2] = fit_solitons(u, 0.0, 0.0, FitGuess{150.0, 2.0}, FitGuess{0.0, 1.2}, 60.0);
  CHECK(std::abs(a.speed - a2.speed) / a.speed < 1e-6);
  CHECK(std::abs(b.speed - b2.speed) / b.speed < 1e-6);
  auto eta = residue(u, 0.0, {a, b});
  const double en = norm_l2(eta);
  for (auto& f : {a, b}) {
    CHECK(std::abs(f.orth_R) < 1e-8 * en);
    CHECK(std::abs(f.orth_Rx) < 1e-8 * en);
  }
}

TEST_CASE("residue of an exact pair vanishes") {
  Grid g = Grid::periodic(400.0, 4096);
  auto u = soliton_on(g, 2.0, 150.0) + soliton_on(g, 1.2, 0.0);
  auto [a, b] = fit_solitons(u, 0.0, 0.0, FitGuess{150.0, 2.0}, FitGuess{0.0, 1.2}, 30.0);
  auto n = residue_norms(residue(u, 0.0, {a, b}), 0.0, 75.0, 1.2);
  CHECK(n.behind_h1 < 1e-10);
  CHECK(n.ahead_h1 < 1e-10);
}

TEST_CASE("elastic control: one soliton leaves no residue") {
  Grid g = Grid::periodic(200.0, 4096);
  IntegratorConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 30.0;
  BBMSolver s(g, cfg);
  EvolutionState st{soliton_on(g, 1.5, -100.0), 0.0, cfg.dt, 0};
  s.evolve(st);
  auto f = fit_soliton(st.u, 0.0, FitGuess{-55.0, 1.5}, 30.0);
  auto n = residue_norms(residue(st.u, 0.0, {f}), 0.0, -55.0 - 60.0, 1.5);
  CHECK(std::abs(f.speed - 1.5) < 1e-8);
  CHECK(n.behind_h1 < 1e-8);
  CHECK(n.ahead_h1 < 1e-8);
}

TEST_CASE("psi weight") {
  const double k = diagnostics_kappa(2.0);
  CHECK(k == doctest::Approx(3.0));
  CHECK(psi_weight(-40.0 * k, k) < 1e-8);
  CHECK(psi_weight(40.0 * k, k) > 1.0 - 1e-8);
  for (double x : {-20.0, -1.0, 0.0, 0.3, 7.0}) CHECK(std::abs(psi_weight(-x, k) - 1.0 + psi_weight(x, k)) < 1e-12);
  CHECK(psi_weight(0.0, k) == doctest::Approx(0.5));
}

TEST_CASE("a2 is the energy/mass slope of the family") {
  auto em = [](double c) { return energy_mass(phi_c(c, Grid::line(200.0, 8192))); };
  auto p = em(1.11), m = em(1.1);
  CHECK(a2_ratio(1.1, 1.11) == doctest::Approx((p.E - m.E) / (p.N - m.N)).epsilon(1e-8));
  CHECK(a2_ratio(1.1, 1.1) == doctest::Approx(1.1));
}

TEST_CASE("separated initial data and its conserved quantities") {
  ExperimentConfig cfg;
  cfg.c2 = 1.2;
  auto plan = plan_run(cfg);
  auto d = make_initial_data(cfg, plan.grid, plan.frame_offset0);
  CHECK(d.overlap < cfg.overlap_tol);
  CHECK(d.x2 > d.x1);
  auto sum = conserved(d.u);
  auto e1 = energy_mass(phi_c(2.0, Grid::line(200.0, 16384)));
  auto e2 = energy_mass(phi_c(1.2, Grid::line(200.0, 16384)));
  CHECK(std::abs(sum.N - e1.N - e2.N) < 1e-10);
  CHECK(std::abs(sum.E - e1.E - e2.E) < 1e-10);
  CHECK(overlap_integral(2.0, 1.2, separation_for_overlap(2.0, 1.2, 1e-12)) < 1e-12);
}

TEST_CASE("v(-T) initial data is a shifted pair far from the collision") {
  ExperimentConfig cfg;
  cfg.c2 = 1.1;
  cfg.initial_mode = InitialMode::approx_v_at_minus_T;
  cfg.t_multiplier = 6.0;
  auto plan = plan_run(cfg);
  auto d = make_initial_data(cfg, plan.grid, plan.frame_offset0);
  auto lead = leading_shifts(cfg.c1, cfg.c2);
  auto [f1, f2] = fit_solitons(d.u, d.t0, plan.frame_offset0, FitGuess{d.x1, cfg.c1}, FitGuess{d.x2, cfg.c2}, 30.0);
  auto pair = soliton_on(plan.grid, f1.speed, f1.center, plan.frame_offset0) +
              soliton_on(plan.grid, f2.speed, f2.center, plan.frame_offset0);
  const double dist = norm_h1(d.u - pair) / norm_h1(pair);
  CHECK(dist < 0.01);
  CHECK(std::abs(f1.speed - cfg.c1) < 2e-3);
  CHECK(std::abs(f2.speed - cfg.c2) < 2e-3);
  // before the collision each wave sits half its total shift back from -c T
  CHECK(std::abs((f1.center - d.x1) + 0.5 * lead.Delta1) < 0.15);
  CHECK(std::abs((f2.center - d.x2) + 0.5 * lead.Delta2_delta_sigma) < 0.2);
  CHECK(d.t0 < 0.0);
}

TEST_CASE("config validation and domain sizing") {
  ExperimentConfig cfg;
  cfg.c2 = cfg.c1;
  CHECK_THROWS_AS(cfg.validate(), ParamError);
  cfg.c2 = 0.9;
  CHECK_THROWS(cfg.validate());
  ExperimentConfig small;
  small.L = 50.0;
  CHECK_THROWS_AS(plan_run(small), DomainTooSmall);
  ExperimentConfig mode;
  CHECK(initial_mode_from_string("approx") == InitialMode::approx_v_at_minus_T);
  CHECK_THROWS(initial_mode_from_string("nope"));
}

TEST_CASE("line and exponent fits") {
  std::vector<double> t{0, 1, 2, 3}, y{1, 3, 5, 7};
  auto l = fit_line(t, y);
  CHECK(l.a == doctest::Approx(1.0));
  CHECK(l.b == doctest::Approx(2.0));
  std::vector<double> x{0.03, 0.05, 0.1, 0.2}, p;
  for (double e : x) p.push_back(0.7 * std::pow(e, 2.5));
  auto f = fit_exponent("p", x, p);
  CHECK(f.exponent == doctest::Approx(2.5));
  CHECK(f.prefactor == doctest::Approx(0.7));
  CHECK(f.hi - f.lo < 1e-8);
  CHECK(f.points == 4);
}

TEST_CASE("collision at c2 = 1.3: signs, residue and conservation") {
  ExperimentConfig cfg;
  cfg.c2 = 1.3;
  auto r = run_collision(cfg);
  CHECK(r.c1_in == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(r.delta_c1 > 0.0);
  CHECK(r.delta_c2 > 0.0);
  CHECK(r.residue_detected);
  CHECK(r.ahead_decay < 0.5);
  CHECK(r.residue_stability < 0.05);
  CHECK(r.drift_N < 1e-7);
  CHECK(r.t_collision > 0.0);
  CHECK(r.residue_norms.size() == static_cast<size_t>(cfg.late_samples));
}
