#include "bbmlab/collision.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "bbmlab/approx.hpp"
#include "bbmlab/omega.hpp"
#include "bbmlab/parallel.hpp"

namespace bbm {

const char* to_string(InitialMode m) {
  return m == InitialMode::far_separated_sum ? "far_separated_sum" : "approx_v_at_minus_T";
}

InitialMode initial_mode_from_string(const std::string& s) {
  if (s == "far_separated_sum" || s == "sum") return InitialMode::far_separated_sum;
  if (s == "approx_v_at_minus_T" || s == "approx") return InitialMode::approx_v_at_minus_T;
  throw std::invalid_argument("unknown initial mode '" + s + "'");
}

double soliton_rate(double c) {
  if (!(c > 1.0)) throw ParamError("soliton speed must exceed 1");
  return std::sqrt((c - 1.0) / c);
}

void ExperimentConfig::validate() const {
  if (!(c2 > 1.0)) throw ParamError("c2 must exceed 1");
  if (!(c1 > c2)) throw ParamError("c1 must exceed c2 (c1 == c2 is the degenerate sigma = 1 case)");
  if (separation < 0.0) throw ParamError("separation must be non-negative");
  if (separation > 0.0) {
    // the small wave starts ahead of the big one by at least (c1 - c2) T / 2
    SpeedParams p = SpeedParams::from_speeds(c1, c2);
    double lam = p.lambda;
    double T = (1.0 - lam) / std::pow(lam, 1.5) * std::pow(p.sigma, -0.51);
    if (separation < 0.5 * (c1 - c2) * T)
      throw ParamError("separation below (c1 - c2) T / 2 = " + std::to_string(0.5 * (c1 - c2) * T));
  }
  if (!(overlap_tol > 0.0)) throw ParamError("overlap_tol must be positive");
  if (!(t_multiplier > 0.0)) throw ParamError("t_multiplier must be positive");
  if (!(h > 0.0) || h > 1.0) throw ParamError("h must be in (0, 1]");
  if (L < 0.0) throw ParamError("L must be non-negative");
  if (!(dt > 0.0) || dt > 0.5) throw ParamError("dt must be in (0, 0.5]");
  if (!(dt_collision > 0.0) || dt_collision > dt) throw ParamError("dt_collision must be in (0, dt]");
  for (double d : {dt, dt_collision}) {
    double r = sample_dt / d;
    if (std::abs(r - std::round(r)) > 1e-6 * r) throw ParamError("sample_dt must be a whole number of steps");
  }
  if (!(separation_widths >= 10.0)) throw ParamError("separation_widths must be at least 10");
  if (!(cut_clearance > 0.0)) throw ParamError("cut_clearance must be positive");
  if (!(radiation_speed > 0.0)) throw ParamError("radiation_speed must be positive");
  if (!(fit_window_width >= 5.0)) throw ParamError("fit_window_width must be at least 5");
  if (!(sample_dt >= dt)) throw ParamError("sample_dt must be at least dt");
  if (late_samples < 2) throw ParamError("late_samples must be at least 2");
}

namespace {

// wrap d into [-L, L)
double wrap(double d, double L) {
  const double P = 2.0 * L;
  d = std::fmod(d + L, P);
  if (d < 0.0) d += P;
  return d - L;
}

double mass_phi(double c) { return std::pow(c - 1.0, 1.5) * std::sqrt(c) * 6.0; }  // int phi_c^2
double E_phi(double c) { return 0.5 * (1.0 + 0.8 * (c - 1.0)) * mass_phi(c); }
double N_phi(double c) { return 0.5 * std::pow(c - 1.0, 1.5) / std::sqrt(c) * (0.2 * (c - 1.0) + c) * 6.0; }

struct Shape {
  double A, k;  // phi_c(s) = A Q(k s)
  explicit Shape(double c) : A(c - 1.0), k(std::sqrt((c - 1.0) / c)) {}
  double R(double s) const { return A * q_at(k * s); }
  double LR(double s) const { return A * (q_at(k * s) - k * k * qpp_at(k * s)); }                 // (1 - d^2) R
  double LRx(double s) const { return A * k * (qp_at(k * s) - k * k * qppp_at(k * s)); }        // (1 - d^2) R'
};

}  // namespace

GridFunction soliton_on(const Grid& g, double c, double rho, double offset) {
  GridFunction f(g);
  const double k = soliton_rate(c);
  for (int j = 0; j < g.n; ++j) {
    double s = wrap(g.x(j) + offset - rho, g.L);
    if (std::abs(k * s) < 700.0) f.v[j] = phic_at(c, s);
  }
  return f;
}

double overlap_integral(double c1, double c2, double X) {
  const double k1 = soliton_rate(c1), k2 = soliton_rate(c2);
  const double lo = -60.0 / k1, hi = X + 60.0 / k2;
  const int n = std::max(2000, static_cast<int>((hi - lo) / 0.05));
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int j = 0; j <= n; ++j) {
    double x = lo + j * h;
    s += (j == 0 || j == n ? 0.5 : 1.0) * phic_at(c1, x) * phic_at(c2, x - X);
  }
  return s * h;
}

double separation_for_overlap(double c1, double c2, double tol) {
  double lo = 0.0, hi = 10.0 / soliton_rate(c2);
  while (overlap_integral(c1, c2, hi) >= tol) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e5) throw DomainTooSmall("no separation reaches the overlap tolerance");
  }
  for (int it = 0; it < 60 && hi - lo > 1e-3; ++it) {
    double m = 0.5 * (lo + hi);
    (overlap_integral(c1, c2, m) < tol ? hi : lo) = m;
  }
  return hi;
}

namespace {

double window_T(const SpeedParams& p) {
  return (1.0 - p.lambda) / std::pow(p.lambda, 1.5) * std::pow(p.sigma, -0.51);
}

}  // namespace

InitialData make_initial_data(const ExperimentConfig& cfg, const Grid& g, double frame_offset) {
  cfg.validate();
  if (g.kind != GridKind::periodic) throw GridError("initial data lives on a periodic grid");
  InitialData d;
  d.frame_offset = frame_offset;
  const double k1 = soliton_rate(cfg.c1), k2 = soliton_rate(cfg.c2);
  if (cfg.initial_mode == InitialMode::far_separated_sum) {
    const double X = cfg.separation > 0.0 ? cfg.separation : separation_for_overlap(cfg.c1, cfg.c2, cfg.overlap_tol);
    d.t0 = 0.0;
    d.x1 = 0.0;
    d.x2 = X;
    d.overlap = overlap_integral(cfg.c1, cfg.c2, X);
  } else {
    const SpeedParams p = SpeedParams::from_speeds(cfg.c1, cfg.c2);
    const double T = cfg.t_multiplier * window_T(p);
    d.t0 = -T;
    d.x1 = -cfg.c1 * T;
    d.x2 = -cfg.c2 * T;
  }
  // seam rule: both waves (and their fit windows) sit inside the domain
  for (auto [x, k] : {std::pair{d.x1, k1}, std::pair{d.x2, k2}}) {
    double gx = x - frame_offset;
    double reach = 30.0 / k;
    if (gx - reach < -g.L || gx + reach > g.L)
      throw DomainTooSmall("a wave at x = " + std::to_string(x) + " does not fit in the domain with 30 widths of room");
  }
  if (cfg.initial_mode == InitialMode::far_separated_sum) {
    d.u = soliton_on(g, cfg.c1, d.x1, frame_offset) + soliton_on(g, cfg.c2, d.x2, frame_offset);
  } else {
    const SpeedParams p = SpeedParams::from_speeds(cfg.c1, cfg.c2);
    const OmegaSolution omega = solve_omega(p.lambda);
    const ApproxSolution v = ApproxSolution::build(omega, p.sigma, Variant::physical_v);
    // sample on the lab grid, then rotate by a whole number of points
    const double hh = g.h();
    const long shift = std::lround(frame_offset / hh);
    if (std::abs(shift * hh - frame_offset) > 1e-9 * std::max(1.0, std::abs(frame_offset)))
      throw GridError("approx mode needs a frame offset that is a multiple of h");
    GridFunction lab = v.v(d.t0, g);
    d.u = GridFunction(g);
    for (int j = 0; j < g.n; ++j) {
      long i = ((j + shift) % g.n + g.n) % g.n;
      d.u.v[j] = lab.v[i];
    }
    // the sample must have decayed at the seam
    double edge = std::max(std::abs(lab.v[0]), std::abs(lab.v[g.n - 1]));
    if (edge > 1e-12) throw DomainTooSmall("v(-T) has not decayed at the edge of the lab grid");
  }
  return d;
}

SolitonFit fit_soliton(const GridFunction& u, double offset, const FitGuess& guess, double window_widths,
                       const std::vector<SolitonFit>& others) {
  const Grid& g = u.grid;
  const double h = g.h();
  // stage one: peak near the guess
  const double search = guess.speed > 1.0 ? 5.0 / soliton_rate(guess.speed) : 20.0;
  std::vector<double> v = u.v;
  for (auto& o : others) {
    auto r = soliton_on(g, o.speed, o.center, offset);
    for (int j = 0; j < g.n; ++j) v[j] -= r.v[j];
  }
  const double gc = guess.center - offset;
  int jmax = -1;
  for (int j = 0; j < g.n; ++j) {
    double s = wrap(g.x(j) - gc, g.L);
    if (std::abs(s) > search) continue;
    if (jmax < 0 || v[j] > v[jmax]) jmax = j;
  }
  if (jmax < 0) throw FitDiverged("empty search range");
  const double y0 = v[(jmax - 1 + g.n) % g.n], y1 = v[jmax], y2 = v[(jmax + 1) % g.n];
  const double den = y0 - 2.0 * y1 + y2;
  const double del = den < 0.0 ? 0.5 * (y0 - y2) / den : 0.0;
  SolitonFit f;
  f.amplitude = y1 - 0.25 * (y0 - y2) * del;
  f.peak_speed = 1.0 + f.amplitude / 1.5;
  if (!(f.peak_speed > 1.0)) throw FitDiverged("no positive peak near the guess");
  const double xpeak = g.x(jmax) + del * h + offset;

  // stage two: Newton on the orthogonality conditions over a fixed window
  const double W = window_widths / soliton_rate(f.peak_speed);
  f.lo = xpeak - W;
  f.hi = xpeak + W;
  std::vector<int> idx;
  std::vector<double> xs;  // lab x, unwrapped around the peak
  for (int j = 0; j < g.n; ++j) {
    double s = wrap(g.x(j) + offset - xpeak, g.L);
    if (std::abs(s) <= W) {
      idx.push_back(j);
      xs.push_back(xpeak + s);
    }
  }
  auto F = [&](double c, double rho, double& f1, double& f2) {
    Shape sh(c);
    long double a = 0.0, b = 0.0;
    for (size_t i = 0; i < idx.size(); ++i) {
      double s = xs[i] - rho;
      double eta = v[idx[i]] - sh.R(s);
      a += sh.LR(s) * eta;
      b += sh.LRx(s) * eta;
    }
    f1 = static_cast<double>(a) * h;
    f2 = static_cast<double>(b) * h;
  };
  double c = f.peak_speed, rho = xpeak;
  int it = 0;
  for (;; ++it) {
    if (it >= 25) throw FitDiverged("Newton did not converge in 25 iterations");
    double f1, f2;
    F(c, rho, f1, f2);
    const double ec = 1e-6 * (c - 1.0), er = 1e-5 / soliton_rate(c);
    double a1, a2, b1, b2, m1, m2, n1, n2;
    F(c + ec, rho, a1, a2);
    F(c - ec, rho, b1, b2);
    F(c, rho + er, m1, m2);
    F(c, rho - er, n1, n2);
    const double J11 = (a1 - b1) / (2 * ec), J21 = (a2 - b2) / (2 * ec);
    const double J12 = (m1 - n1) / (2 * er), J22 = (m2 - n2) / (2 * er);
    const double det = J11 * J22 - J12 * J21;
    if (det == 0.0 || !std::isfinite(det)) throw FitDiverged("singular Newton matrix");
    const double dc = (f1 * J22 - f2 * J12) / det;
    const double dr = (J11 * f2 - J21 * f1) / det;
    c -= dc;
    rho -= dr;
    if (!(c > 1.0) || std::abs(rho - xpeak) > W) throw FitDiverged("Newton left the window");
    if (std::abs(dc) <= 1e-13 * (c - 1.0) + 1e-15 && std::abs(dr) <= 1e-10) break;
  }
  f.speed = c;
  f.center = rho;
  f.iterations = it + 1;
  F(c, rho, f.orth_R, f.orth_Rx);
  return f;
}

std::pair<SolitonFit, SolitonFit> fit_solitons(const GridFunction& u, double /*t*/, double offset, const FitGuess& g1,
                                               const FitGuess& g2, double window_widths) {
  SolitonFit f1 = fit_soliton(u, offset, g1, window_widths);
  SolitonFit f2 = fit_soliton(u, offset, g2, window_widths, {f1});
  f1 = fit_soliton(u, offset, {f1.center, f1.speed}, window_widths, {f2});
  f2 = fit_soliton(u, offset, {f2.center, f2.speed}, window_widths, {f1});
  return {f1, f2};
}

GridFunction residue(const GridFunction& u, double offset, const std::vector<SolitonFit>& fits) {
  GridFunction w = u;
  for (auto& f : fits) w -= soliton_on(u.grid, f.speed, f.center, offset);
  return w;
}

ResidueNorms residue_norms(const GridFunction& w, double offset, double cut, double c2) {
  ResidueNorms r;
  r.cut = cut;
  const double xg = cut - offset;
  if (!(xg > -w.grid.L && xg < w.grid.L)) throw DomainTooSmall("the cut is outside the domain");
  const GridFunction wx = derivative(w, 1);
  r.behind_l2 = norm_l2_halfline(w, xg, Side::left);
  r.behind_dx_l2 = norm_l2_halfline(wx, xg, Side::left);
  r.behind_h1 = std::hypot(r.behind_l2, r.behind_dx_l2);
  r.behind_h1_c2 = std::sqrt(r.behind_dx_l2 * r.behind_dx_l2 + (c2 - 1.0) * r.behind_l2 * r.behind_l2);
  r.ahead_l2 = norm_l2_halfline(w, xg, Side::right);
  const double adx = norm_l2_halfline(wx, xg, Side::right);
  r.ahead_h1 = std::hypot(r.ahead_l2, adx);
  r.ahead_h1_c2 = std::sqrt(adx * adx + (c2 - 1.0) * r.ahead_l2 * r.ahead_l2);
  r.functional = r.behind_dx_l2 + std::sqrt(c2 - 1.0) * r.behind_l2;
  return r;
}

LineFit fit_line(const std::vector<double>& t, const std::vector<double>& y) {
  LineFit f;
  f.n = static_cast<int>(t.size());
  if (f.n < 2) throw std::invalid_argument("a line fit needs two points");
  double mt = 0.0, my = 0.0;
  for (int i = 0; i < f.n; ++i) {
    mt += t[i];
    my += y[i];
  }
  mt /= f.n;
  my /= f.n;
  double stt = 0.0, sty = 0.0;
  for (int i = 0; i < f.n; ++i) {
    stt += (t[i] - mt) * (t[i] - mt);
    sty += (t[i] - mt) * (y[i] - my);
  }
  f.b = sty / stt;
  f.a = my - f.b * mt;
  if (f.n > 2) {
    double ss = 0.0;
    for (int i = 0; i < f.n; ++i) ss += std::pow(y[i] - f.at(t[i]), 2);
    f.b_se = std::sqrt(ss / (f.n - 2) / stt);
  }
  return f;
}

double psi_weight(double x, double kappa) { return 2.0 / std::numbers::pi * std::atan(std::exp(x / kappa)); }

double diagnostics_kappa(double c1) { return std::sqrt((c1 + 7.0) / (c1 - 1.0)); }

double a2_ratio(double c_T0, double c_T) {
  const double dN = N_phi(c_T0) - N_phi(c_T);
  // dE/dc = c dN/dc along the family, so the ratio tends to c
  if (std::abs(c_T0 - c_T) < 1e-9 * (c_T - 1.0)) return 0.5 * (c_T0 + c_T);
  return (E_phi(c_T0) - E_phi(c_T)) / dN;
}

DiagnosticSample diagnostic_sample(const GridFunction& u, double offset, double t, double m, double kappa) {
  DiagnosticSample s;
  s.t = t;
  s.m = m;
  const GridFunction ux = derivative(u, 1);
  const Grid& g = u.grid;
  double n1 = 0.0, ln = 0.0, le = 0.0;
  for (int j = 0; j < g.n; ++j) {
    const double x = g.x(j) + offset;
    const double p = psi_weight(x - m, kappa);
    const double a = u.v[j], b = ux.v[j];
    n1 += (a * a + b * b) * p;
    ln += (a * a + b * b) * (1.0 - p);
    le += (a * a + 2.0 / 3.0 * a * a * a) * (1.0 - p);
  }
  s.N1 = 0.5 * n1 * g.h();
  s.left_N = ln * g.h();
  s.left_E = le * g.h();
  return s;
}

Diagnostics diagnostics_functionals(std::vector<DiagnosticSample> samples, double kappa, double c2_first,
                                    double c2_last) {
  Diagnostics d;
  d.kappa = kappa;
  d.a2 = a2_ratio(c2_last, c2_first);
  for (auto& s : samples) s.G = d.a2 * s.left_N - s.left_E;
  d.samples = std::move(samples);
  if (d.samples.empty()) return d;
  const auto& f = d.samples.front();
  for (auto& s : d.samples) {
    d.n1_max_increase = std::max(d.n1_max_increase, s.N1 - f.N1);
    d.g_back_drop = std::max(d.g_back_drop, f.G - s.G);
  }
  d.g_T_minus_T0 = f.G - d.samples.back().G;
  return d;
}

ShiftPrediction leading_shifts(double c1, double c2) {
  const double lam = (c1 - 1.0) / c1;
  const double den = 15.0 + 10.0 * lam - lam * lam;
  ShiftPrediction s;
  s.Delta1 = std::sqrt(c2 - 1.0) * 10.0 * (1.0 - lam * lam) / (lam * den) * 6.0;
  s.Delta2 = (-30.0 + 18.0 * lam * lam) / (std::sqrt(lam) * den);
  s.Delta2_delta_sigma = (-60.0 + 36.0 * lam * lam) / (std::sqrt(lam) * den);
  return s;
}

RunPlan plan_run(const ExperimentConfig& cfg) {
  cfg.validate();
  RunPlan r;
  const double k1 = soliton_rate(cfg.c1), k2 = soliton_rate(cfg.c2);
  const double dc = cfg.c1 - cfg.c2;
  r.frame_speed = cfg.c2;
  double x1, x2;
  if (cfg.initial_mode == InitialMode::far_separated_sum) {
    r.separation = cfg.separation > 0.0 ? cfg.separation : separation_for_overlap(cfg.c1, cfg.c2, cfg.overlap_tol);
    r.t0 = 0.0;
    r.t_collision = r.separation / dc;
    x1 = 0.0;
    x2 = r.separation;
  } else {
    const SpeedParams p = SpeedParams::from_speeds(cfg.c1, cfg.c2);
    const double T = cfg.t_multiplier * window_T(p);
    r.t0 = -T;
    r.t_collision = 0.0;
    x1 = -cfg.c1 * T;
    x2 = -cfg.c2 * T;
    r.separation = x2 - x1;
  }
  r.t_removal = r.t_collision + cfg.separation_widths / k2 / dc;
  const double t_clear = r.t_collision + 2.0 * cfg.cut_clearance / (k2 * (cfg.c2 - 1.0));
  r.t_final = std::max(r.t_removal + 4.0 * cfg.sample_dt * cfg.late_samples, t_clear);
  // frame layout: the small wave rests at xi_s; the big one needs room to its
  // right until it is removed, the radiation needs room to its left
  const double W1 = cfg.fit_window_width / k1, W2 = cfg.fit_window_width / k2;
  const double right = std::max(cfg.separation_widths / k2 + W1 + 10.0 / k1, W2 + 2.0 / k2);
  const double left_needs =
      std::max(r.separation + W1 + 10.0 / k1, cfg.radiation_speed * (r.t_final - r.t_collision) + W2);
  // wrapped radiation has to cross the right room and the small wave's window
  const double span = std::max(left_needs + right, cfg.radiation_speed * (r.t_final - r.t_collision) + right + W2);
  double L = 0.5 * span + 20.0;
  if (cfg.L > 0.0) {
    if (cfg.L < L) throw DomainTooSmall("L = " + std::to_string(cfg.L) + " is below the seam rule minimum " + std::to_string(L));
    L = cfg.L;
  }
  int n = 16;
  while (2.0 * L / n > cfg.h) n *= 2;
  r.grid = Grid::periodic(L, n);
  const double xi_s = L - right;
  double off = x2 - xi_s;
  if (cfg.initial_mode == InitialMode::approx_v_at_minus_T) off = std::round(off / r.grid.h()) * r.grid.h();
  r.frame_offset0 = off;
  (void)x1;
  return r;
}

namespace {

CollisionReport run_once(const ExperimentConfig& cfg) {
  const auto wall0 = std::chrono::steady_clock::now();
  CollisionReport rep;
  rep.config = cfg;
  const RunPlan plan = plan_run(cfg);
  rep.grid = plan.grid;
  rep.frame_speed = plan.frame_speed;
  const Grid& g = plan.grid;
  const double V = plan.frame_speed;
  const double k2 = soliton_rate(cfg.c2);
  const double dc = cfg.c1 - cfg.c2;
  const bool approx = cfg.initial_mode == InitialMode::approx_v_at_minus_T;

  InitialData init = make_initial_data(cfg, g, plan.frame_offset0);
  rep.initial_overlap = init.overlap;
  auto offset = [&](double t) { return plan.frame_offset0 + V * (t - plan.t0); };

  IntegratorConfig ic;
  ic.dealias = cfg.dealias;
  ic.dt = cfg.dt_collision;
  ic.frame_speed = V;
  BBMSolver fine(g, ic);
  ic.dt = cfg.dt;
  BBMSolver coarse(g, ic);
  EvolutionState st{init.u, plan.t0, cfg.dt_collision, 0};
  const double ts = cfg.sample_dt;

  // late residue samples
  std::vector<double> late;
  for (int i = 0; i < cfg.late_samples; ++i)
    late.push_back(plan.t_collision + (plan.t_final - plan.t_collision) *
                                          (0.55 + 0.45 * i / (cfg.late_samples - 1)));

  // running guesses: lab lines
  double r1 = init.x1, r2 = init.x2, s1 = cfg.c1, s2 = cfg.c2, tg = plan.t0;
  double cg1 = cfg.c1, cg2 = cfg.c2;
  EnergyMass ref = conserved(st.u);
  const double u0_h1 = std::sqrt(2.0 * ref.N);
  double dN = 0.0, dE = 0.0, dN_abs = 0.0;
  bool removed = false;
  double t_col = plan.t_collision, x_col = cfg.c1 * (plan.t_collision - plan.t0) + init.x1;
  std::vector<DiagnosticSample> diag;
  double c2_diag_first = 0.0, c2_diag_last = 0.0;
  const double kappa = diagnostics_kappa(cfg.c1);
  size_t next_late = 0;
  SolitonFit last1, last2;

  auto sample = [&](double t) {
    TracePoint tp;
    tp.t = t;
    const double off = offset(t);
    EnergyMass em = conserved(st.u);
    tp.N = em.N;
    tp.E = em.E;
    dN = std::max(dN, std::abs(em.N - ref.N) / std::abs(ref.N));
    dE = std::max(dE, std::abs(em.E - ref.E) / std::abs(ref.E));
    dN_abs = std::max(dN_abs, std::abs(em.N - ref.N));
    const double p1 = r1 + s1 * (t - tg), p2 = r2 + s2 * (t - tg);
    if (!removed) {
      if (std::abs(p1 - p2) >= 10.0 / k2) {
        auto [f1, f2] = fit_solitons(st.u, t, off, {p1, cg1}, {p2, cg2}, cfg.fit_window_width);
        tp.has1 = tp.has2 = true;
        tp.rho1 = f1.center;
        tp.rho2 = f2.center;
        tp.c1 = f1.speed;
        tp.c2 = f2.speed;
        r1 = f1.center;
        r2 = f2.center;
        cg1 = f1.speed;
        cg2 = f2.speed;
        s1 = f1.speed;
        s2 = f2.speed;
        tg = t;
        last1 = f1;
        last2 = f2;
        if (t > t_col) {
          diag.push_back(diagnostic_sample(st.u, off, t, 0.5 * (f1.center + f2.center), kappa));
          if (diag.size() == 1) c2_diag_first = f2.speed;
          c2_diag_last = f2.speed;
        }
      }
    } else {
      SolitonFit f2 = fit_soliton(st.u, off, {p2, cg2}, cfg.fit_window_width);
      tp.has2 = true;
      tp.rho2 = f2.center;
      tp.c2 = f2.speed;
      r2 = f2.center;
      cg2 = f2.speed;
      s2 = f2.speed;
      tg = t;
      last2 = f2;
    }
    rep.trace.push_back(tp);
  };

  // incoming lines from samples at least 20 small-wave widths apart (10 if
  // that leaves fewer than three)
  auto fit_incoming = [&] {
    std::vector<double> t, a, b;
    for (double widths : {20.0, 10.0}) {
      t.clear();
      a.clear();
      b.clear();
      for (auto& p : rep.trace)
        if (p.has1 && p.has2 && p.rho2 - p.rho1 >= widths / k2) {
          t.push_back(p.t);
          a.push_back(p.rho1);
          b.push_back(p.rho2);
        }
      if (t.size() >= 3) break;
    }
    return std::tuple{t, a, b};
  };

  sample(st.t);
  while (st.t < plan.t_final - 0.5 * cfg.dt) {
    const double t_prev = st.t;
    if (!removed)
      fine.advance(st, std::lround(ts / cfg.dt_collision));
    else
      coarse.advance(st, std::lround(ts / cfg.dt));
    // fixed-step sums drift; keep the sample times on the nominal lattice
    st.t = t_prev + ts;
    const double t = st.t;
    if (!removed && t >= plan.t_removal) {
      sample(t);
      // the collision point from the incoming lines, once
      if (!approx) {
        auto [ti, a, b] = fit_incoming();
        if (ti.size() >= 2) {
          LineFit l1 = fit_line(ti, a), l2 = fit_line(ti, b);
          t_col = (l2.a - l1.a) / (l1.b - l2.b);
          x_col = l1.at(t_col);
        }
        rep.c1_in = rep.trace.front().c1;
        rep.c2_in = rep.trace.front().c2;
      } else {
        t_col = 0.0;
        x_col = 0.0;
        rep.c1_in = cfg.c1;
        rep.c2_in = cfg.c2;
      }
      rep.c1_plus = last1.speed;
      rep.t_removal = t;
      st.u -= soliton_on(g, last1.speed, last1.center, offset(t));
      removed = true;
      ref = conserved(st.u);
      continue;
    }
    sample(t);
    while (removed && next_late < late.size() && t >= late[next_late] - 0.5 * ts) {
      GridFunction w = residue(st.u, offset(t), {last2});
      CutLine cut{t_col, x_col, 0.5 * (1.0 + cfg.c2)};
      ResidueNorms rn = residue_norms(w, offset(t), cut.at(t), cfg.c2);
      rn.t = t;
      rep.residue_norms.push_back(rn);
      ++next_late;
    }
  }
  rep.t_final = st.t;
  rep.t_collision = t_col;
  rep.x_collision = x_col;
  rep.c2_plus = last2.speed;
  rep.delta_c1 = rep.c1_plus - cfg.c1;
  rep.delta_c2 = cfg.c2 - rep.c2_plus;
  rep.delta_c1_vs_in = rep.c1_plus - rep.c1_in;
  rep.delta_c2_vs_in = rep.c2_in - rep.c2_plus;
  rep.drift_N = dN;
  rep.drift_E = dE;
  rep.noise_floor = dN_abs / u0_h1;

  const auto& rn = rep.residue_norms;
  if (rn.size() >= 2) {
    const double a = rn[rn.size() - 2].behind_h1, b = rn.back().behind_h1;
    rep.residue_stability = std::abs(b - a) / std::max(std::abs(b), 1e-300);
    rep.ahead_decay = rn.back().ahead_h1 / std::max(rn.front().ahead_h1, 1e-300);
  }
  if (!rn.empty()) {
    const auto& w = rn.back();
    rep.residue_detected = w.behind_h1 > 10.0 * rep.noise_floor;
    rep.budget1 = rep.delta_c1 / (w.behind_h1_c2 * w.behind_h1_c2);
    rep.budget2 = rep.delta_c2 * std::sqrt(cfg.c2 - 1.0) / (w.behind_h1 * w.behind_h1);
  }

  // shifts: incoming lines against outgoing lines at the collision time
  rep.shift_leading = leading_shifts(cfg.c1, cfg.c2);
  {
    std::vector<double> t1, y1, t2, y2;
    const double t_out1 = t_col + 10.0 / k2 / dc;
    for (auto& p : rep.trace) {
      if (p.has1 && p.t >= t_out1 && p.rho1 > p.rho2) {
        t1.push_back(p.t);
        y1.push_back(p.rho1);
      }
      if (p.has2 && p.t >= rep.t_final - (rep.t_final - t_col) / 3.0) {
        t2.push_back(p.t);
        y2.push_back(p.rho2);
      }
    }
    double in1 = cfg.c1 * t_col, in2 = cfg.c2 * t_col;
    if (!approx) {
      auto [ti, a, b] = fit_incoming();
      if (ti.size() >= 2) {
        in1 = fit_line(ti, a).at(t_col);
        in2 = fit_line(ti, b).at(t_col);
      }
    }
    // approx mode: the construction is symmetric about the origin, so the
    // incoming lines are x = c_j t - Delta_j/2 and the measured value doubles
    const double scale = approx ? 2.0 : 1.0;
    if (t1.size() >= 2) rep.shift1 = scale * (fit_line(t1, y1).at(t_col) - in1);
    if (t2.size() >= 2) rep.shift2 = scale * (fit_line(t2, y2).at(t_col) - in2);
  }
  rep.diagnostics = diagnostics_functionals(std::move(diag), kappa, c2_diag_first, c2_diag_last);
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0).count();
  return rep;
}

}  // namespace

CollisionReport run_collision(const ExperimentConfig& cfg) {
  CollisionReport rep = run_once(cfg);
  if (!cfg.refine_check) return rep;
  ExperimentConfig half = cfg;
  half.dt *= 0.5;
  half.dt_collision *= 0.5;
  half.refine_check = false;
  const CollisionReport fine = run_once(half);
  rep.refined = true;
  auto last_h1 = [](const CollisionReport& r) { return r.residue_norms.empty() ? 0.0 : r.residue_norms.back().behind_h1; };
  rep.refine_change_h1 = std::abs(last_h1(rep) - last_h1(fine));
  rep.refine_change_dc1 = std::abs(rep.delta_c1 - fine.delta_c1);
  rep.refine_change_dc2 = std::abs(rep.delta_c2 - fine.delta_c2);
  rep.noise_floor += rep.refine_change_h1;
  rep.residue_detected = last_h1(rep) > 10.0 * rep.noise_floor;
  rep.wall_seconds += fine.wall_seconds;
  return rep;
}

std::vector<CollisionReport> run_sweep(const std::vector<ExperimentConfig>& cfgs, int jobs) {
  std::vector<CollisionReport> out(cfgs.size());
  parallel_for(static_cast<int>(cfgs.size()), jobs, [&](int i) { out[i] = run_collision(cfgs[i]); });
  return out;
}

ExponentFit fit_exponent(const std::string& name, const std::vector<double>& x, const std::vector<double>& y) {
  ExponentFit f;
  f.name = name;
  std::vector<double> lx, ly;
  for (size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  f.points = static_cast<int>(lx.size());
  if (f.points < 2) {
    f.exponent = f.lo = f.hi = std::numeric_limits<double>::quiet_NaN();
    return f;
  }
  LineFit l = fit_line(lx, ly);
  f.exponent = l.b;
  f.prefactor = std::exp(l.a);
  if (f.points > 2) {
    boost::math::students_t dist(f.points - 2);
    const double q = boost::math::quantile(boost::math::complement(dist, 0.025));
    f.lo = l.b - q * l.b_se;
    f.hi = l.b + q * l.b_se;
  } else {
    f.lo = f.hi = l.b;
  }
  return f;
}

ScalingStudy scaling_study(double c1, const std::vector<double>& c2_list, const ExperimentConfig& base, int jobs) {
  ScalingStudy s;
  s.c1 = c1;
  std::vector<double> sorted = c2_list;
  std::sort(sorted.begin(), sorted.end());
  std::vector<ExperimentConfig> cfgs;
  for (double c2 : sorted) {
    ExperimentConfig c = base;
    c.c1 = c1;
    c.c2 = c2;
    c.validate();
    cfgs.push_back(c);
    s.eps.push_back(c2 - 1.0);
  }
  s.runs = run_sweep(cfgs, jobs);
  std::vector<double> res, d1, d2;
  for (auto& r : s.runs) {
    res.push_back(r.residue_norms.empty() ? 0.0 : r.residue_norms.back().functional);
    d1.push_back(r.delta_c1);
    d2.push_back(r.delta_c2);
  }
  s.residue = fit_exponent("residue", s.eps, res);
  s.dc1 = fit_exponent("c1+ - c1", s.eps, d1);
  s.dc2 = fit_exponent("c2 - c2+", s.eps, d2);
  s.monotone_dc1 = s.monotone_dc2 = s.runs.size() >= 2;
  for (size_t i = 1; i < s.runs.size(); ++i) {
    s.monotone_dc1 = s.monotone_dc1 && d1[i] > d1[i - 1];
    s.monotone_dc2 = s.monotone_dc2 && d2[i] > d2[i - 1];
  }
  auto band = [&](auto get) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (auto& r : s.runs) {
      double v = get(r);
      if (!(v > 0.0)) return std::numeric_limits<double>::infinity();
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    return hi / lo;
  };
  s.budget1_band = band([](const CollisionReport& r) { return r.budget1; });
  s.budget2_band = band([](const CollisionReport& r) { return r.budget2; });
  return s;
}

}  // namespace bbm
