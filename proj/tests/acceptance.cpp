// Acceptance run: one PASS/FAIL line per criterion, details indented above it.
//
//   acceptance            all criteria
//   acceptance 3 7        selected criteria
//
// Exit status is 1 when a criterion fails that is not listed in kKnownFailures,
// 0 otherwise. Known failures still print FAIL.
#include <chrono>
#include <cstdarg>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "bbmlab/approx.hpp"
#include "bbmlab/collision.hpp"
#include "bbmlab/integrator.hpp"
#include "bbmlab/omega.hpp"
#include "bbmlab/operator_l.hpp"
#include "bbmlab/parallel.hpp"
#include "bbmlab/soliton.hpp"

using namespace bbm;

namespace {

// tolerances
constexpr double kIdentityTol = 1e-7;
constexpr double kIdentitySeconds = 5.0;
constexpr double kOperatorTol = 1e-7;
constexpr double kRoundTripTol = 1e-6;
constexpr double kOmegaResidualTol = 1e-6;
constexpr double kB10OrthTol = 1e-7;
constexpr double kB20RelTol = 1e-5;
constexpr double kScanLambda = 0.5;
constexpr double kSigmaMin = 0.02, kSigmaMax = 0.2;
constexpr int kSigmaPoints = 6;
constexpr double kMinSlopeZ = 3.4, kMinSlopeZSharp = 2.7;
constexpr double kScanSeconds = 600.0;
constexpr double kMinSlopeZ1 = 3.0, kMinSlopeZT = 2.4, kMinDRatio = 3.0;
constexpr double kPropagationTol = 1e-5, kDriftTol = 1e-8, kOrderTol = 0.2;
constexpr double kC1 = 2.0;
constexpr double kResidueLo = 2.0, kResidueHi = 3.0;
constexpr double kDc1Lo = 4.0, kDc1Hi = 6.0;
constexpr double kDc2Lo = 3.5, kDc2Hi = 5.5;
constexpr double kSweepSeconds = 7200.0;
constexpr double kShiftC2 = 1.05;
constexpr double kDelta2Tol = 0.15, kDelta1Tol = 0.25;
constexpr double kMaxBand = 20.0;

// c2 - 1 log-spaced on [0.03, 0.1]
const std::vector<double> kSweep{1.03, 1.0405, 1.0548, 1.074, 1.1};
// the rest of the decade up to 0.3, reported only
const std::vector<double> kSweepUpper{1.1687, 1.3};
const std::vector<double> kSignSpeeds{1.05, 1.1, 1.2};

// criteria whose targets the implementation does not reach
const std::set<int> kKnownFailures{6, 9, 10};

int g_jobs = 1;

void say(const char* f, ...) __attribute__((format(printf, 1, 2)));
void say(const char* f, ...) {
  va_list ap;
  va_start(ap, f);
  std::printf("    ");
  std::vprintf(f, ap);
  std::printf("\n");
  va_end(ap);
  std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(const GridFunction& a, const GridFunction& b) { return (a - b).max_abs() / b.max_abs(); }

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

// ------------------------------------------------------------------ 1

bool identities() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto checks = identity_suite(Grid::line(), kIdentityTol);
  const double secs = seconds_since(t0);
  int failed = 0;
  double worst = 0.0;
  for (auto& c : checks) {
    worst = std::max(worst, c.error());
    if (!c.pass()) {
      ++failed;
      say("%s: value %.12g expected %.12g error %.2e", c.name.c_str(), c.value, c.expected, c.error());
    }
  }
  say("%zu identities, worst error %.2e, %d failed, %.2f s", checks.size(), worst, failed, secs);
  return failed == 0 && secs < kIdentitySeconds;
}

// ------------------------------------------------------------------ 2

bool operator_suite() {
  const Grid g = Grid::line();
  OperatorL L(g);
  const auto Q = q_profile(g), Qp = qp_profile(g);
  const auto Qpp = GridFunction::sample(g, qpp_at);
  const auto Q32 = GridFunction::sample(g, [](double x) { return std::pow(q_at(x), 1.5); });
  const auto xQp = GridFunction::sample(g, [](double x) { return x * qp_at(x); });
  bool ok = true;
  auto check = [&](const char* name, double err) {
    say("%-34s %.2e", name, err);
    ok = ok && err <= kOperatorTol;
  };
  check("L Q' / max Q'", L.apply(Qp).max_abs() / Qp.max_abs());
  check("L Q^3/2 + 5/4 Q^3/2", rel(L.apply(Q32), Q32 * -1.25));
  check("L Q + Q^2", rel(L.apply(Q), Q * Q * -1.0));
  check("L(yQ') + 2Q''", rel(L.apply(xQp), Qpp * -2.0));
  const auto a0 = aux_profiles(0.5, g);
  check("L P + 2Q", rel(L.apply(a0.P), Q * -2.0));
  for (double lam : {0.1, 0.5, 0.9}) {
    const auto a = aux_profiles(lam, g);
    char buf[64];
    std::snprintf(buf, sizeof buf, "L P_lambda, lambda = %.1f", lam);
    check(buf, rel(L.apply(a.P_lambda), Q * Q * -2.0 - Qpp * (3.0 - lam)));
    std::snprintf(buf, sizeof buf, "L V_lambda, lambda = %.1f", lam);
    check(buf, rel(L.apply(a.V_lambda), Qpp * (3.0 - lam) + Q * Q));
  }
  const auto lp = check_lphi(g);
  const double lp_scale = (Q * 2.0 - Q * Q * (5.0 / 3.0)).max_abs();
  check("(L phi)' - (2Q - 5/3 Q^2)", lp.residual / lp_scale);

  // L f = h for right sides orthogonal to Q'
  struct Case {
    const char* name;
    GridFunction h;
  };
  const std::vector<Case> cases{{"Q", Q},
                                {"Q^2", Q * Q},
                                {"Q''", Qpp},
                                {"P_lambda", aux_profiles(0.3, g).P_lambda},
                                {"x Q - Q' part", L.project(GridFunction::sample(g, [](double x) { return x * q_at(x); }))}};
  for (auto& c : cases) {
    const auto f = L.invert(c.h);
    const double err = rel(L.apply(f), c.h);
    say("invert round trip on %-12s %.2e", c.name, err);
    ok = ok && err <= kRoundTripTol;
  }
  return ok;
}

// ------------------------------------------------------------------ 3

bool omega10() {
  bool ok = true;
  const Grid g = Grid::line();
  for (int i = 1; i <= 9; ++i) {
    const double lam = 0.1 * i;
    const auto s = solve_omega10(lam, g);
    const auto res = system_residual(s, printed_sources(1, 0, s, lam), lam);
    const double orth = std::abs(dot(s.B.samples(), qp_profile(g)));
    const bool pass = res.first < kOmegaResidualTol && res.second < kOmegaResidualTol && orth < kB10OrthTol;
    say("lambda %.1f  residuals %.2e %.2e  |int B10 Q'| %.2e  a10 %+.8f  b10 %+.8f  %s", lam, res.first, res.second,
        orth, s.a, s.b, verdict(pass));
    ok = ok && pass;
  }
  return ok;
}

// ------------------------------------------------------------------ 4

bool coefficients() {
  bool ok = true;
  const std::vector<double> lams{0.1, 0.3, 0.5, 0.7, 0.9};
  std::vector<OmegaSolution> sols(lams.size());
  parallel_for(static_cast<int>(lams.size()), g_jobs, [&](int i) { sols[i] = solve_omega(lams[i]); });
  for (size_t i = 0; i < lams.size(); ++i) {
    const double closed = b20_closed(lams[i]);
    const double err = std::abs(sols[i].b20_numeric - closed) / std::abs(closed);
    say("lambda %.1f  b20 numeric %+.10e  closed %+.10e  rel %.2e", lams[i], sols[i].b20_numeric, closed, err);
    ok = ok && err <= kB20RelTol;
  }
  const double d0 = d_closed(0.0);
  say("d(0) = %g", d0);
  ok = ok && d0 == 0.0;
  double gmin = INFINITY;
  for (int i = 0; i <= 1000; ++i) gmin = std::min(gmin, g_poly(i / 1000.0));
  say("min g over lambda in [0, 1] (1001 samples) = %.6e", gmin);
  return ok && gmin > 0.0;
}

// ------------------------------------------------------------------ 5 and 6

std::vector<double> scan_sigmas() {
  std::vector<double> s;
  for (int i = 0; i < kSigmaPoints; ++i)
    s.push_back(kSigmaMin * std::pow(kSigmaMax / kSigmaMin, double(i) / (kSigmaPoints - 1)));
  return s;
}

struct ScanData {
  OmegaSolution omega;
  std::vector<ScanPoint> points;
  double seconds = 0.0;
};

const ScanData& scan() {
  static const ScanData data = [] {
    ScanData d;
    const auto t0 = std::chrono::steady_clock::now();
    d.omega = solve_omega(kScanLambda);
    const auto sig = scan_sigmas();
    d.points.resize(sig.size());
    parallel_for(static_cast<int>(sig.size()), g_jobs,
                 [&](int i) { d.points[i] = residual_scan_point(d.omega, sig[i], true); });
    d.seconds = seconds_since(t0);
    return d;
  }();
  return data;
}

bool residual_scaling() {
  const auto& d = scan();
  std::vector<double> sig, s, ss;
  for (auto& p : d.points) {
    sig.push_back(p.sigma);
    s.push_back(p.norm_S);
    ss.push_back(p.norm_S_sharp);
    say("sigma %.4f  ||S(z)|| %.4e  ||S(z#)|| %.4e", p.sigma, p.norm_S, p.norm_S_sharp);
  }
  const auto fz = fit_exponent("S(z)", sig, s), fs = fit_exponent("S(z#)", sig, ss);
  say("S(z)  exponent %.3f (95%% [%.3f, %.3f]), need >= %.2f", fz.exponent, fz.lo, fz.hi, kMinSlopeZ);
  say("S(z#) exponent %.3f (95%% [%.3f, %.3f]), need >= %.2f", fs.exponent, fs.lo, fs.hi, kMinSlopeZSharp);
  say("scan time %.1f s (limit %.0f s)", d.seconds, kScanSeconds);
  return fz.exponent >= kMinSlopeZ && fs.exponent >= kMinSlopeZSharp && d.seconds < kScanSeconds;
}

bool endpoints() {
  const auto& d = scan();
  std::vector<double> sig, z1, zT;
  double ratio = 0.0;
  for (auto& p : d.points) {
    const auto& e = p.endpoints;
    sig.push_back(p.sigma);
    z1.push_back(e.z_plus);
    zT.push_back(e.zs_plus + e.zs_minus);
    say("sigma %.4f  z(+tau) %.4e  without d %.4e  z#(+tau) + z#(-tau) %.4e", p.sigma, e.z_plus, e.z_plus_no_d,
        e.zs_plus + e.zs_minus);
  }
  const auto f1 = fit_exponent("z(+tau)", sig, z1), fT = fit_exponent("z#(+-tau)", sig, zT);
  // the d-omission factor at sigma = 0.1
  const auto e01 = endpoint_decompositions(d.omega, 0.1);
  ratio = e01.z_plus_no_d / e01.z_plus;
  say("z(+tau) exponent %.3f, need >= %.1f", f1.exponent, kMinSlopeZ1);
  say("z#(+-tau) exponent %.3f, need >= %.1f", fT.exponent, kMinSlopeZT);
  say("sigma 0.1: error without the d term / with it = %.3f, need >= %.1f", ratio, kMinDRatio);

  // the same decompositions far from the interaction, where the displayed
  // profiles are the right comparison (reported only)
  std::vector<double> z1f, zTf;
  std::vector<EndpointReport> far(sig.size());
  parallel_for(static_cast<int>(sig.size()), g_jobs,
               [&](int i) { far[i] = endpoint_decompositions(d.omega, sig[i], 24.0); });
  for (auto& e : far) {
    z1f.push_back(e.z_plus);
    zTf.push_back(e.zs_plus + e.zs_minus);
  }
  const auto f1f = fit_exponent("z(+24tau)", sig, z1f), fTf = fit_exponent("z#(+-24tau)", sig, zTf);
  const auto e24 = endpoint_decompositions(d.omega, 0.1, 24.0);
  say("at 24 tau (not asserted): exponents %.3f and %.3f, d-omission factor %.3f at sigma 0.1", f1f.exponent,
      fTf.exponent, e24.z_plus_no_d / e24.z_plus);
  return f1.exponent >= kMinSlopeZ1 && fT.exponent >= kMinSlopeZT && ratio >= kMinDRatio;
}

// ------------------------------------------------------------------ 7

bool solver() {
  const Grid g = Grid::periodic(100.0, 2048);
  IntegratorConfig main;
  main.dt = 0.01;
  main.t_end = 20.0;
  std::vector<IntegratorConfig> runs{main};
  for (int i = 0; i < 4; ++i) {
    auto k = main;
    k.dt = 0.2 / std::pow(2.0, i);
    runs.push_back(k);
  }
  std::vector<PropagationCheck> res(runs.size());
  parallel_for(static_cast<int>(runs.size()), g_jobs,
               [&](int i) { res[i] = propagate_soliton(2.0, -20.0, g, runs[i]); });
  const auto& m = res[0];
  say("c = 2 over 20 time units, dt %.3g: relative H1 error %.3e, drift N %.2e E %.2e", m.dt, m.error_h1, m.drift_N,
      m.drift_E);
  std::vector<double> errs;
  for (size_t i = 1; i < res.size(); ++i) {
    errs.push_back(res[i].error_h1);
    say("dt %.4f  error %.4e", res[i].dt, res[i].error_h1);
  }
  bool ok = m.error_h1 < kPropagationTol && m.drift_N < kDriftTol && m.drift_E < kDriftTol;
  for (double o : convergence_orders(errs)) {
    say("order %.3f", o);
    ok = ok && std::abs(o - 4.0) <= kOrderTol * 4.0;
  }
  return ok;
}

// ------------------------------------------------------------------ 8 to 11

ExperimentConfig base_config(double c2, bool refine) {
  ExperimentConfig e;
  e.c1 = kC1;
  e.c2 = c2;
  e.refine_check = refine;
  return e;
}

// refined runs, shared between criteria
const CollisionReport& refined_run(double c2) {
  static std::map<double, CollisionReport> cache;
  auto it = cache.find(c2);
  if (it == cache.end()) it = cache.emplace(c2, run_collision(base_config(c2, true))).first;
  return it->second;
}

struct Sweep {
  ScalingStudy study;
  double seconds = 0.0;
};

const Sweep& sweep() {
  static const Sweep s = [] {
    Sweep w;
    const auto t0 = std::chrono::steady_clock::now();
    w.study = scaling_study(kC1, kSweep, base_config(1.1, true), g_jobs);
    w.seconds = seconds_since(t0);
    return w;
  }();
  return s;
}

bool signs() {
  bool ok = true;
  for (double c2 : kSignSpeeds) {
    const CollisionReport* r = nullptr;
    for (auto& run : sweep().study.runs)
      if (run.config.c2 == c2) r = &run;
    if (!r) r = &refined_run(c2);
    const auto& w = r->residue_norms.back();
    const bool pass = r->delta_c1 > 0.0 && r->delta_c2 > 0.0 && r->residue_detected && r->ahead_decay < 0.5;
    say("c2 %.2f  c1+ - c1 %+.4e  c2 - c2+ %+.4e  behind H1 %.3e (noise floor %.2e, ratio %.0f)  ahead last/first "
        "%.3f  %s",
        c2, r->delta_c1, r->delta_c2, w.behind_h1, r->noise_floor, w.behind_h1 / r->noise_floor, r->ahead_decay,
        verdict(pass));
    ok = ok && pass;
  }
  return ok;
}

bool exponent_windows() {
  const auto& s = sweep();
  const auto& st = s.study;
  for (auto& r : st.runs)
    say("c2 %.4f  functional %.4e  c1+ - c1 %.4e  c2 - c2+ %.4e  detected %s  %.0f s", r.config.c2,
        r.residue_norms.back().functional, r.delta_c1, r.delta_c2, r.residue_detected ? "yes" : "no",
        r.wall_seconds);
  auto in = [](const ExponentFit& f, double lo, double hi) {
    const bool pass = f.exponent >= lo && f.exponent <= hi;
    say("%-12s exponent %.3f (95%% [%.3f, %.3f])  window [%.1f, %.1f]  %s", f.name.c_str(), f.exponent, f.lo, f.hi, lo,
        hi, verdict(pass));
    return pass;
  };
  bool ok = in(st.residue, kResidueLo, kResidueHi);
  ok = in(st.dc1, kDc1Lo, kDc1Hi) && ok;
  ok = in(st.dc2, kDc2Lo, kDc2Hi) && ok;
  bool detected = true;
  for (auto& r : st.runs) detected = detected && r.residue_detected;
  say("monotone c1+ - c1 %s, c2 - c2+ %s; all runs above the noise gate %s", verdict(st.monotone_dc1),
      verdict(st.monotone_dc2), verdict(detected));
  say("sweep time %.0f s (limit %.0f s)", s.seconds, kSweepSeconds);

  // the upper part of the decade, fitted with the sweep (reported only)
  std::vector<ExperimentConfig> extra;
  for (double c2 : kSweepUpper) extra.push_back(base_config(c2, false));
  const auto more = run_sweep(extra, g_jobs);
  std::vector<double> eps, fun, d1, d2;
  for (auto& r : st.runs) {
    eps.push_back(r.config.c2 - 1.0);
    fun.push_back(r.residue_norms.back().functional);
    d1.push_back(r.delta_c1);
    d2.push_back(r.delta_c2);
  }
  for (auto& r : more) {
    eps.push_back(r.config.c2 - 1.0);
    fun.push_back(r.residue_norms.back().functional);
    d1.push_back(r.delta_c1);
    d2.push_back(r.delta_c2);
    say("c2 %.4f  functional %.4e  c1+ - c1 %.4e  c2 - c2+ %.4e (not fitted above)", r.config.c2,
        r.residue_norms.back().functional, r.delta_c1, r.delta_c2);
  }
  say("over c2 - 1 in [0.03, 0.3] (not asserted): exponents %.3f, %.3f, %.3f",
      fit_exponent("functional", eps, fun).exponent, fit_exponent("c1+ - c1", eps, d1).exponent,
      fit_exponent("c2 - c2+", eps, d2).exponent);
  return ok && st.monotone_dc1 && st.monotone_dc2 && s.seconds <= kSweepSeconds;
}

bool shift_prediction() {
  const auto& r = refined_run(kShiftC2);
  const auto& p = r.shift_leading;
  const double e2 = std::abs(r.shift2 - p.Delta2) / std::abs(p.Delta2);
  const double e1 = std::abs(r.shift1 - p.Delta1) / std::abs(p.Delta1);
  const double e2s = std::abs(r.shift2 - p.Delta2_delta_sigma) / std::abs(p.Delta2_delta_sigma);
  say("c2 %.2f  Delta1 measured %+.4f, leading %+.4f, off by %.1f%% (limit %.0f%%)", kShiftC2, r.shift1, p.Delta1,
      100 * e1, 100 * kDelta1Tol);
  say("Delta2 measured %+.4f, leading %+.4f, off by %.1f%% (limit %.0f%%)", r.shift2, p.Delta2, 100 * e2,
      100 * kDelta2Tol);
  say("Delta2 against delta_sigma/sqrt(lambda) = %+.4f: off by %.1f%% (not asserted)", p.Delta2_delta_sigma,
      100 * e2s);
  return e2 <= kDelta2Tol && e1 <= kDelta1Tol;
}

bool budgets() {
  const auto& st = sweep().study;
  for (auto& r : st.runs) say("c2 %.4f  ratio1 %.4f  ratio2 %.4f", r.config.c2, r.budget1, r.budget2);
  say("bands (max/min): %.2f and %.2f, limit %.0f", st.budget1_band, st.budget2_band, kMaxBand);
  return st.budget1_band > 0.0 && st.budget1_band <= kMaxBand && st.budget2_band > 0.0 &&
         st.budget2_band <= kMaxBand;
}

struct Criterion {
  int id;
  const char* name;
  std::function<bool()> run;
};

}  // namespace

int main(int argc, char** argv) {
  g_jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const std::vector<Criterion> all{
      {1, "identity suite", identities},
      {2, "operator suite and invert round trips", operator_suite},
      {3, "(1,0) system and B10 orthogonality", omega10},
      {4, "b20 cross-validation, d(0), g > 0", coefficients},
      {5, "residual exponents of z and z#", residual_scaling},
      {6, "endpoint decompositions", endpoints},
      {7, "single-soliton solver", solver},
      {8, "inelasticity signs", signs},
      {9, "exponent windows", exponent_windows},
      {10, "shift prediction", shift_prediction},
      {11, "budget ratio bands", budgets},
  };
  std::set<int> only;
  for (int i = 1; i < argc; ++i) {
    char* end = nullptr;
    const long v = std::strtol(argv[i], &end, 10);
    if (*end != '\0' || v < 1 || v > static_cast<long>(all.size())) {
      std::fprintf(stderr, "usage: acceptance [criterion ...]  (1..%zu)\n", all.size());
      return 2;
    }
    only.insert(static_cast<int>(v));
  }

  int unexpected = 0;
  std::vector<std::string> lines;
  for (auto& c : all) {
    if (!only.empty() && !only.count(c.id)) continue;
    std::printf("[%d] %s\n", c.id, c.name);
    std::fflush(stdout);
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = false;
    try {
      pass = c.run();
    } catch (const std::exception& e) {
      say("error: %s", e.what());
    }
    const bool known = kKnownFailures.count(c.id) > 0;
    if (!pass && !known) ++unexpected;
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s  criterion %2d  %-40s %7.1f s%s", verdict(pass), c.id, c.name,
                  seconds_since(t0), known ? (pass ? "  (listed as known failure)" : "  (known)") : "");
    std::printf("%s\n", buf);
    lines.push_back(buf);
  }
  std::printf("\nsummary\n");
  for (auto& l : lines) std::printf("  %s\n", l.c_str());
  std::printf("%d unexpected failure%s\n", unexpected, unexpected == 1 ? "" : "s");
  return unexpected == 0 ? 0 : 1;
}
