#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "bbmlab/grid.hpp"
#include "bbmlab/integrator.hpp"
#include "bbmlab/soliton.hpp"

namespace bbm {

class DomainTooSmall : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class FitDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class InitialMode { far_separated_sum, approx_v_at_minus_T };
const char* to_string(InitialMode m);
InitialMode initial_mode_from_string(const std::string& s);

// decay rate sqrt((c-1)/c) of phi_c; one "width" is its inverse
double soliton_rate(double c);

struct ExperimentConfig {
  double c1 = 2.0, c2 = 1.1;
  InitialMode initial_mode = InitialMode::far_separated_sum;
  // far_separated_sum: distance from the big wave to the small one in front of it
  // (0: smallest X with int phi_c1 phi_c2(. - X) < overlap_tol).
  double separation = 0.0;
  double overlap_tol = 1e-12;
  // approx_v_at_minus_T: start at -t_multiplier T
  double t_multiplier = 1.0;
  // grid: spacing target, and half length (0: sized from the run length)
  double h = 0.35;
  double L = 0.0;
  // step before the big wave is removed (its speed is read off then, and RK4
  // lets a lone wave's fitted speed drift like t dt^5) and after
  double dt_collision = 0.005;
  double dt = 0.025;
  // after the collision, run until the big wave is this many small-wave widths
  // ahead of the small one, then fit it and take it out of the field
  double separation_widths = 30.0;
  // keep running until the small wave is this many widths ahead of the cut
  double cut_clearance = 8.0;
  // fastest radiation speed relative to the small wave, used to size L
  double radiation_speed = 1.2;
  double fit_window_width = 30.0;  // half window in widths of the fitted wave
  double sample_dt = 2.0;          // fit cadence
  int late_samples = 4;            // residue samples over the last 45% of the run
  // rerun with both steps halved; the change in the residue norm enters the noise floor
  bool refine_check = false;
  bool dealias = false;  // 2/3 rule on u^2
  void validate() const;
};

struct SolitonFit {
  double speed = 0.0;      // c bar
  double center = 0.0;     // rho (lab frame)
  double amplitude = 0.0;  // peak of the sampled field
  double lo = 0.0, hi = 0.0;
  double peak_speed = 0.0;  // 1 + 2/3 amplitude, stage one
  int iterations = 0;
  double orth_R = 0.0, orth_Rx = 0.0;  // the two orthogonality integrals
};

// soliton phi_c(x - rho) sampled on g, with g's x read as lab x - offset
GridFunction soliton_on(const Grid& g, double c, double rho, double offset = 0.0);

struct InitialData {
  GridFunction u;
  double t0 = 0.0;            // lab time of the sample
  double frame_offset = 0.0;  // lab x = grid x + frame_offset at t0
  double x1 = 0.0, x2 = 0.0;  // lab centers (approximate in approx mode)
  double overlap = 0.0;       // int phi_c1 phi_c2 at the chosen separation
};

// smallest separation X with int phi_c1 phi_c2(. - X) < tol
double separation_for_overlap(double c1, double c2, double tol);
double overlap_integral(double c1, double c2, double X);

InitialData make_initial_data(const ExperimentConfig& cfg, const Grid& g, double frame_offset = 0.0);

struct FitGuess {
  double center = 0.0;  // lab
  double speed = 0.0;   // rough speed, 0: from the peak
};

// Two-stage fit of one wave: peak detection on [guess - W, guess + W], then Newton
// on (c, rho) so that eta = u - R - others is orthogonal to (1 - d^2) R and
// (1 - d^2) R_x on the window. `others` are subtracted first.
SolitonFit fit_soliton(const GridFunction& u, double offset, const FitGuess& guess, double window_widths,
                       const std::vector<SolitonFit>& others = {});
// Both waves, alternating so each sees the other's fit.
std::pair<SolitonFit, SolitonFit> fit_solitons(const GridFunction& u, double t, double offset, const FitGuess& g1,
                                               const FitGuess& g2, double window_widths);

struct ResidueNorms {
  double t = 0.0;
  double cut = 0.0;  // lab x of the cut
  double behind_h1 = 0.0, behind_h1_c2 = 0.0, behind_l2 = 0.0, behind_dx_l2 = 0.0;
  double ahead_h1 = 0.0, ahead_h1_c2 = 0.0, ahead_l2 = 0.0;
  double functional = 0.0;  // ||w_x|| + sqrt(c2 - 1) ||w|| behind the cut
};

// w = u - sum of fitted waves; norms on the two sides of x = cut
GridFunction residue(const GridFunction& u, double offset, const std::vector<SolitonFit>& fits);
ResidueNorms residue_norms(const GridFunction& w, double offset, double cut, double c2);

struct CutLine {
  double tc = 0.0, xc = 0.0;  // collision point
  double speed = 0.0;         // (1 + c2)/2
  double at(double t) const { return xc + speed * (t - tc); }
};

struct LineFit {
  double a = 0.0, b = 0.0;  // rho = a + b t
  double b_se = 0.0;
  int n = 0;
  double at(double t) const { return a + b * t; }
};
LineFit fit_line(const std::vector<double>& t, const std::vector<double>& y);

struct DiagnosticSample {
  double t = 0.0;
  double m = 0.0;
  double N1 = 0.0;  // 1/2 int (u^2 + u_x^2) psi(x - m)
  double G = 0.0;   // a2 int (u_x^2 + u^2)(1 - psi) - int (u^2 + 2/3 u^3)(1 - psi)
  double left_N = 0.0, left_E = 0.0;  // the two integrals inside G
};

struct Diagnostics {
  double kappa = 0.0;
  double a2 = 0.0;
  std::vector<DiagnosticSample> samples;
  double n1_max_increase = 0.0;  // max_t N1(t) - N1(t_first)
  double g_back_drop = 0.0;      // max_t G(t_first) - G(t)
  double g_T_minus_T0 = 0.0;     // G(t_first) - G(t_last)
};

// psi(x) = 2/pi arctan(exp(x/kappa))
double psi_weight(double x, double kappa);
double diagnostics_kappa(double c1);  // sqrt((c1 + 7)/(c1 - 1))
double a2_ratio(double c_T0, double c_T);

// N1 and the pieces of G for one field; G is completed once a2 is known
DiagnosticSample diagnostic_sample(const GridFunction& u, double offset, double t, double m, double kappa);
Diagnostics diagnostics_functionals(std::vector<DiagnosticSample> samples, double kappa, double c2_first,
                                    double c2_last);

struct ShiftPrediction {
  double Delta1 = 0.0, Delta2 = 0.0;  // leading orders as displayed
  // delta_sigma/sqrt(lambda) at leading order: the full small-wave shift implied by
  // the centers c2 T + delta_sigma/(2 sqrt(lambda)) at +-T; twice Delta2
  double Delta2_delta_sigma = 0.0;
};
ShiftPrediction leading_shifts(double c1, double c2);

struct TracePoint {
  double t = 0.0;
  double rho1 = 0.0, rho2 = 0.0, c1 = 0.0, c2 = 0.0;
  bool has1 = false, has2 = false;
  double N = 0.0, E = 0.0;
};

struct CollisionReport {
  ExperimentConfig config;
  Grid grid;
  double frame_speed = 0.0;
  double t_collision = 0.0, x_collision = 0.0;
  double t_removal = 0.0, t_final = 0.0;
  // incoming fits (measured before the collision)
  double c1_in = 0.0, c2_in = 0.0;
  double c1_plus = 0.0, c2_plus = 0.0;
  double delta_c1 = 0.0;  // c1+ - c1
  double delta_c2 = 0.0;  // c2 - c2+
  double delta_c1_vs_in = 0.0, delta_c2_vs_in = 0.0;
  std::vector<ResidueNorms> residue_norms;
  double residue_stability = 0.0;  // relative change of the behind-cut H1 norm, last two samples
  double ahead_decay = 0.0;        // ahead norm at the last sample over the first late sample
  double shift1 = 0.0, shift2 = 0.0;
  ShiftPrediction shift_leading;
  double budget1 = 0.0;  // (c1+ - c1)/||w||^2_{H1_c2}
  double budget2 = 0.0;  // (c2 - c2+) sqrt(c2 - 1)/||w||^2_{H1}
  Diagnostics diagnostics;
  double drift_N = 0.0, drift_E = 0.0;  // worst relative drift over both phases
  // |Delta N|/||u0||_{H1} (the smallest H1 error that explains the N drift), plus
  // the refinement change of the behind-cut H1 norm when refine_check is on
  double noise_floor = 0.0;
  bool refined = false;
  double refine_change_h1 = 0.0, refine_change_dc1 = 0.0, refine_change_dc2 = 0.0;
  bool residue_detected = false;        // behind-cut H1 > 10 noise_floor
  double initial_overlap = 0.0;
  std::vector<TracePoint> trace;
  double wall_seconds = 0.0;
};

struct RunPlan {
  Grid grid;
  double frame_speed = 0.0;
  double t0 = 0.0, t_collision = 0.0, t_removal = 0.0, t_final = 0.0;
  double frame_offset0 = 0.0;  // lab x of grid x at t0
  double separation = 0.0;
};
RunPlan plan_run(const ExperimentConfig& cfg);

CollisionReport run_collision(const ExperimentConfig& cfg);

struct ExponentFit {
  std::string name;
  double exponent = 0.0, lo = 0.0, hi = 0.0;  // 95% interval
  double prefactor = 0.0;
  int points = 0;
};
// least squares of log y on log x
ExponentFit fit_exponent(const std::string& name, const std::vector<double>& x, const std::vector<double>& y);

struct ScalingStudy {
  double c1 = 2.0;
  std::vector<double> eps;  // c2 - 1
  std::vector<CollisionReport> runs;
  ExponentFit residue, dc1, dc2;
  bool monotone_dc1 = false, monotone_dc2 = false;
  double budget1_band = 0.0, budget2_band = 0.0;  // max/min over the sweep
};
// runs are independent and are spread over `jobs` threads
ScalingStudy scaling_study(double c1, const std::vector<double>& c2_list, const ExperimentConfig& base, int jobs = 1);
std::vector<CollisionReport> run_sweep(const std::vector<ExperimentConfig>& cfgs, int jobs);

}  // namespace bbm
