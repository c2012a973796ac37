#pragma once

#include <map>
#include <vector>

#include "bbmlab/omega.hpp"
#include "bbmlab/soliton.hpp"

namespace bbm {

enum class Variant { symmetric_z, modified_z_sharp, physical_v };
const char* to_string(Variant v);

struct ShiftData {
  double delta = 0.0;        // sum a_kl sigma^l int Qt^k
  double delta_sigma = 0.0;  // 2 (b10 + sigma (b11 - b10^3/6))
  double Delta1 = 0.0;       // delta / sqrt(lambda)
  double Delta2 = 0.0;       // delta_sigma / sqrt(lambda)
  double T = 0.0;            // physical half window
  double D = 0.0;            // (1-lambda)/lambda^{3/2} d
  double tau = 0.0;          // sigma^{-1/2-1/100}
};

// alpha(s) = int_0^s beta, tabulated by Gauss-Legendre cumulative quadrature and
// evaluated by cubic Hermite interpolation (beta is known exactly at the nodes).
class AlphaTable {
 public:
  AlphaTable() = default;
  AlphaTable(std::vector<std::pair<int, double>> terms, const SpeedParams& p, double s_max, double ds);
  double beta(double s) const;
  double beta_p(double s) const;
  double operator()(double s) const;
  double exact(double s) const;  // closed-form antiderivatives of Qt^k, k <= 3
  double limit() const { return a_.empty() ? 0.0 : a_.back(); }

 private:
  std::vector<std::pair<int, double>> terms_;  // (k, a_kl sigma^l)
  SpeedParams p_;
  double s_max_ = 0.0, ds_ = 1.0;
  std::vector<double> a_;  // alpha at s_j = j ds, j >= 0 (alpha is odd)
};

// Values of a bounded profile and of its derivative at arbitrary y: the decaying
// part by 12-point Lagrange interpolation, the c0 + c1 phi tail analytically.
class ProfileSampler {
 public:
  ProfileSampler() = default;
  explicit ProfileSampler(const Profile& p);
  double value(double y) const;
  double deriv(double y) const;

 private:
  double interp(const std::vector<double>& v, double y) const;
  Grid g_;
  std::vector<double> d_, dp_;
  double c0_ = 0.0, c1_ = 0.0;
};

struct ApproxOptions {
  int max_level = 3;       // keep (k,l) with k + l <= max_level
  bool override_d = false; // replace d in w_# by d_value
  double d_value = 0.0;
  double alpha_step = 0.01;
  // residuals keep |k| <= k_cut (0: no cut); z is analytic with width >= 1, so the
  // discarded band holds only roundoff amplified by the third derivative
  double k_cut = 30.0;
};

class ApproxSolution {
 public:
  ApproxSolution(const SpeedParams& p, const OmegaSolution& omega, Variant v, const ApproxOptions& opt = {});
  // lambda from the omega solution, sigma given
  static ApproxSolution build(const OmegaSolution& omega, double sigma, Variant v, const ApproxOptions& opt = {});

  const SpeedParams& params() const { return p_; }
  Variant variant() const { return variant_; }
  double d() const { return d_; }
  double tau() const;
  const AlphaTable& alpha() const { return alpha_; }
  const std::map<KL, ProfileSet>& profiles() const { return sets_; }
  std::vector<std::tuple<int, int, double>> beta_coeffs() const;  // (k, l, a_kl)
  ShiftData shifts() const;

  // z (or z_#) and its analytic time derivative on the x grid of g
  GridFunction z(double t, const Grid& g) const;
  GridFunction zt(double t, const Grid& g) const;
  // (1 - lambda d_x^2) z_t + d_x(z_xx - z + z^2)
  GridFunction residual(double t, const Grid& g) const;
  // w_# and its time derivative; zero unless the variant carries it
  GridFunction w_sharp(double t, const Grid& g) const;
  // the (Qt^2)''(y_s) (-(3-lambda) P'' + 2Q - 2PQ)(y) term, times -d
  GridFunction fu_term(double t, const Grid& g) const;
  // S(z) minus the two-line decomposition over the sets that are present
  GridFunction decomposition_remainder(double t, const Grid& g) const;

  // physical frame: v(t,x) = lambda/(1-lambda) z_#(t', x')
  GridFunction v(double t, const Grid& g) const;
  GridFunction vt(double t, const Grid& g) const;
  GridFunction physical_residual(double t, const Grid& g) const;

 private:
  struct Fields {
    std::vector<double> z, zt;
  };
  Fields eval(double t, const Grid& g, bool with_t) const;
  bool sharp() const { return variant_ != Variant::symmetric_z; }

  SpeedParams p_;
  Variant variant_;
  std::map<KL, ProfileSet> sets_;
  std::map<KL, std::pair<ProfileSampler, ProfileSampler>> samplers_;  // A, B
  std::map<KL, std::pair<ProfileSampler, ProfileSampler>> brackets_;  // system residual profiles
  AlphaTable alpha_;
  double b10_ = 0.0, b11_ = 0.0, d_ = 0.0, k_cut_ = 0.0;
};

// periodic grid used for residual scans at a given sigma
Grid scan_grid(double sigma);

struct EndpointReport {
  double sigma = 0.0;
  double time = 0.0;             // evaluation time (multiplier * tau)
  double z_plus = 0.0;           // z(tau) against the 3-term profile
  double z_minus = 0.0;          // z(-tau) against the 3-term profile
  double z_plus_no_d = 0.0;      // z(tau) with the -d term omitted
  double zs_plus = 0.0;          // z_#(tau) against the -2d profile
  double zs_minus = 0.0;         // z_#(-tau) against the pure 2-profile sum
  double zs_minus_with_d = 0.0;  // z_#(-tau) against the +d profile (should not improve)
};
// At t = +-multiplier * tau. The displayed profiles are the large-time limits; at
// multiplier 1 the waves are still about one small-wave width apart.
EndpointReport endpoint_decompositions(const OmegaSolution& omega, double sigma, double multiplier = 1.0);

struct ScanPoint {
  double lambda = 0.0, sigma = 0.0;
  double norm_S = 0.0;        // max over the sampled times
  double norm_S_sharp = 0.0;
  double norm_fu_removed = 0.0;  // || S_# - S - fu ||
  double norm_diff = 0.0;        // || S_# - S ||
  double norm_E = 0.0;           // decomposition remainder, levels <= 2
  double alpha_sup = 0.0, alpha_p_sup = 0.0;
  std::vector<double> times;
  std::vector<double> S_at, S_sharp_at;
  EndpointReport endpoints;
  ShiftData shifts;
};
ScanPoint residual_scan_point(const OmegaSolution& omega, double sigma, bool endpoints = true);

}  // namespace bbm
