#include "bbmlab/approx.hpp"

#include <algorithm>
#include <cmath>

namespace bbm {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::symmetric_z: return "z";
    case Variant::modified_z_sharp: return "z-sharp";
    case Variant::physical_v: return "v";
  }
  return "?";
}

namespace {
// int_0^u sech^{2k}
double sech_power_integral(int k, double u) {
  double t = std::tanh(u), t3 = t * t * t;
  switch (k) {
    case 1: return t;
    case 2: return t - t3 / 3.0;
    case 3: return t - 2.0 * t3 / 3.0 + t3 * t * t / 5.0;
  }
  throw ParamError("alpha closed form only for k <= 3");
}

// int Q^k over the line
double q_power_mass(int k) {
  switch (k) {
    case 1: return 6.0;
    case 2: return 6.0;
    case 3: return 7.2;
  }
  throw ParamError("mass of Q^k only for k <= 3");
}

struct QtDerivs {
  double q0, q1, q2, q3;
};

QtDerivs qtilde_all(const SpeedParams& p, double s) {
  return {qtilde_at(p, s, 0), qtilde_at(p, s, 1), qtilde_at(p, s, 2), qtilde_at(p, s, 3)};
}

// Qt^k and its first two derivatives
void qt_power(const QtDerivs& q, int k, double& pk, double& pk1, double& pk2) {
  double km1 = k >= 1 ? std::pow(q.q0, k - 1) : 0.0;
  double km2 = k >= 2 ? std::pow(q.q0, k - 2) : 0.0;
  pk = km1 * q.q0;
  pk1 = k * km1 * q.q1;
  pk2 = k * (k - 1) * km2 * q.q1 * q.q1 + k * km1 * q.q2;
}

double p_at(double y) { return 2.0 * q_at(y) + y * qp_at(y); }
double pp_at(double y) { return 3.0 * qp_at(y) + y * qpp_at(y); }
double ppp_at(double y) { return 4.0 * qpp_at(y) + y * qppp_at(y); }

GridFunction bbm_residual(const GridFunction& z, const GridFunction& zt, double lam) {
  GridFunction inner = derivative(z, 2) - z + z * z;
  return zt - derivative(zt, 2) * lam + derivative(inner, 1);
}
}  // namespace

AlphaTable::AlphaTable(std::vector<std::pair<int, double>> terms, const SpeedParams& p, double s_max, double ds)
    : terms_(std::move(terms)), p_(p), s_max_(s_max), ds_(ds) {
  const int n = static_cast<int>(std::ceil(s_max / ds));
  s_max_ = n * ds;
  a_.assign(n + 1, 0.0);
  // 4-point Gauss-Legendre on each cell
  const double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
  const double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
  for (int j = 0; j < n; ++j) {
    double mid = (j + 0.5) * ds, acc = 0.0;
    for (int i = 0; i < 4; ++i) acc += gw[i] * beta(mid + 0.5 * ds * gx[i]);
    a_[j + 1] = a_[j] + 0.5 * ds * acc;
  }
}

double AlphaTable::beta(double s) const {
  double q = qtilde_at(p_, s, 0), r = 0.0;
  for (auto [k, c] : terms_) r += c * std::pow(q, k);
  return r;
}

double AlphaTable::beta_p(double s) const {
  double q = qtilde_at(p_, s, 0), q1 = qtilde_at(p_, s, 1), r = 0.0;
  for (auto [k, c] : terms_) r += c * k * std::pow(q, k - 1) * q1;
  return r;
}

double AlphaTable::operator()(double s) const {
  if (a_.empty()) return 0.0;
  if (s < 0.0) return -(*this)(-s);
  if (s >= s_max_) return a_.back();
  int j = static_cast<int>(s / ds_);
  double u = s / ds_ - j;
  double s0 = j * ds_;
  double m0 = beta(s0) * ds_, m1 = beta(s0 + ds_) * ds_;
  double u2 = u * u, u3 = u2 * u;
  return (2 * u3 - 3 * u2 + 1) * a_[j] + (u3 - 2 * u2 + u) * m0 + (-2 * u3 + 3 * u2) * a_[j + 1] + (u3 - u2) * m1;
}

double AlphaTable::exact(double s) const {
  const double rs = std::sqrt(p_.sigma), amp = p_.sigma * p_.theta * 1.5;
  double r = 0.0;
  for (auto [k, c] : terms_) r += c * std::pow(amp, k) * (2.0 / rs) * sech_power_integral(k, 0.5 * rs * s);
  return r;
}

ProfileSampler::ProfileSampler(const Profile& p) : g_(p.grid()), d_(p.d.v), dp_(p.deriv().d.v), c0_(p.c0), c1_(p.c1) {}

double ProfileSampler::interp(const std::vector<double>& v, double y) const {
  constexpr int m = 12;
  static const double w[m] = {1, -11, 55, -165, 330, -462, 462, -330, 165, -55, 11, -1};
  const double h = g_.h();
  const double r = (y + g_.L) / h;
  const int j = static_cast<int>(std::floor(r));
  const int lo = j - 5;
  if (lo < 0 || lo + m > g_.n) return 0.0;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < m; ++i) {
    double dx = r - (lo + i);
    if (dx == 0.0) return v[lo + i];
    double c = w[i] / dx;
    num += c * v[lo + i];
    den += c;
  }
  return num / den;
}

double ProfileSampler::value(double y) const { return interp(d_, y) + c0_ + c1_ * phi_at(y); }
double ProfileSampler::deriv(double y) const { return interp(dp_, y); }

ApproxSolution::ApproxSolution(const SpeedParams& p, const OmegaSolution& omega, Variant v, const ApproxOptions& opt)
    : p_(p), variant_(v) {
  if (std::abs(p.lambda - omega.lambda) > 1e-12) throw ParamError("speed parameters and profiles disagree on lambda");
  const double lam = p.lambda;
  std::vector<std::pair<int, double>> terms;
  for (auto& [kl, s] : omega.sets) {
    if (kl.first + kl.second > opt.max_level) continue;
    sets_.emplace(kl, s);
    samplers_.emplace(kl, std::make_pair(ProfileSampler(s.A), ProfileSampler(s.B)));
    terms.push_back({kl.first, s.a * std::pow(p.sigma, kl.second)});
    auto src = omega.sources.find(kl);
    if (src == omega.sources.end()) continue;
    const Grid& g = s.A.grid();
    Profile Q(q_profile(g));
    Profile Qpp(GridFunction::sample(g, qpp_at));
    Profile k1 = Qpp * (lam - 3.0) - Q * Q;
    Profile br1 = k1.deriv() * s.a - apply_L(s.A).deriv() + src->second.F;
    Profile br2 = s.A.deriv(2) * (3.0 - lam) + Q * s.A * 2.0 + Qpp * (s.a * (2.0 * lam - 3.0)) -
                  apply_L(s.B).deriv() + src->second.G;
    brackets_.emplace(kl, std::make_pair(ProfileSampler(br1), ProfileSampler(br2)));
  }
  if (sets_.empty()) throw ParamError("profile sets missing");
  alpha_ = AlphaTable(terms, p, 80.0 / std::sqrt(p.sigma), opt.alpha_step);
  b10_ = sets_.count({1, 0}) ? sets_.at({1, 0}).b : 0.0;
  b11_ = omega.b11;
  d_ = opt.override_d ? opt.d_value : omega.d;
  k_cut_ = opt.k_cut;
}

ApproxSolution ApproxSolution::build(const OmegaSolution& omega, double sigma, Variant v, const ApproxOptions& opt) {
  return ApproxSolution(SpeedParams::from_lambda_sigma(omega.lambda, sigma), omega, v, opt);
}

double ApproxSolution::tau() const { return std::pow(p_.sigma, -0.5 - 0.01); }

std::vector<std::tuple<int, int, double>> ApproxSolution::beta_coeffs() const {
  std::vector<std::tuple<int, int, double>> out;
  for (auto& [kl, s] : sets_) out.emplace_back(kl.first, kl.second, s.a);
  return out;
}

ShiftData ApproxSolution::shifts() const {
  ShiftData sd;
  const double sig = p_.sigma, lam = p_.lambda;
  for (auto& [kl, s] : sets_) {
    int k = kl.first;
    sd.delta += s.a * std::pow(sig, kl.second) * std::pow(sig * p_.theta, k) / std::sqrt(sig) * q_power_mass(k);
  }
  sd.delta_sigma = 2.0 * (b10_ + sig * (b11_ - b10_ * b10_ * b10_ / 6.0));
  sd.Delta1 = sd.delta / std::sqrt(lam);
  sd.Delta2 = sd.delta_sigma / std::sqrt(lam);
  sd.tau = tau();
  const double f = (1.0 - lam) / std::pow(lam, 1.5);
  sd.T = f * sd.tau;
  sd.D = f * d_;
  return sd;
}

ApproxSolution::Fields ApproxSolution::eval(double t, const Grid& g, bool with_t) const {
  Fields f;
  f.z.resize(g.n);
  if (with_t) f.zt.resize(g.n);
  const double mu = p_.mu, sig = p_.sigma;
  const bool sh = sharp();
  for (int j = 0; j < g.n; ++j) {
    const double x = g.x(j);
    const double ys = x + mu * t;
    const double y = x - alpha_(ys);
    const double bt = alpha_.beta(ys);
    const QtDerivs q = qtilde_all(p_, ys);
    double z = q_at(y) + q.q0;
    double zt = mu * (-bt * qp_at(y) + q.q1);
    for (auto& [kl, smp] : samplers_) {
      const double sl = std::pow(sig, kl.second);
      double pk, pk1, pk2;
      qt_power(q, kl.first, pk, pk1, pk2);
      const double A = smp.first.value(y), B = smp.second.value(y);
      z += sl * (A * pk + B * pk1);
      if (with_t) {
        const double Ap = smp.first.deriv(y), Bp = smp.second.deriv(y);
        zt += sl * mu * (-bt * Ap * pk + A * pk1 - bt * Bp * pk1 + B * pk2);
      }
    }
    if (sh && d_ != 0.0) {
      const double g1 = 2.0 * q.q0 * q.q1, g2 = 2.0 * (q.q1 * q.q1 + q.q0 * q.q2);
      const double P = p_at(y);
      z += -d_ * g1 * (1.0 - P);
      zt += -d_ * mu * (g2 * (1.0 - P) + bt * pp_at(y) * g1);
    }
    f.z[j] = z;
    if (with_t) f.zt[j] = zt;
  }
  return f;
}

GridFunction ApproxSolution::z(double t, const Grid& g) const { return GridFunction(g, eval(t, g, false).z); }
GridFunction ApproxSolution::zt(double t, const Grid& g) const { return GridFunction(g, eval(t, g, true).zt); }

GridFunction ApproxSolution::residual(double t, const Grid& g) const {
  auto f = eval(t, g, true);
  GridFunction S = bbm_residual(GridFunction(g, std::move(f.z)), GridFunction(g, std::move(f.zt)), p_.lambda);
  return k_cut_ > 0.0 ? lowpass(S, k_cut_) : S;
}

GridFunction ApproxSolution::w_sharp(double t, const Grid& g) const {
  GridFunction w(g);
  if (!sharp()) return w;
  for (int j = 0; j < g.n; ++j) {
    double ys = g.x(j) + p_.mu * t, y = g.x(j) - alpha_(ys);
    w.v[j] = -d_ * 2.0 * qtilde_at(p_, ys, 0) * qtilde_at(p_, ys, 1) * (1.0 - p_at(y));
  }
  return w;
}

GridFunction ApproxSolution::fu_term(double t, const Grid& g) const {
  GridFunction w(g);
  const double lam = p_.lambda;
  for (int j = 0; j < g.n; ++j) {
    double ys = g.x(j) + p_.mu * t, y = g.x(j) - alpha_(ys);
    auto q = qtilde_all(p_, ys);
    double g2 = 2.0 * (q.q1 * q.q1 + q.q0 * q.q2);
    double Q = q_at(y);
    w.v[j] = -d_ * g2 * (-(3.0 - lam) * ppp_at(y) + 2.0 * Q - 2.0 * p_at(y) * Q);
  }
  return w;
}

GridFunction ApproxSolution::decomposition_remainder(double t, const Grid& g) const {
  GridFunction S = residual(t, g);
  const double sig = p_.sigma;
  for (int j = 0; j < g.n; ++j) {
    double ys = g.x(j) + p_.mu * t, y = g.x(j) - alpha_(ys);
    auto q = qtilde_all(p_, ys);
    for (auto& [kl, br] : brackets_) {
      double pk, pk1, pk2;
      qt_power(q, kl.first, pk, pk1, pk2);
      S.v[j] -= std::pow(sig, kl.second) * (pk * br.first.value(y) + pk1 * br.second.value(y));
    }
  }
  return S;
}

GridFunction ApproxSolution::v(double t, const Grid& g) const {
  FrameMap fm(p_.lambda);
  const double tp = fm.tprime(t);
  GridFunction out(g);
  std::vector<double> xs(g.n);
  for (int j = 0; j < g.n; ++j) xs[j] = fm.xprime(t, g.x(j));
  const double mu = p_.mu, sig = p_.sigma;
  for (int j = 0; j < g.n; ++j) {
    const double x = xs[j], ys = x + mu * tp, y = x - alpha_(ys);
    const QtDerivs q = qtilde_all(p_, ys);
    double z = q_at(y) + q.q0;
    for (auto& [kl, smp] : samplers_) {
      double pk, pk1, pk2;
      qt_power(q, kl.first, pk, pk1, pk2);
      z += std::pow(sig, kl.second) * (smp.first.value(y) * pk + smp.second.value(y) * pk1);
    }
    if (sharp() && d_ != 0.0) z += -d_ * 2.0 * q.q0 * q.q1 * (1.0 - p_at(y));
    out.v[j] = fm.z_to_u() * z;
  }
  return out;
}

GridFunction ApproxSolution::vt(double t, const Grid& g) const {
  // v_t = lambda/(1-lambda) (dt'/dt z_t + dx'/dt z_x)
  const double lam = p_.lambda, rl = std::sqrt(lam);
  FrameMap fm(lam);
  const double tp = fm.tprime(t);
  const double dtp = std::pow(lam, 1.5) / (1.0 - lam), dxp = -rl / (1.0 - lam);
  const double mu = p_.mu, sig = p_.sigma;
  GridFunction out(g);
  for (int j = 0; j < g.n; ++j) {
    const double x = fm.xprime(t, g.x(j)), ys = x + mu * tp, y = x - alpha_(ys);
    const double bt = alpha_.beta(ys);
    const QtDerivs q = qtilde_all(p_, ys);
    double zt = mu * (-bt * qp_at(y) + q.q1);
    double zx = (1.0 - bt) * qp_at(y) + q.q1;
    for (auto& [kl, smp] : samplers_) {
      const double sl = std::pow(sig, kl.second);
      double pk, pk1, pk2;
      qt_power(q, kl.first, pk, pk1, pk2);
      const double A = smp.first.value(y), B = smp.second.value(y);
      const double Ap = smp.first.deriv(y), Bp = smp.second.deriv(y);
      zt += sl * mu * (-bt * Ap * pk + A * pk1 - bt * Bp * pk1 + B * pk2);
      zx += sl * ((1.0 - bt) * Ap * pk + A * pk1 + (1.0 - bt) * Bp * pk1 + B * pk2);
    }
    if (sharp() && d_ != 0.0) {
      const double g1 = 2.0 * q.q0 * q.q1, g2 = 2.0 * (q.q1 * q.q1 + q.q0 * q.q2);
      const double P = p_at(y), Pp = pp_at(y);
      zt += -d_ * mu * (g2 * (1.0 - P) + bt * Pp * g1);
      zx += -d_ * (g2 * (1.0 - P) - (1.0 - bt) * Pp * g1);
    }
    out.v[j] = fm.z_to_u() * (dtp * zt + dxp * zx);
  }
  return out;
}

GridFunction ApproxSolution::physical_residual(double t, const Grid& g) const {
  GridFunction V = v(t, g), Vt = vt(t, g);
  GridFunction R = Vt - derivative(Vt, 2) + derivative(V + V * V, 1);
  return k_cut_ > 0.0 ? lowpass(R, k_cut_) : R;
}

Grid scan_grid(double sigma) {
  // 40 rather than 25 widths: a 1e-12 tail jump at the seam is amplified ~1e6 by d_x^3
  const double L = std::max(60.0, 40.0 / std::sqrt(sigma));
  const double hmax = std::min(0.05, 0.2 * std::sqrt(sigma));
  int n = 16;
  while (2.0 * L / n >= hmax) n *= 2;
  return Grid::periodic(L, n);
}

EndpointReport endpoint_decompositions(const OmegaSolution& omega, double sigma, double multiplier) {
  EndpointReport r;
  r.sigma = sigma;
  auto z = ApproxSolution::build(omega, sigma, Variant::symmetric_z);
  auto zs = ApproxSolution::build(omega, sigma, Variant::modified_z_sharp);
  const auto sd = z.shifts();
  const SpeedParams& p = z.params();
  const double tau = multiplier * z.tau(), mu = p.mu, d = z.d();
  r.time = tau;
  Grid g = scan_grid(sigma);
  if (multiplier > 1.0) {
    // room for the small wave at x = -+mu tau
    int n = g.n;
    double L = g.L + mu * tau;
    while (2.0 * L / n > g.h()) n *= 2;
    g = Grid::periodic(L, n);
  }
  auto profile = [&](int side, double dcoef) {
    // side = +1: Q(x - delta/2) + Qt(x + mu tau - ds/2) + dcoef (Qt^2)'(...)
    return GridFunction::sample(g, [&](double x) {
      double s = x + side * (mu * tau - 0.5 * sd.delta_sigma);
      return q_at(x - side * 0.5 * sd.delta) + qtilde_at(p, s, 0) +
             dcoef * 2.0 * qtilde_at(p, s, 0) * qtilde_at(p, s, 1);
    });
  };
  GridFunction zp = z.z(tau, g), zm = z.z(-tau, g);
  GridFunction sp = zs.z(tau, g), sm = zs.z(-tau, g);
  r.z_plus = norm_h1(zp - profile(1, -d));
  r.z_minus = norm_h1(zm - profile(-1, d));
  r.z_plus_no_d = norm_h1(zp - profile(1, 0.0));
  r.zs_plus = norm_h1(sp - profile(1, -2.0 * d));
  r.zs_minus = norm_h1(sm - profile(-1, 0.0));
  r.zs_minus_with_d = norm_h1(sm - profile(-1, d));
  return r;
}

ScanPoint residual_scan_point(const OmegaSolution& omega, double sigma, bool endpoints) {
  ScanPoint sp;
  sp.lambda = omega.lambda;
  sp.sigma = sigma;
  auto z = ApproxSolution::build(omega, sigma, Variant::symmetric_z);
  auto zs = ApproxSolution::build(omega, sigma, Variant::modified_z_sharp);
  ApproxOptions two;
  two.max_level = 2;
  auto z2 = ApproxSolution::build(omega, sigma, Variant::symmetric_z, two);
  const Grid g = scan_grid(sigma);
  const double tau = z.tau();
  sp.times = {-tau, -0.5 * tau, 0.0, 0.5 * tau, tau};
  for (double t : sp.times) {
    GridFunction S = z.residual(t, g), Ss = zs.residual(t, g);
    GridFunction diff = Ss - S;
    double a = norm_h1(S), b = norm_h1(Ss);
    sp.S_at.push_back(a);
    sp.S_sharp_at.push_back(b);
    sp.norm_S = std::max(sp.norm_S, a);
    sp.norm_S_sharp = std::max(sp.norm_S_sharp, b);
    sp.norm_diff = std::max(sp.norm_diff, norm_h1(diff));
    sp.norm_fu_removed = std::max(sp.norm_fu_removed, norm_h1(diff - zs.fu_term(t, g)));
    sp.norm_E = std::max(sp.norm_E, norm_h1(z2.decomposition_remainder(t, g)));
  }
  sp.alpha_sup = std::abs(z.alpha().limit()) / std::sqrt(sigma);
  double bmax = 0.0;
  for (double s = 0.0; s < 20.0 / std::sqrt(sigma); s += 0.05 / std::sqrt(sigma))
    bmax = std::max(bmax, std::abs(z.alpha().beta(s)));
  sp.alpha_p_sup = bmax / sigma;
  if (endpoints) sp.endpoints = endpoint_decompositions(omega, sigma);
  sp.shifts = zs.shifts();
  return sp;
}

}  // namespace bbm
