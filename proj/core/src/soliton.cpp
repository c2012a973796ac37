#include "bbmlab/soliton.hpp"

#include <cmath>

namespace bbm {

namespace {
// sech^2(y) written with exp(-2|y|) so large |y| underflows to 0 instead of overflowing
double sech2(double y) {
  double a = std::abs(y);
  if (a > 350.0) return 0.0;
  double e = std::exp(-2.0 * a);
  return 4.0 * e / ((1.0 + e) * (1.0 + e));
}
}  // namespace

double q_at(double x) { return 1.5 * sech2(0.5 * x); }
double qp_at(double x) { return -1.5 * sech2(0.5 * x) * std::tanh(0.5 * x); }
double qpp_at(double x) {
  double q = q_at(x);
  return q - q * q;
}
double qppp_at(double x) {
  double q = q_at(x);
  return qp_at(x) * (1.0 - 2.0 * q);
}
double phi_at(double x) { return std::tanh(0.5 * x); }

double phic_at(double c, double x) { return (c - 1.0) * q_at(std::sqrt((c - 1.0) / c) * x); }
double phic_p_at(double c, double x) {
  double s = std::sqrt((c - 1.0) / c);
  return (c - 1.0) * s * qp_at(s * x);
}

SpeedParams SpeedParams::from_speeds(double c1, double c2) {
  if (!(c1 > 1.0) || !(c2 > 1.0)) throw ParamError("speeds must exceed 1");
  if (c2 > c1) throw ParamError("need c2 <= c1");
  SpeedParams p;
  p.c1 = c1;
  p.c2 = c2;
  p.lambda = (c1 - 1.0) / c1;
  p.sigma = (c2 - 1.0) / (c2 * p.lambda);
  p.theta = (1.0 - p.lambda) / (1.0 - p.lambda * p.sigma);
  p.mu = (1.0 - p.sigma) / (1.0 - p.lambda * p.sigma);
  return p;
}

SpeedParams SpeedParams::from_lambda_sigma(double lambda, double sigma) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw ParamError("lambda must lie in (0,1)");
  if (!(sigma > 0.0 && sigma <= 1.0)) throw ParamError("sigma must lie in (0,1]");
  SpeedParams p;
  p.lambda = lambda;
  p.sigma = sigma;
  p.c1 = 1.0 / (1.0 - lambda);
  p.c2 = 1.0 / (1.0 - lambda * sigma);
  p.theta = (1.0 - lambda) / (1.0 - lambda * sigma);
  p.mu = (1.0 - sigma) / (1.0 - lambda * sigma);
  return p;
}

GridFunction q_profile(const Grid& g) { return GridFunction::sample(g, q_at); }
GridFunction qp_profile(const Grid& g) { return GridFunction::sample(g, qp_at); }

GridFunction phi_c(double c, const Grid& g, double x0) {
  if (!(c > 1.0)) throw ParamError("phi_c needs c > 1");
  return GridFunction::sample(g, [c, x0](double x) { return phic_at(c, x - x0); });
}

double qtilde_at(const SpeedParams& p, double x, int order) {
  double s = std::sqrt(p.sigma);
  double y = s * x;
  double amp = p.sigma * p.theta;
  switch (order) {
    case 0: return amp * q_at(y);
    case 1: return amp * s * qp_at(y);
    case 2: return amp * p.sigma * qpp_at(y);
    case 3: return amp * p.sigma * s * qppp_at(y);
    default: throw ParamError("qtilde derivative order must be 0..3");
  }
}

GridFunction qtilde_sigma(const SpeedParams& p, const Grid& g) {
  return GridFunction::sample(g, [&p](double x) { return qtilde_at(p, x); });
}

EnergyMass energy_mass(const GridFunction& f) {
  auto d = derivative(f, 1);
  double u2 = 0.0, u3 = 0.0, d2 = 0.0;
  for (int j = 0; j < f.size(); ++j) {
    double u = f.v[j];
    u2 += u * u;
    u3 += u * u * u;
    d2 += d.v[j] * d.v[j];
  }
  double h = f.grid.h();
  return {h * (0.5 * u2 + u3 / 3.0), 0.5 * h * (d2 + u2)};
}

double FrameMap::tprime(double t) const { return std::pow(lambda, 1.5) * t / (1.0 - lambda); }
double FrameMap::xprime(double t, double x) const {
  return std::sqrt(lambda) * (x - t / (1.0 - lambda));
}
double FrameMap::t_of(double tp) const { return tp * (1.0 - lambda) / std::pow(lambda, 1.5); }
double FrameMap::x_of(double tp, double xp) const {
  return xp / std::sqrt(lambda) + t_of(tp) / (1.0 - lambda);
}
double FrameMap::shift_to_physical(double delta) const { return delta / std::sqrt(lambda); }

double IdentityCheck::error() const {
  double e = std::abs(value - expected);
  if (relative && expected != 0.0) e /= std::abs(expected);
  return e;
}

std::vector<IdentityCheck> identity_suite(const Grid& g, double tol) {
  std::vector<IdentityCheck> out;
  auto Q = q_profile(g);
  auto Qp = qp_profile(g);
  auto X = GridFunction::sample(g, [](double x) { return x; });
  auto X2 = X * X;
  auto Q2 = Q * Q;
  auto Q3 = Q2 * Q;
  const double iq2 = 6.0;
  const double ix2q2 = 2.0 * M_PI * M_PI - 12.0;

  out.push_back({"int Q", integrate(Q), 6.0, tol});
  out.push_back({"int Q^2", integrate(Q2), iq2, tol});
  out.push_back({"int Q^3", integrate(Q3), 1.2 * iq2, tol});
  out.push_back({"int Q'^2", dot(Qp, Qp), 0.2 * iq2, tol});
  out.push_back({"int x^2 Q^2", dot(X2, Q2), ix2q2, tol});
  out.push_back({"int x^2 Q^3", dot(X2, Q3), 1.2 * ix2q2 - 0.6 * iq2, tol});
  out.push_back({"int x^2 Q'^2", dot(X2, Qp * Qp), 0.2 * ix2q2 + 0.4 * iq2, tol});

  for (double c : {1.1, 1.5, 2.0, 4.0}) {
    auto f = phi_c(c, g);
    auto fp = GridFunction::sample(g, [c](double x) { return phic_p_at(c, x); });
    double base = std::pow(c - 1.0, 1.5) * std::sqrt(c) * iq2;
    std::string tag = " (c=" + std::to_string(c).substr(0, 3) + ")";
    double f2 = dot(f, f);
    out.push_back({"int phi_c^2" + tag, f2, base, tol});
    out.push_back({"int phi_c^3" + tag, integrate(f * f * f), 1.2 * (c - 1.0) * base, tol});
    out.push_back({"int phi_c'^2" + tag, dot(fp, fp), 0.2 * ((c - 1.0) / c) * base, tol});
    auto em = energy_mass(f);
    double E = 0.5 * (1.0 + 0.8 * (c - 1.0)) * base;
    double N = 0.5 * std::pow(c - 1.0, 1.5) / std::sqrt(c) * (0.2 * (c - 1.0) + c) * iq2;
    out.push_back({"E(phi_c)" + tag, em.E, E, tol});
    out.push_back({"N(phi_c)" + tag, em.N, N, tol});
    out.push_back({"E - cN" + tag, em.E - c * em.N,
                   -0.2 * std::pow(c - 1.0, 2.5) * std::sqrt(c) * iq2, tol});
  }
  return out;
}

}  // namespace bbm
